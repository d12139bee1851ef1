#include "cognate/service.hpp"

#include <httplib.h>
#include <json.hpp>

#include <ostream>

#include "cognate/query.hpp"
#include "cognate/surface.hpp"

namespace cognate::service {

using nlohmann::json;

namespace {

Response error(int status, const std::string& message, json extra = json::object()) {
  extra["error"] = message;
  return Response{status, extra.dump()};
}

json diagnostic_json(const Diagnostic& d) {
  return json{{"message", d.message}, {"line", d.span.line}, {"column", d.span.column}};
}

// Dataset bodies: a string is CSV text, any other JSON value is taken as is.
Dataset dataset_from_json(const std::string& name, const json& v) {
  if (v.is_string()) return parse_csv(name, v.get<std::string>());
  return parse_json(name, v.dump());
}

json datum(const Session& s, const Value& v) {
  json d{{"address", v.addr().id}};
  const VertexInfo& info = s.info.at(v.addr().id);
  if (info.numeric()) {
    d["value"] = info.number;
  } else if (const auto* str = v.get_if<StrVal>()) {
    d["value"] = str->value;
  } else {
    d["value"] = info.label;
  }
  return d;
}

std::optional<std::vector<Value>> list_items(const Value& v) {
  std::vector<Value> out;
  const Value* cur = &v;
  while (const auto* c = cur->get_if<ConstrVal>()) {
    if (c->name == "Nil" && c->args.empty()) return out;
    if (c->name != "Cons" || c->args.size() != 2) return std::nullopt;
    out.push_back(c->args[0]);
    cur = &c->args[1];
  }
  return std::nullopt;
}

bool is_number(const Value& v) { return v.get_if<IntVal>() != nullptr || v.get_if<FloatVal>() != nullptr; }

const Value* field(const Value& v, std::string_view name) {
  const auto* r = v.get_if<RecordVal>();
  return r != nullptr ? r->find(name) : nullptr;
}

// A point is a number (x is its index) or a record with x and y.
json series(const Session& s, const Value& list) {
  json points = json::array();
  const auto items = list_items(list);
  if (!items) return points;
  for (std::size_t i = 0; i < items->size(); ++i) {
    const Value& item = (*items)[i];
    if (is_number(item)) {
      json p = datum(s, item);
      p["x"] = i;
      points.push_back(std::move(p));
    } else if (const Value* y = field(item, "y")) {
      json p = datum(s, *y);
      if (const Value* x = field(item, "x")) {
        p["x"] = datum(s, *x)["value"];
        p["x_address"] = x->addr().id;
      } else {
        p["x"] = i;
      }
      points.push_back(std::move(p));
    }
  }
  return points;
}

std::optional<json> chart(const Session& s, const Value& v, std::string kind) {
  const Value* body = &v;
  if (const auto* c = v.get_if<ConstrVal>()) {
    if (c->args.size() != 1) return std::nullopt;
    if (c->name == "LineChart") {
      kind = "line";
    } else if (c->name == "BarChart") {
      kind = "bar";
    } else if (c->name == "ScatterPlot") {
      kind = "scatter";
    } else {
      return std::nullopt;
    }
    body = &c->args[0];
  }
  if (body->get_if<RecordVal>() == nullptr) return std::nullopt;
  const Value* points = field(*body, "points");
  const Value* bars = field(*body, "bars");
  if (points == nullptr && bars == nullptr) return std::nullopt;
  if (kind.empty()) kind = bars != nullptr ? "bar" : "line";
  json c{{"kind", kind}, {"address", v.addr().id}};
  const Value* caption = field(*body, "caption");
  c["caption"] = caption != nullptr && caption->get_if<StrVal>() ? caption->get_if<StrVal>()->value : "";
  c["points"] = series(s, bars != nullptr ? *bars : *points);
  return c;
}

json charts(const Session& s) {
  json out = json::array();
  if (auto c = chart(s, s.result, "")) {
    out.push_back(std::move(*c));
    return out;
  }
  const auto items = list_items(s.result);
  if (!items) return out;
  if (std::all_of(items->begin(), items->end(), is_number)) {
    out.push_back(json{{"kind", "line"}, {"caption", ""}, {"points", series(s, s.result)}});
    return out;
  }
  for (const auto& item : *items) {
    if (auto c = chart(s, item, "")) out.push_back(std::move(*c));
  }
  return out;
}

// Rows come from the input path map: `name[i]` or `name[i].field`.
json tables(const Session& s, const std::vector<std::string>& datasets) {
  json out = json::array();
  std::map<std::string, json> by_name;
  std::vector<std::string> order;
  for (const auto& name : datasets) {
    by_name[name] = json{{"name", name}, {"columns", json::array()}, {"rows", json::array()}};
    order.push_back(name);
  }
  for (const auto& [path, a] : s.inputs.entries()) {
    const auto open = path.find('[');
    if (open == std::string::npos) continue;
    const auto close = path.find(']', open);
    if (close == std::string::npos) continue;
    const std::string name = path.substr(0, open);
    const std::size_t row = std::stoul(path.substr(open + 1, close - open - 1));
    std::string column = path.substr(close + 1);
    if (!column.empty() && column.front() == '.') column.erase(0, 1);
    const VertexInfo& info = s.info.at(a.id);
    if (info.kind == VertexKind::Record || info.kind == VertexKind::Constr) continue;
    if (column.empty()) column = "value";

    if (!by_name.count(name)) {
      by_name[name] = json{{"name", name}, {"columns", json::array()}, {"rows", json::array()}};
      order.push_back(name);
    }
    json& t = by_name[name];
    if (std::find(t["columns"].begin(), t["columns"].end(), column) == t["columns"].end()) {
      t["columns"].push_back(column);
    }
    while (t["rows"].size() <= row) t["rows"].push_back(json::object());
    json cell{{"address", a.id}, {"label", info.label}};
    if (info.numeric()) {
      cell["value"] = info.number;
    } else {
      cell["value"] = info.label;
    }
    t["rows"][row][column] = std::move(cell);
  }
  for (const auto& name : order) out.push_back(std::move(by_name[name]));
  return out;
}

std::string id_from(std::string_view path_id) { return std::string(path_id); }

}  // namespace

std::string view_json(const Session& s, const std::vector<std::string>& datasets) {
  return json{{"result", to_string(erase(s.result))}, {"tables", tables(s, datasets)}, {"charts", charts(s)}}.dump();
}

std::shared_ptr<const Stored> SessionStore::insert(Session s, std::string view) {
  std::unique_lock lock(mutex_);
  auto stored = std::make_shared<Stored>();
  stored->id = "s" + std::to_string(next_id_++);
  stored->session = std::move(s);
  stored->view = std::move(view);
  sessions_[stored->id] = stored;
  {
    std::lock_guard order_lock(order_mutex_);
    order_.push_front(stored->id);
    while (order_.size() > cap_) {
      sessions_.erase(order_.back());
      order_.pop_back();
    }
  }
  return stored;
}

std::shared_ptr<const Stored> SessionStore::find(std::string_view id) {
  std::shared_lock lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return nullptr;
  std::lock_guard order_lock(order_mutex_);
  auto pos = std::find(order_.begin(), order_.end(), it->first);
  if (pos != order_.end()) order_.splice(order_.begin(), order_, pos);
  return it->second;
}

std::size_t SessionStore::size() const {
  std::shared_lock lock(mutex_);
  return sessions_.size();
}

Response Service::create_session(std::string_view body) {
  json req = json::parse(body, nullptr, false);
  if (req.is_discarded() || !req.is_object()) return error(400, "request body is not a JSON object");
  if (!req.contains("source") || !req["source"].is_string()) return error(400, "missing source");

  std::vector<Dataset> datasets;
  try {
    if (req.contains("datasets")) {
      if (!req["datasets"].is_object()) return error(400, "datasets must be an object");
      for (const auto& [name, value] : req["datasets"].items()) datasets.push_back(dataset_from_json(name, value));
    }
    const std::string source = req["source"].get<std::string>();
    const ExprPtr core = surface::compile(source);
    for (const auto& name : surface::parse(source).datasets()) {
      const bool given = std::any_of(datasets.begin(), datasets.end(), [&](const Dataset& d) { return d.name == name; });
      if (!given) return error(400, "dataset " + name + " is declared but not supplied");
    }
    Session s = run(*core, datasets);
    std::vector<std::string> names;
    for (const auto& d : datasets) names.push_back(d.name);
    std::string view = view_json(s, names);
    json inputs = json::array();
    for (const auto& [path, a] : s.inputs.entries()) inputs.push_back(json{{"path", path}, {"address", a.id}});
    json outputs = json::array();
    for (const auto& [path, a] : s.outputs.entries()) outputs.push_back(json{{"path", path}, {"address", a.id}});
    auto stored = store_.insert(std::move(s), std::move(view));
    json resp{{"id", stored->id},
              {"view", json::parse(stored->view)},
              {"inputs", std::move(inputs)},
              {"outputs", std::move(outputs)}};
    return Response{201, resp.dump()};
  } catch (const surface::SyntaxError& e) {
    return error(400, e.message(), json{{"line", e.span().line}, {"column", e.span().column}});
  } catch (const surface::DesugarError& e) {
    json diags = json::array();
    for (const auto& d : e.diagnostics()) diags.push_back(diagnostic_json(d));
    json extra{{"diagnostics", diags}};
    if (!e.diagnostics().empty()) {
      extra["line"] = e.diagnostics().front().span.line;
      extra["column"] = e.diagnostics().front().span.column;
    }
    return error(400, e.what(), std::move(extra));
  } catch (const EvalError& e) {
    return error(400, e.what(), json{{"line", e.span().line}, {"column", e.span().column}});
  } catch (const std::exception& e) {
    return error(400, e.what());
  }
}

Response Service::query(std::string_view id, std::string_view body) {
  auto stored = store_.find(id);
  if (!stored) return error(404, "no session " + id_from(id));
  json req = json::parse(body, nullptr, false);
  if (req.is_discarded() || !req.is_object()) return error(400, "request body is not a JSON object");
  if (!req.contains("op") || !req["op"].is_string()) return error(400, "missing op");
  const auto op = parse_query_op(req["op"].get<std::string>());
  if (!op) return error(400, "unknown op " + req["op"].get<std::string>());
  if (!req.contains("selection") || !req["selection"].is_array()) return error(400, "selection must be an array");

  const Session& s = stored->session;
  VertexSet selection(s.graph.capacity());
  for (const auto& a : req["selection"]) {
    if (!a.is_number_unsigned()) return error(400, "addresses must be non-negative integers");
    const Address addr{a.get<std::uint32_t>()};
    if (!s.graph.has_vertex(addr)) return error(422, "no vertex " + std::to_string(addr.id));
    selection.insert(addr);
  }
  std::string restrict_to = "none";
  if (req.contains("restrict")) {
    if (!req["restrict"].is_string()) return error(400, "restrict must be a string");
    restrict_to = req["restrict"].get<std::string>();
  }
  if (restrict_to != "none" && restrict_to != "inputs" && restrict_to != "outputs") {
    return error(400, "restrict must be inputs, outputs or none");
  }

  try {
    VertexSet result = run_query(*op, s.graph, selection);
    if (restrict_to == "inputs") result &= s.inputs.addresses();
    if (restrict_to == "outputs") result &= s.outputs.addresses();
    json ids = json::array();
    result.for_each([&](Address a) { ids.push_back(a.id); });
    return Response{200, json{{"selection", std::move(ids)}}.dump()};
  } catch (const UniverseError& e) {
    return error(422, e.what());
  }
}

Response Service::graph(std::string_view id) {
  auto stored = store_.find(id);
  if (!stored) return error(404, "no session " + id_from(id));
  const Session& s = stored->session;
  json vertices = json::array();
  s.graph.vertices().for_each([&](Address a) { vertices.push_back(json{{"id", a.id}, {"label", s.label(a)}}); });
  json edges = json::array();
  for (const Edge& e : s.graph.edges()) edges.push_back(json::array({e.from.id, e.to.id}));
  return Response{200, json{{"vertices", std::move(vertices)}, {"edges", std::move(edges)}}.dump()};
}

void Service::mount(httplib::Server& server) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  auto reply = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.Post("/sessions", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, create_session(req.body));
  });
  server.Post(R"(/sessions/([^/]+)/query)", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, query(req.matches[1].str(), req.body));
  });
  server.Get(R"(/sessions/([^/]+)/graph)", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, graph(req.matches[1].str()));
  });
}

int serve(int port, std::size_t session_cap, std::ostream& log) {
  Service service(session_cap);
  httplib::Server server;
  service.mount(server);
  log << "listening on port " << port << "\n";
  log.flush();
  if (!server.listen("0.0.0.0", port)) {
    log << "error: cannot listen on port " << port << "\n";
    return 1;
  }
  return 0;
}

}  // namespace cognate::service
