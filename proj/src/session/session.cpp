#include "cognate/session.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cognate {

void PathMap::add(std::string path, Address a) { entries_.emplace_back(std::move(path), a); }

std::optional<Address> PathMap::find(std::string_view path) const {
  for (const auto& [p, a] : entries_) {
    if (p == path) return a;
  }
  return std::nullopt;
}

std::optional<std::string> PathMap::path_of(Address a) const {
  for (const auto& [p, b] : entries_) {
    if (a == b) return p;
  }
  return std::nullopt;
}

VertexSet PathMap::addresses() const {
  VertexSet out;
  for (const auto& [_, a] : entries_) out.insert(a);
  return out;
}

namespace {

bool is_cons(const Value& v) {
  const auto* c = v.get_if<ConstrVal>();
  return c != nullptr && ((c->name == "Cons" && c->args.size() == 2) || (c->name == "Nil" && c->args.empty()));
}

}  // namespace

void collect_paths(const Value& v, const std::string& root, PathMap& out) {
  if (is_cons(v)) {
    const Value* cur = &v;
    std::size_t i = 0;
    while (const auto* c = cur->get_if<ConstrVal>()) {
      if (c->name != "Cons" || c->args.size() != 2) break;
      collect_paths(c->args[0], root + "[" + std::to_string(i++) + "]", out);
      cur = &c->args[1];
    }
    if (!is_cons(*cur)) collect_paths(*cur, root + "#tail", out);
    return;
  }
  out.add(root, v.addr());
  if (const auto* r = v.get_if<RecordVal>()) {
    for (const auto& [name, field] : r->fields) collect_paths(field, root + "." + name, out);
  } else if (const auto* c = v.get_if<ConstrVal>()) {
    for (std::size_t i = 0; i < c->args.size(); ++i) collect_paths(c->args[i], root + "#" + std::to_string(i), out);
  }
}

// ---------------------------------------------------------------------------
// Datasets

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

PlainTerm csv_cell(std::string_view raw, bool quoted) {
  if (quoted) return PlainTerm::string(std::string(raw));
  const std::string_view s = trim(raw);
  if (!s.empty()) {
    std::int64_t n = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec == std::errc() && p == s.data() + s.size()) return PlainTerm::integer(n);
    double r = 0.0;
    auto [q, ec2] = std::from_chars(s.data(), s.data() + s.size(), r);
    if (ec2 == std::errc() && q == s.data() + s.size()) return PlainTerm::floating(r);
  }
  return PlainTerm::string(std::string(s));
}

struct CsvField {
  std::string text;
  bool quoted = false;
};

std::vector<std::vector<CsvField>> split_csv(std::string_view text) {
  std::vector<std::vector<CsvField>> rows;
  std::vector<CsvField> row;
  CsvField field;
  bool in_quotes = false;
  bool row_has_content = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.text += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.text += c;
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      field.quoted = true;
      row_has_content = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field = {};
      row_has_content = true;
    } else if (c == '\n') {
      if (row_has_content || !trim(field.text).empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row = {};
      field = {};
      row_has_content = false;
    } else {
      field.text += c;
    }
  }
  if (in_quotes) throw DatasetError("csv: unterminated quoted field");
  if (row_has_content || !trim(field.text).empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

PlainTerm list_of(std::vector<PlainTerm> items) {
  PlainTerm out = PlainTerm::constr("Nil");
  for (auto it = items.rbegin(); it != items.rend(); ++it) out = PlainTerm::constr("Cons", {std::move(*it), std::move(out)});
  return out;
}

PlainTerm from_json(const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::array: {
      std::vector<PlainTerm> items;
      for (const auto& x : j) items.push_back(from_json(x));
      return list_of(std::move(items));
    }
    case nlohmann::json::value_t::object: {
      std::vector<std::pair<std::string, PlainTerm>> fields;
      for (const auto& [k, v] : j.items()) fields.emplace_back(k, from_json(v));
      return PlainTerm::record(std::move(fields));
    }
    case nlohmann::json::value_t::boolean: return PlainTerm::constr(j.get<bool>() ? "True" : "False");
    case nlohmann::json::value_t::null: return PlainTerm::constr("None");
    case nlohmann::json::value_t::number_integer: return PlainTerm::integer(j.get<std::int64_t>());
    case nlohmann::json::value_t::number_unsigned: return PlainTerm::integer(static_cast<std::int64_t>(j.get<std::uint64_t>()));
    case nlohmann::json::value_t::number_float: return PlainTerm::floating(j.get<double>());
    case nlohmann::json::value_t::string: return PlainTerm::string(j.get<std::string>());
    default: throw DatasetError("json: unsupported value");
  }
}

}  // namespace

Dataset parse_csv(std::string name, std::string_view text) {
  auto rows = split_csv(text);
  if (rows.empty()) return Dataset{std::move(name), PlainTerm::constr("Nil")};
  std::vector<std::string> header;
  for (const auto& f : rows[0]) {
    const std::string h(trim(f.text));
    if (h.empty()) throw DatasetError("csv: empty column name");
    header.push_back(h);
  }
  std::vector<PlainTerm> records;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) {
      throw DatasetError("csv: row " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) +
                         " cells, expected " + std::to_string(header.size()));
    }
    std::vector<std::pair<std::string, PlainTerm>> fields;
    for (std::size_t c = 0; c < header.size(); ++c) fields.emplace_back(header[c], csv_cell(rows[r][c].text, rows[r][c].quoted));
    records.push_back(PlainTerm::record(std::move(fields)));
  }
  return Dataset{std::move(name), list_of(std::move(records))};
}

Dataset parse_json(std::string name, std::string_view text) {
  try {
    return Dataset{std::move(name), from_json(nlohmann::json::parse(text))};
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError(std::string("json: ") + e.what());
  }
}

Dataset load_dataset(std::string name, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::filesystem::filesystem_error("cannot open dataset", path, std::make_error_code(std::errc::no_such_file_or_directory));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (path.extension() == ".json") return parse_json(std::move(name), buf.str());
  return parse_csv(std::move(name), buf.str());
}

// ---------------------------------------------------------------------------
// Running programs

namespace {

Value place_plain(Heap& heap, const PlainTerm& t) {
  const Address a = heap.reserve();
  switch (t.kind) {
    case PlainTerm::Kind::Int: return heap.place(a, IntVal{t.int_value}, {});
    case PlainTerm::Kind::Float: return heap.place(a, FloatVal{t.float_value}, {});
    case PlainTerm::Kind::Str: return heap.place(a, StrVal{t.text}, {});
    case PlainTerm::Kind::Record: {
      RecordVal rec;
      for (std::size_t i = 0; i < t.names.size(); ++i) rec.fields.emplace_back(t.names[i], place_plain(heap, t.children[i]));
      return heap.place(a, std::move(rec), {});
    }
    case PlainTerm::Kind::Constr: {
      ConstrVal c{t.text, {}};
      for (const auto& child : t.children) c.args.push_back(place_plain(heap, child));
      return heap.place(a, std::move(c), {});
    }
    case PlainTerm::Kind::Closure: break;
  }
  throw DatasetError("datasets cannot contain functions");
}

}  // namespace

std::vector<std::string> prelude_names(const ForeignRegistry& foreign) { return foreign.names(); }

Session run(const Expr& program, const std::vector<Dataset>& datasets, const RunOptions& options) {
  const ForeignRegistry& foreign = options.foreign != nullptr ? *options.foreign : ForeignRegistry::standard();
  Heap heap;
  PathMap inputs;
  std::vector<std::pair<std::string, Value>> data_bindings;
  for (const auto& ds : datasets) {
    Value v = place_plain(heap, ds.value);
    collect_paths(v, ds.name, inputs);
    data_bindings.emplace_back(ds.name, std::move(v));
  }

  Env env;
  static const RecDefsPtr no_defs = std::make_shared<const RecDefs>();
  for (const auto& name : foreign.names()) {
    const ForeignImpl* impl = foreign.find(name);
    env = env.extend(name, heap.allocate(ClosureVal{Env{}, no_defs, foreign_wrapper(name, impl->arity)},
                                         std::span<const Address>{}));
  }
  for (auto& [name, v] : data_bindings) env = env.extend(name, std::move(v));

  Evaluator ev(heap, foreign, options.limits);
  Value result = ev.eval(env, program, Demand{});

  Session s;
  s.result = std::move(result);
  collect_paths(s.result, "out", s.outputs);
  s.inputs = std::move(inputs);
  s.info = std::move(heap).take_info();
  s.graph = std::move(heap).freeze();
  return s;
}

std::string Session::label(Address a) const {
  if (a.id < info.size() && graph.has_vertex(a)) return info[a.id].label;
  return "?";
}

// ---------------------------------------------------------------------------
// Session directories

namespace {

constexpr std::string_view kSessionMagic = "cognate-session";
constexpr int kSessionVersion = 1;

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::filesystem::filesystem_error("cannot write", p, std::make_error_code(std::errc::io_error));
  out << text;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::filesystem::filesystem_error("cannot read", p, std::make_error_code(std::errc::no_such_file_or_directory));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string map_text(const PathMap& m, const Session& s) {
  std::string out;
  for (const auto& [path, a] : m.entries()) out += path + "\t" + std::to_string(a.id) + "\t" + s.label(a) + "\n";
  return out;
}

PathMap parse_map(const std::string& text, const std::string& file) {
  PathMap m;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) throw SessionFormatError(file + ":" + std::to_string(lineno) + ": malformed entry");
    std::uint32_t id = 0;
    const auto* begin = line.data() + tab1 + 1;
    const auto* end = line.data() + tab2;
    auto [p, ec] = std::from_chars(begin, end, id);
    if (ec != std::errc() || p != end) throw SessionFormatError(file + ":" + std::to_string(lineno) + ": bad address");
    m.add(line.substr(0, tab1), Address{id});
  }
  return m;
}

}  // namespace

void write_session(const std::filesystem::path& dir, const Session& s) {
  std::filesystem::create_directories(dir);
  write_file(dir / "result.txt", to_string(erase(s.result)) + "\n");
  write_file(dir / "graph.edges", to_edge_list(s.graph));
  write_file(dir / "inputs.map", map_text(s.inputs, s));
  write_file(dir / "outputs.map", map_text(s.outputs, s));
  std::string labels;
  s.graph.vertices().for_each([&](Address a) { labels += std::to_string(a.id) + "\t" + s.label(a) + "\n"; });
  write_file(dir / "labels.tsv", labels);
  std::ostringstream meta;
  meta << kSessionMagic << ' ' << kSessionVersion << '\n'
       << "vertices " << s.graph.vertex_count() << '\n'
       << "edges " << s.graph.edge_count() << '\n';
  write_file(dir / "meta", meta.str());
}

StoredSession read_session(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::filesystem::filesystem_error("not a session directory", dir, std::make_error_code(std::errc::no_such_file_or_directory));
  }
  std::istringstream meta(read_file(dir / "meta"));
  std::string magic;
  int version = 0;
  if (!(meta >> magic >> version) || magic != kSessionMagic) throw SessionFormatError("meta: not a session");
  if (version != kSessionVersion) throw SessionFormatError("meta: unsupported version " + std::to_string(version));

  StoredSession out;
  out.result_text = read_file(dir / "result.txt");
  while (!out.result_text.empty() && out.result_text.back() == '\n') out.result_text.pop_back();
  out.graph = parse_edge_list(read_file(dir / "graph.edges"));
  out.inputs = parse_map(read_file(dir / "inputs.map"), "inputs.map");
  out.outputs = parse_map(read_file(dir / "outputs.map"), "outputs.map");
  out.labels.resize(out.graph.capacity());
  if (std::filesystem::exists(dir / "labels.tsv")) {
    std::istringstream is(read_file(dir / "labels.tsv"));
    std::string line;
    while (std::getline(is, line)) {
      const auto tab = line.find('\t');
      if (tab == std::string::npos) continue;
      std::uint32_t id = 0;
      auto [p, ec] = std::from_chars(line.data(), line.data() + tab, id);
      if (ec != std::errc() || p != line.data() + tab) throw SessionFormatError("labels.tsv: bad address");
      if (id < out.labels.size()) out.labels[id] = line.substr(tab + 1);
    }
  }
  return out;
}

}  // namespace cognate
