#include <doctest.h>

#include <httplib.h>
#include <json.hpp>

#include <fstream>
#include <sstream>
#include <thread>

#include "../support/oracle.hpp"
#include "cognate/query.hpp"
#include "cognate/service.hpp"

using namespace cognate;
using nlohmann::json;

namespace {

std::string read(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string mavg_request(const std::string& data) {
  return json{{"source", read(std::string(COGNATE_SOURCE_DIR) + "/programs/mavg.cog")},
              {"datasets", {{"data", json::parse(data)}}}}
      .dump();
}

std::uint32_t input_address(const json& created, const std::string& path) {
  for (const auto& e : created["inputs"]) {
    if (e["path"] == path) return e["address"].get<std::uint32_t>();
  }
  FAIL("no input " << path);
  return 0;
}

std::vector<std::uint32_t> selection(const service::Response& r) {
  return json::parse(r.body)["selection"].get<std::vector<std::uint32_t>>();
}

}  // namespace

TEST_CASE("creating a session returns a table and a line chart") {
  service::Service svc;
  const auto r = svc.create_session(mavg_request("[18.17, 22.13, 37.14, 61.27]"));
  REQUIRE(r.status == 201);
  const json body = json::parse(r.body);
  CHECK(body["view"]["tables"].size() == 1);
  CHECK(body["view"]["tables"][0]["rows"].size() == 4);
  REQUIRE(body["view"]["charts"].size() == 1);
  CHECK(body["view"]["charts"][0]["kind"] == "line");
  CHECK(body["view"]["charts"][0]["points"].size() == 3);
  for (const auto& p : body["view"]["charts"][0]["points"]) CHECK(p.contains("address"));
}

TEST_CASE("csv datasets and empty datasets") {
  service::Service svc;
  const std::string csv = json{{"source", "data t;\nmap (fun r -> r.v * 2) t"},
                               {"datasets", {{"t", "v\n1\n2\n"}}}}
                              .dump();
  const auto r = svc.create_session(csv);
  REQUIRE(r.status == 201);
  CHECK(json::parse(r.body)["view"]["tables"][0]["columns"] == json::array({"v"}));

  const auto empty = svc.create_session(mavg_request("[]"));
  REQUIRE(empty.status == 201);
  const json view = json::parse(empty.body)["view"];
  REQUIRE(view["charts"].size() == 1);
  CHECK(view["charts"][0]["points"].empty());
  CHECK(json::parse(empty.body)["inputs"].empty());
}

TEST_CASE("malformed source yields 400 with a position") {
  service::Service svc;
  const auto r = svc.create_session(json{{"source", "let x = ;\nx"}}.dump());
  CHECK(r.status == 400);
  const json body = json::parse(r.body);
  CHECK(body["line"] == 1);
  CHECK(body["column"] == 9);
  CHECK(svc.create_session("not json").status == 400);
  CHECK(svc.create_session(json{{"source", "data d;\nd"}}.dump()).status == 400);
}

TEST_CASE("queries follow the oracle on the session graph") {
  service::Service svc;
  const auto created = svc.create_session(mavg_request("[18.17, 22.13, 37.14, 61.27]"));
  const json c = json::parse(created.body);
  const std::string id = c["id"];
  const std::uint32_t cell = input_address(c, "data[2]");

  // oracle over the graph served by the same session
  const json g = json::parse(svc.graph(id).body);
  oracle::Graph og;
  for (const auto& v : g["vertices"]) og.ids.push_back(v["id"].get<std::uint32_t>());
  for (const auto& e : g["edges"]) og.edges.emplace_back(e[0].get<std::uint32_t>(), e[1].get<std::uint32_t>());
  const oracle::Closure oc(og);

  const auto by = svc.query(id, json{{"op", "demandedBy"}, {"selection", {cell}}, {"restrict", "outputs"}}.dump());
  REQUIRE(by.status == 200);
  oracle::Ids outputs;
  for (const auto& e : c["outputs"]) outputs.insert(e["address"].get<std::uint32_t>());
  oracle::Ids expected;
  for (auto y : oc.image({cell})) {
    if (outputs.count(y)) expected.insert(y);
  }
  const auto got = selection(by);
  CHECK(oracle::Ids(got.begin(), got.end()) == expected);
  CHECK(got.size() == 2);
  const auto& points = c["view"]["charts"][0]["points"];
  CHECK(got == std::vector<std::uint32_t>{points[1]["address"], points[2]["address"]});

  const auto linked = svc.query(id, json{{"op", "linkedInputs"}, {"selection", {cell}}, {"restrict", "inputs"}}.dump());
  CHECK(selection(linked).size() == 4);

  const auto bad = svc.query(id, json{{"op", "demands"}, {"selection", {cell}}}.dump());
  CHECK(bad.status == 422);
  CHECK(svc.query("s999", json{{"op", "demands"}, {"selection", json::array()}}.dump()).status == 404);
  CHECK(svc.query(id, json{{"op", "nope"}, {"selection", json::array()}}.dump()).status == 400);
  CHECK(svc.query(id, json{{"op", "demandedBy"}, {"selection", {999999}}}.dump()).status == 422);

  // identical requests give identical bytes
  CHECK(svc.query(id, json{{"op", "demandedBy"}, {"selection", {cell}}, {"restrict", "outputs"}}.dump()).body ==
        by.body);
}

TEST_CASE("graph endpoint labels vertices") {
  service::Service svc;
  const json c = json::parse(svc.create_session(mavg_request("[18.17, 22.13, 37.14, 61.27]")).body);
  const auto r = svc.graph(c["id"].get<std::string>());
  REQUIRE(r.status == 200);
  const json g = json::parse(r.body);
  std::map<std::uint32_t, std::string> label;
  for (const auto& v : g["vertices"]) label[v["id"]] = v["label"];
  std::vector<std::string> into;
  for (const auto& e : g["edges"]) {
    if (label[e[1]] == "40.3") into.push_back(label[e[0]]);
  }
  CHECK(std::count(into.begin(), into.end(), "18.17") >= 1);
  CHECK(std::count(into.begin(), into.end(), "22.13") >= 1);
  bool closure = false;
  for (const auto& [_, l] : label) closure = closure || l == "<fun>";
  CHECK(closure);
  CHECK(svc.graph("missing").status == 404);
}

TEST_CASE("sessions are evicted least recently used first") {
  service::Service svc(2);
  auto id = [&](const service::Response& r) { return json::parse(r.body)["id"].get<std::string>(); };
  const std::string a = id(svc.create_session(json{{"source", "1"}}.dump()));
  const std::string b = id(svc.create_session(json{{"source", "2"}}.dump()));
  CHECK(svc.graph(a).status == 200);  // a is now the most recent
  const std::string c = id(svc.create_session(json{{"source", "3"}}.dump()));
  CHECK(svc.graph(a).status == 200);
  CHECK(svc.graph(b).status == 404);
  CHECK(svc.graph(c).status == 200);
  CHECK(svc.store().size() == 2);
}

TEST_CASE("HTTP round trip with CORS") {
  service::Service svc;
  httplib::Server server;
  svc.mount(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto created = client.Post("/sessions", mavg_request("[18.17, 22.13, 37.14, 61.27]"), "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  CHECK(created->get_header_value("Access-Control-Allow-Origin") == "*");
  const json c = json::parse(created->body);
  const std::string id = c["id"];

  auto q = client.Post("/sessions/" + id + "/query",
                       json{{"op", "linkedInputs"}, {"selection", {input_address(c, "data[2]")}}, {"restrict", "inputs"}}.dump(),
                       "application/json");
  REQUIRE(q);
  CHECK(q->status == 200);
  CHECK(json::parse(q->body)["selection"].size() == 4);

  auto g = client.Get("/sessions/" + id + "/graph");
  REQUIRE(g);
  CHECK(g->status == 200);
  auto missing = client.Get("/sessions/nope/graph");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  auto options = client.Options("/sessions");
  REQUIRE(options);
  CHECK(options->status == 204);

  server.stop();
  t.join();
}
