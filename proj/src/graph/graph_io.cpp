#include <sstream>

#include "cognate/graph.hpp"

namespace cognate {

namespace {
constexpr std::string_view kEdgeListMagic = "cognate-graph";
constexpr int kEdgeListVersion = 1;

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

[[noreturn]] void format_error(const std::string& what) {
  throw GraphError(GraphErrorKind::Format, "edge list: " + what);
}
}  // namespace

std::string to_edge_list(const DepGraph& g) {
  std::ostringstream os;
  os << kEdgeListMagic << ' ' << kEdgeListVersion << '\n';
  os << "vertices " << g.vertex_count() << '\n';
  bool first = true;
  g.vertices().for_each([&](Address a) {
    if (!first) os << ' ';
    first = false;
    os << a.id;
  });
  os << '\n';
  os << "edges " << g.edge_count() << '\n';
  for (const Edge& e : g.edges()) os << e.from.id << ' ' << e.to.id << '\n';
  return os.str();
}

DepGraph parse_edge_list(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string word;
  int version = 0;
  if (!(is >> word) || word != kEdgeListMagic || !(is >> version)) format_error("missing header");
  if (version != kEdgeListVersion) format_error("unsupported version " + std::to_string(version));

  std::size_t count = 0;
  if (!(is >> word) || word != "vertices" || !(is >> count)) format_error("missing vertex count");
  VertexSet vertices;
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t id = 0;
    if (!(is >> id)) format_error("truncated vertex list");
    vertices.insert(Address{id});
  }
  if (vertices.size() != count) format_error("duplicate vertex ids");

  if (!(is >> word) || word != "edges" || !(is >> count)) format_error("missing edge count");
  std::vector<Edge> edges;
  edges.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    if (!(is >> from >> to)) format_error("truncated edge list");
    edges.push_back({Address{from}, Address{to}});
  }
  if (is >> word) format_error("trailing content '" + word + "'");
  return DepGraph::from_edges(vertices, edges);
}

std::string to_dot(const DepGraph& g, const VertexLabeler& label) {
  std::ostringstream os;
  os << "digraph dependence {\n  rankdir=BT;\n";
  g.vertices().for_each([&](Address a) {
    os << "  n" << a.id;
    if (label) os << " [label=\"" << dot_escape(label(a)) << "\"]";
    os << ";\n";
  });
  for (const Edge& e : g.edges()) os << "  n" << e.from.id << " -> n" << e.to.id << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace cognate
