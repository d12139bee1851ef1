#include <algorithm>
#include <deque>

#include "cognate/graph.hpp"

namespace cognate {

namespace {

void sort_lists(std::vector<std::vector<Address>>& lists) {
  for (auto& l : lists) {
    if (!std::is_sorted(l.begin(), l.end())) std::sort(l.begin(), l.end());
  }
}

std::string describe(Edge e) {
  return "(" + std::to_string(e.from.id) + ", " + std::to_string(e.to.id) + ")";
}

}  // namespace

DepGraph::DepGraph() : storage_(std::make_shared<Storage>()) {}

DepGraph DepGraph::in_star(const VertexSet& deps, Address target) {
  if (deps.contains(target)) {
    throw GraphError(GraphErrorKind::DegenerateStar,
                     "in-star target " + std::to_string(target.id) + " is one of its own dependencies");
  }
  GraphBuilder b;
  deps.for_each([&](Address a) { b.add_vertex(a); });
  const auto list = deps.to_vector();
  b.add_in_star(list, target);
  return std::move(b).freeze();
}

DepGraph DepGraph::from_edges(const VertexSet& vertices, std::span<const Edge> edges) {
  GraphBuilder b;
  vertices.for_each([&](Address a) { b.add_vertex(a); });
  for (const Edge& e : edges) {
    if (!vertices.contains(e.from) || !vertices.contains(e.to)) {
      throw GraphError(GraphErrorKind::MissingVertex, "edge " + describe(e) + " has an endpoint outside the vertex set");
    }
    b.add_edge(e.from, e.to);
  }
  return std::move(b).freeze();
}

std::size_t DepGraph::capacity() const noexcept { return storage_->forward.size(); }

bool DepGraph::has_edge(Edge e) const noexcept {
  const auto succ = successors(e.from);
  return std::binary_search(succ.begin(), succ.end(), e.to);
}

std::span<const Address> DepGraph::successors(Address a) const noexcept {
  const auto& lists = out_lists();
  if (a.id >= lists.size()) return {};
  return lists[a.id];
}

std::span<const Address> DepGraph::predecessors(Address a) const noexcept {
  const auto& lists = in_lists();
  if (a.id >= lists.size()) return {};
  return lists[a.id];
}

std::vector<Edge> DepGraph::out_edges(Address a) const {
  std::vector<Edge> out;
  for (Address s : successors(a)) out.push_back({a, s});
  return out;
}

std::vector<Edge> DepGraph::in_edges(Address a) const {
  std::vector<Edge> out;
  for (Address p : predecessors(a)) out.push_back({p, a});
  return out;
}

std::vector<Edge> DepGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  vertices().for_each([&](Address a) {
    for (Address s : successors(a)) out.push_back({a, s});
  });
  return out;
}

VertexSet DepGraph::sources() const {
  VertexSet out(capacity());
  vertices().for_each([&](Address a) {
    if (predecessors(a).empty()) out.insert(a);
  });
  return out;
}

VertexSet DepGraph::sinks() const {
  VertexSet out(capacity());
  vertices().for_each([&](Address a) {
    if (successors(a).empty()) out.insert(a);
  });
  return out;
}

DepGraph DepGraph::opposite() const { return DepGraph(storage_, !flipped_); }

DepGraph DepGraph::remove_edges(std::span<const Edge> removed) const {
  auto next = std::make_shared<Storage>();
  next->vertices = vertices();
  next->forward = out_lists();
  next->backward = in_lists();
  next->vertex_count = vertex_count();
  next->edge_count = edge_count();
  for (const Edge& e : removed) {
    if (e.from.id >= next->forward.size()) {
      throw GraphError(GraphErrorKind::MissingEdge, "cannot remove non-edge " + describe(e));
    }
    auto& out = next->forward[e.from.id];
    const auto it = std::lower_bound(out.begin(), out.end(), e.to);
    if (it == out.end() || *it != e.to) {
      throw GraphError(GraphErrorKind::MissingEdge, "cannot remove non-edge " + describe(e));
    }
    out.erase(it);
    auto& bwd = next->backward[e.to.id];
    bwd.erase(std::lower_bound(bwd.begin(), bwd.end(), e.from));
    --next->edge_count;
  }
  return DepGraph(std::move(next));
}

std::vector<Address> DepGraph::topological_order() const {
  std::vector<std::size_t> indegree(capacity(), 0);
  std::deque<Address> ready;
  vertices().for_each([&](Address a) {
    indegree[a.id] = predecessors(a).size();
    if (indegree[a.id] == 0) ready.push_back(a);
  });
  std::vector<Address> order;
  order.reserve(vertex_count());
  while (!ready.empty()) {
    const Address a = ready.front();
    ready.pop_front();
    order.push_back(a);
    for (Address s : successors(a)) {
      if (--indegree[s.id] == 0) ready.push_back(s);
    }
  }
  if (order.size() != vertex_count()) throw GraphError(GraphErrorKind::Cycle, "dependence graph contains a cycle");
  return order;
}

bool DepGraph::is_acyclic() const {
  try {
    topological_order();
    return true;
  } catch (const GraphError&) {
    return false;
  }
}

bool DepGraph::transpose_consistent() const {
  std::size_t forward_total = 0;
  std::size_t backward_total = 0;
  bool ok = true;
  vertices().for_each([&](Address a) {
    for (Address s : successors(a)) {
      ++forward_total;
      const auto pred = predecessors(s);
      ok = ok && has_vertex(s) && std::binary_search(pred.begin(), pred.end(), a);
    }
    backward_total += predecessors(a).size();
  });
  return ok && forward_total == backward_total && forward_total == edge_count();
}

DepGraph graph_union(const DepGraph& a, const DepGraph& b) {
  GraphBuilder builder(a);
  b.vertices().for_each([&](Address v) { builder.add_vertex(v); });
  for (const Edge& e : b.edges()) builder.add_edge(e.from, e.to);
  return std::move(builder).freeze();
}

DepGraph disjoint_union(const DepGraph& a, const DepGraph& b) {
  for (const Edge& e : b.edges()) {
    if (a.has_edge(e)) throw GraphError(GraphErrorKind::NotDisjoint, "edge " + describe(e) + " occurs in both graphs");
  }
  return graph_union(a, b);
}

bool operator==(const DepGraph& a, const DepGraph& b) {
  return a.vertices() == b.vertices() && a.edges() == b.edges();
}

GraphBuilder::GraphBuilder(const DepGraph& start) {
  start.vertices().for_each([&](Address a) { add_vertex(a); });
  for (const Edge& e : start.edges()) add_edge(e.from, e.to);
}

void GraphBuilder::ensure(Address a) {
  if (a.id >= forward_.size()) {
    const std::size_t n = std::max<std::size_t>(a.id + 1, forward_.size() * 2);
    forward_.resize(n);
    backward_.resize(n);
    vertices_.grow(n);
  }
}

void GraphBuilder::add_vertex(Address a) {
  ensure(a);
  if (!vertices_.contains(a)) {
    vertices_.insert(a);
    ++vertex_count_;
  }
}

void GraphBuilder::add_in_star(std::span<const Address> deps, Address target) {
  if (has_vertex(target)) {
    throw GraphError(GraphErrorKind::DegenerateStar, "address " + std::to_string(target.id) + " is not fresh");
  }
  for (Address d : deps) {
    if (!has_vertex(d)) {
      throw GraphError(GraphErrorKind::MissingVertex, "dependency " + std::to_string(d.id) + " is not a vertex");
    }
  }
  add_vertex(target);
  auto& in = backward_[target.id];
  in.assign(deps.begin(), deps.end());
  std::sort(in.begin(), in.end());
  in.erase(std::unique(in.begin(), in.end()), in.end());
  for (Address d : in) forward_[d.id].push_back(target);
  edge_count_ += in.size();
}

void GraphBuilder::add_edge(Address from, Address to) {
  if (!has_vertex(from) || !has_vertex(to)) {
    throw GraphError(GraphErrorKind::MissingVertex,
                     "edge (" + std::to_string(from.id) + ", " + std::to_string(to.id) + ") has a missing endpoint");
  }
  auto& in = backward_[to.id];
  if (std::find(in.begin(), in.end(), from) != in.end()) return;
  in.push_back(from);
  forward_[from.id].push_back(to);
  ++edge_count_;
}

DepGraph GraphBuilder::snapshot() const {
  GraphBuilder copy = *this;
  return std::move(copy).freeze();
}

DepGraph GraphBuilder::freeze() && {
  auto storage = std::make_shared<DepGraph::Storage>();
  const std::size_t n = forward_.size();
  vertices_.grow(n);
  sort_lists(forward_);
  sort_lists(backward_);
  storage->vertices = std::move(vertices_);
  storage->forward = std::move(forward_);
  storage->backward = std::move(backward_);
  storage->vertex_count = vertex_count_;
  storage->edge_count = edge_count_;
  return DepGraph(std::move(storage));
}

Relation reachability(const DepGraph& g) {
  const auto order = g.topological_order();
  std::vector<VertexSet> reach(g.capacity());
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    VertexSet r(g.capacity());
    r.insert(*it);
    for (Address s : g.successors(*it)) r |= reach[s.id];
    reach[it->id] = std::move(r);
  }
  Relation rel(g.vertices(), g.vertices());
  for (Address a : order) reach[a.id].for_each([&](Address b) { rel.add(a, b); });
  return rel;
}

Relation io_relation(const DepGraph& g) {
  g.topological_order();
  const VertexSet sources = g.sources();
  const VertexSet sinks = g.sinks();
  Relation rel(sources, sinks);
  std::vector<Address> stack;
  sources.for_each([&](Address src) {
    VertexSet seen(g.capacity());
    stack.assign(1, src);
    seen.insert(src);
    while (!stack.empty()) {
      const Address a = stack.back();
      stack.pop_back();
      if (sinks.contains(a)) rel.add(src, a);
      for (Address s : g.successors(a)) {
        if (!seen.contains(s)) {
          seen.insert(s);
          stack.push_back(s);
        }
      }
    }
  });
  return rel;
}

}  // namespace cognate
