#include <algorithm>
#include <deque>
#include <string>

#include "cognate/query.hpp"

namespace cognate {

namespace {

void require_sources(const DepGraph& g, const VertexSet& x, const char* op) {
  const VertexSet src = g.sources();
  if (!x.is_subset_of(src)) {
    throw UniverseError(std::string(op) + ": " + to_string(x - src) + " are not sources of the graph");
  }
}

// Frontier walk: every out-edge of a vertex in H joins H at once.
VertexSet demanded_by_walk(const DepGraph& g, const VertexSet& x, Slice* slice) {
  VertexSet h(g.capacity());
  std::deque<Address> frontier;
  x.for_each([&](Address a) {
    h.insert(a);
    frontier.push_back(a);
  });
  VertexSet result(g.capacity());
  while (!frontier.empty()) {
    const Address a = frontier.front();
    frontier.pop_front();
    const auto succ = g.successors(a);
    if (succ.empty()) result.insert(a);
    for (Address s : succ) {
      if (slice != nullptr) slice->edges.push_back({a, s});
      if (!h.contains(s)) {
        h.insert(s);
        frontier.push_back(s);
      }
    }
  }
  if (slice != nullptr) slice->vertices = h;
  return result;
}

// In-degree countdown: a vertex joins H once all of its in-edges are pending.
VertexSet suffices_walk(const DepGraph& g, const VertexSet& x, Slice* slice) {
  std::vector<std::uint32_t> remaining(g.capacity(), 0);
  g.vertices().for_each([&](Address a) { remaining[a.id] = static_cast<std::uint32_t>(g.predecessors(a).size()); });
  VertexSet h(g.capacity());
  std::deque<Address> ready;
  x.for_each([&](Address a) {
    h.insert(a);
    ready.push_back(a);
  });
  VertexSet result(g.capacity());
  while (!ready.empty()) {
    const Address a = ready.front();
    ready.pop_front();
    const auto succ = g.successors(a);
    if (succ.empty()) result.insert(a);
    for (Address s : succ) {
      if (--remaining[s.id] == 0) {
        h.insert(s);
        ready.push_back(s);
        if (slice != nullptr) {
          for (Address p : g.predecessors(s)) slice->edges.push_back({p, s});
        }
      }
    }
  }
  if (slice != nullptr) slice->vertices = h;
  return result;
}

}  // namespace

VertexSet demanded_by(const DepGraph& g, const VertexSet& x) {
  require_sources(g, x, "demandedBy");
  return demanded_by_walk(g, x, nullptr);
}

std::pair<VertexSet, Slice> demanded_by_verbose(const DepGraph& g, const VertexSet& x) {
  require_sources(g, x, "demandedBy");
  Slice slice;
  VertexSet r = demanded_by_walk(g, x, &slice);
  std::sort(slice.edges.begin(), slice.edges.end());
  return {std::move(r), std::move(slice)};
}

VertexSet suffices(const DepGraph& g, const VertexSet& x) {
  require_sources(g, x, "suffices");
  return suffices_walk(g, x, nullptr);
}

std::pair<VertexSet, Slice> suffices_verbose(const DepGraph& g, const VertexSet& x) {
  require_sources(g, x, "suffices");
  Slice slice;
  VertexSet r = suffices_walk(g, x, &slice);
  std::sort(slice.edges.begin(), slice.edges.end());
  return {std::move(r), std::move(slice)};
}

VertexSet demands(const DepGraph& g, const VertexSet& y) { return demanded_by(g.opposite(), y); }

VertexSet only_needed_for(const DepGraph& g, const VertexSet& y) { return suffices(g.opposite(), y); }

VertexSet linked_inputs(const DepGraph& g, const VertexSet& x) { return demands(g, demanded_by(g, x)); }

VertexSet linked_outputs(const DepGraph& g, const VertexSet& y) { return demanded_by(g, demands(g, y)); }

VertexSet linked_inputs_via(const DepGraph& g, const VertexSet& x, const VertexSet& outputs) {
  return demands(g, demanded_by(g, x) & outputs);
}

namespace alt {

VertexSet demanded_by(const DepGraph& g, const VertexSet& x) {
  require_sources(g, x, "demandedBy");
  return g.sinks() - cognate::suffices(g, g.sources() - x);
}

VertexSet demands(const DepGraph& g, const VertexSet& y) {
  const DepGraph op = g.opposite();
  require_sources(op, y, "demands");
  return g.sources() - cognate::suffices(op, g.sinks() - y);
}

VertexSet suffices(const DepGraph& g, const VertexSet& x) {
  require_sources(g, x, "suffices");
  return g.sinks() - cognate::demanded_by(g, g.sources() - x);
}

VertexSet only_needed_for(const DepGraph& g, const VertexSet& y) {
  const DepGraph op = g.opposite();
  require_sources(op, y, "dualPreimage");
  return g.sources() - cognate::demanded_by(op, g.sinks() - y);
}

}  // namespace alt

// ---------------------------------------------------------------------------
// Traced suffices and the partial-slice check

namespace {

enum class Place : std::uint8_t { Remaining, Pending, Slice };

struct Tracer {
  const DepGraph& g;
  std::vector<Edge> all;
  std::vector<Place> place;
  VertexSet h;

  std::size_t index(Edge e) const {
    return static_cast<std::size_t>(std::lower_bound(all.begin(), all.end(), e) - all.begin());
  }

  PartialSlice state() const {
    PartialSlice s;
    s.h_vertices = h;
    for (std::size_t i = 0; i < all.size(); ++i) {
      switch (place[i]) {
        case Place::Remaining: s.g_edges.push_back(all[i]); break;
        case Place::Pending: s.p_edges.push_back(all[i]); break;
        case Place::Slice: s.h_edges.push_back(all[i]); break;
      }
    }
    return s;
  }
};

}  // namespace

VertexSet suffices_traced(const DepGraph& g, const VertexSet& x, const SliceObserver& observe) {
  require_sources(g, x, "suffices");
  Tracer t{g, g.edges(), {}, VertexSet(g.capacity())};
  t.place.assign(t.all.size(), Place::Remaining);

  std::vector<std::uint32_t> remaining(g.capacity(), 0);
  g.vertices().for_each([&](Address a) { remaining[a.id] = static_cast<std::uint32_t>(g.predecessors(a).size()); });
  std::deque<Address> ready;
  x.for_each([&](Address a) {
    t.h.insert(a);
    ready.push_back(a);
  });
  if (observe) observe(t.state());

  VertexSet result(g.capacity());
  while (!ready.empty()) {
    const Address a = ready.front();
    ready.pop_front();
    const auto succ = g.successors(a);
    if (succ.empty()) {
      result.insert(a);
      continue;
    }
    // pending: all out-edges of a leave G for P together.
    std::vector<Address> extended;
    for (Address s : succ) {
      t.place[t.index({a, s})] = Place::Pending;
      if (--remaining[s.id] == 0) extended.push_back(s);
    }
    if (observe) observe(t.state());
    // extend: a vertex whose in-edges are all pending moves into H with them.
    for (Address s : extended) {
      for (Address p : g.predecessors(s)) t.place[t.index({p, s})] = Place::Slice;
      t.h.insert(s);
      ready.push_back(s);
      if (observe) observe(t.state());
    }
  }
  return result;
}

std::optional<std::string> check_partial_slice(const DepGraph& g0, const VertexSet& x, const PartialSlice& s) {
  std::vector<Edge> all;
  all.insert(all.end(), s.h_edges.begin(), s.h_edges.end());
  all.insert(all.end(), s.p_edges.begin(), s.p_edges.end());
  all.insert(all.end(), s.g_edges.begin(), s.g_edges.end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) return "H, P and G are not edge-disjoint";
  if (all != g0.edges()) return "H, P and G do not partition the edges of the graph";
  if (!s.h_vertices.is_subset_of(g0.vertices())) return "H has vertices outside the graph";
  if (!x.is_subset_of(s.h_vertices)) return "H does not contain the selected sources";
  for (const auto& list : {s.g_edges, s.p_edges}) {
    for (const Edge& e : list) {
      if (s.h_vertices.contains(e.to)) {
        return "edge (" + std::to_string(e.from.id) + ", " + std::to_string(e.to.id) + ") outside H enters H";
      }
    }
  }
  for (const Edge& e : s.h_edges) {
    if (!s.h_vertices.contains(e.from)) return "H has an edge from a vertex outside H";
  }
  for (const Edge& e : s.p_edges) {
    if (!s.h_vertices.contains(e.from)) return "P has an edge that does not leave H";
  }
  // No source outside X may reach H.
  VertexSet seen(g0.capacity());
  std::vector<Address> stack = s.h_vertices.to_vector();
  for (Address a : stack) seen.insert(a);
  while (!stack.empty()) {
    const Address a = stack.back();
    stack.pop_back();
    if (g0.predecessors(a).empty() && !x.contains(a)) {
      return "source " + std::to_string(a.id) + " outside the selection reaches H";
    }
    for (Address p : g0.predecessors(a)) {
      if (!seen.contains(p)) {
        seen.insert(p);
        stack.push_back(p);
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

namespace {

const VertexSet& universe_of(Universe u, const VertexSet& sources, const VertexSet& sinks) {
  return u == Universe::Sources ? sources : sinks;
}

}  // namespace

VertexSet run_query(QueryOp op, const DepGraph& g, const VertexSet& s) {
  switch (op) {
    case QueryOp::Demands: return demands(g, s);
    case QueryOp::DemandedBy: return demanded_by(g, s);
    case QueryOp::Suffices: return suffices(g, s);
    case QueryOp::DualPreimage: return only_needed_for(g, s);
    case QueryOp::LinkedInputs: return linked_inputs(g, s);
    case QueryOp::LinkedOutputs: return linked_outputs(g, s);
  }
  return {};
}

VertexSet oracle_query(QueryOp op, const DepGraph& g, const VertexSet& s) {
  const Relation r = io_relation(g);
  switch (op) {
    case QueryOp::Demands: return preimage(r, s);
    case QueryOp::DemandedBy: return image(r, s);
    case QueryOp::Suffices: return dual_image(r, s);
    case QueryOp::DualPreimage: return dual_preimage(r, s);
    case QueryOp::LinkedInputs: return preimage(r, image(r, s));
    case QueryOp::LinkedOutputs: return image(r, preimage(r, s));
  }
  return {};
}

SelectionFn as_selection_fn(QueryOp op, const DepGraph& g) {
  const VertexSet sources = g.sources();
  const VertexSet sinks = g.sinks();
  return SelectionFn{universe_of(input_universe(op), sources, sinks), universe_of(output_universe(op), sources, sinks),
                     [op, g](const VertexSet& s) { return run_query(op, g, s); }};
}

}  // namespace cognate
