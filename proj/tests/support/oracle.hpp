#pragma once

// Test-side oracle: reachability by Warshall's closure over an adjacency
// matrix, and the four relational operators straight from their set
// definitions. Shares nothing with the library's traversal code.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "cognate/graph.hpp"

namespace oracle {

using Ids = std::set<std::uint32_t>;

struct Graph {
  std::uint32_t n = 0;  // vertices are 0..n-1 after mapping through ids
  std::vector<std::uint32_t> ids;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // over ids
};

class Closure {
 public:
  explicit Closure(const Graph& g) : g_(g) {
    const std::size_t n = g.ids.size();
    reach_.assign(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) reach_[i][i] = true;
    for (const auto& [a, b] : g.edges) reach_[index(a)][index(b)] = true;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        if (reach_[i][k])
          for (std::size_t j = 0; j < n; ++j)
            if (reach_[k][j]) reach_[i][j] = true;
    for (std::size_t i = 0; i < n; ++i) {
      bool has_in = false, has_out = false;
      for (const auto& [a, b] : g.edges) {
        has_in = has_in || b == g.ids[i];
        has_out = has_out || a == g.ids[i];
      }
      if (!has_in) sources_.insert(g.ids[i]);
      if (!has_out) sinks_.insert(g.ids[i]);
    }
  }

  const Ids& sources() const { return sources_; }
  const Ids& sinks() const { return sinks_; }
  bool reaches(std::uint32_t a, std::uint32_t b) const { return reach_[index(a)][index(b)]; }
  bool related(std::uint32_t x, std::uint32_t y) const {
    return sources_.count(x) && sinks_.count(y) && reaches(x, y);
  }

  Ids image(const Ids& x) const {
    Ids out;
    for (auto y : sinks_)
      for (auto a : x)
        if (related(a, y)) out.insert(y);
    return out;
  }
  Ids preimage(const Ids& y) const {
    Ids out;
    for (auto x : sources_)
      for (auto b : y)
        if (related(x, b)) out.insert(x);
    return out;
  }
  // Sinks reached by no source outside x.
  Ids dual_image(const Ids& x) const {
    Ids out;
    for (auto y : sinks_) {
      bool excluded = false;
      for (auto a : sources_)
        if (!x.count(a) && related(a, y)) excluded = true;
      if (!excluded) out.insert(y);
    }
    return out;
  }
  // Sources reaching no sink outside y.
  Ids dual_preimage(const Ids& y) const {
    Ids out;
    for (auto x : sources_) {
      bool excluded = false;
      for (auto b : sinks_)
        if (!y.count(b) && related(x, b)) excluded = true;
      if (!excluded) out.insert(x);
    }
    return out;
  }

 private:
  std::size_t index(std::uint32_t id) const {
    return static_cast<std::size_t>(std::find(g_.ids.begin(), g_.ids.end(), id) - g_.ids.begin());
  }

  Graph g_;
  std::vector<std::vector<bool>> reach_;
  Ids sources_;
  Ids sinks_;
};

inline Ids ids_of(const cognate::VertexSet& s) {
  Ids out;
  s.for_each([&](cognate::Address a) { out.insert(a.id); });
  return out;
}

inline cognate::VertexSet set_of(const Ids& ids) {
  cognate::VertexSet s;
  for (auto id : ids) s.insert(cognate::Address{id});
  return s;
}

inline cognate::DepGraph to_dep_graph(const Graph& g) {
  cognate::VertexSet vs;
  for (auto id : g.ids) vs.insert(cognate::Address{id});
  std::vector<cognate::Edge> es;
  for (const auto& [a, b] : g.edges) es.push_back({cognate::Address{a}, cognate::Address{b}});
  return cognate::DepGraph::from_edges(vs, es);
}

// Random DAG: n in [2, 12], edge density in [0.1, 0.5], edges only from lower
// to higher rank, then ranks shuffled onto addresses.
inline Graph random_dag(std::mt19937& rng) {
  std::uniform_int_distribution<std::uint32_t> size(2, 12);
  std::uniform_real_distribution<double> density(0.1, 0.5);
  Graph g;
  g.n = size(rng);
  const double p = density(rng);
  std::vector<std::uint32_t> perm(g.n);
  for (std::uint32_t i = 0; i < g.n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::bernoulli_distribution coin(p);
  for (std::uint32_t i = 0; i < g.n; ++i)
    for (std::uint32_t j = i + 1; j < g.n; ++j)
      if (coin(rng)) g.edges.emplace_back(perm[i], perm[j]);
  for (std::uint32_t i = 0; i < g.n; ++i) g.ids.push_back(i);
  return g;
}

inline std::vector<Graph> corpus(std::size_t count = 1000, std::uint32_t seed = 20240611) {
  std::mt19937 rng(seed);
  std::vector<Graph> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_dag(rng));
  return out;
}

// Every subset when the universe has at most six members, singletons otherwise.
inline std::vector<Ids> selections(const Ids& universe) {
  std::vector<std::uint32_t> members(universe.begin(), universe.end());
  std::vector<Ids> out;
  if (members.size() <= 6) {
    for (std::size_t mask = 0; mask < (std::size_t{1} << members.size()); ++mask) {
      Ids s;
      for (std::size_t i = 0; i < members.size(); ++i)
        if ((mask >> i) & 1u) s.insert(members[i]);
      out.push_back(std::move(s));
    }
  } else {
    for (auto m : members) out.push_back(Ids{m});
  }
  return out;
}

// Vertices that are both source and sink.
inline bool has_isolated(const Closure& c) {
  for (auto s : c.sources())
    if (c.sinks().count(s)) return true;
  return false;
}

}  // namespace oracle
