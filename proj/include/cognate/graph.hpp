#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cognate {

// A vertex of a dependence graph. Addresses are dense so that adjacency and
// selections can be array-indexed.
struct Address {
  std::uint32_t id = 0;
  friend constexpr auto operator<=>(Address, Address) = default;
};

struct Edge {
  Address from;
  Address to;
  friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

enum class GraphErrorKind { DegenerateStar, NotDisjoint, MissingEdge, MissingVertex, Cycle, Format };

class GraphError : public std::runtime_error {
 public:
  GraphError(GraphErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  GraphErrorKind kind() const noexcept { return kind_; }

 private:
  GraphErrorKind kind_;
};

// Dense bitset over addresses. Grows on insert; equality ignores capacity.
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(std::size_t capacity);
  VertexSet(std::initializer_list<Address> members);

  static VertexSet full(std::size_t capacity);

  std::size_t capacity() const noexcept { return capacity_; }
  void grow(std::size_t capacity);

  bool contains(Address a) const noexcept {
    return a.id < capacity_ && ((words_[a.id >> 6] >> (a.id & 63)) & 1u) != 0;
  }
  void insert(Address a);
  void erase(Address a) noexcept;
  void clear() noexcept;

  std::size_t size() const noexcept;
  bool empty() const noexcept;
  bool is_subset_of(const VertexSet& other) const noexcept;
  bool intersects(const VertexSet& other) const noexcept;

  VertexSet& operator|=(const VertexSet& other);
  VertexSet& operator&=(const VertexSet& other);
  VertexSet& operator-=(const VertexSet& other);
  friend VertexSet operator|(VertexSet a, const VertexSet& b) { return a |= b; }
  friend VertexSet operator&(VertexSet a, const VertexSet& b) { return a &= b; }
  friend VertexSet operator-(VertexSet a, const VertexSet& b) { return a -= b; }
  friend bool operator==(const VertexSet& a, const VertexSet& b) noexcept;

  std::vector<Address> to_vector() const;

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        const int bit = __builtin_ctzll(bits);
        f(Address{static_cast<std::uint32_t>(w * 64 + bit)});
        bits &= bits - 1;
      }
    }
  }

 private:
  std::vector<std::uint64_t> words_;
  std::size_t capacity_ = 0;
};

std::string to_string(const VertexSet& s);

// Which Boolean algebra a selection lives in.
enum class Universe { Sources, Sinks, AllVertices };

struct Selection {
  VertexSet members;
  Universe universe = Universe::AllVertices;
};

class UniverseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A relation between two declared universes, stored as one image row per left element.
class Relation {
 public:
  Relation() = default;
  Relation(VertexSet left, VertexSet right);

  const VertexSet& left() const noexcept { return left_; }
  const VertexSet& right() const noexcept { return right_; }

  void add(Address x, Address y);
  bool contains(Address x, Address y) const noexcept;
  // Image of the singleton {x}; empty for x outside the left universe.
  const VertexSet& row(Address x) const noexcept;
  std::size_t size() const noexcept;
  std::vector<std::pair<Address, Address>> pairs() const;
  Relation converse() const;

  friend bool operator==(const Relation& a, const Relation& b) noexcept;

 private:
  VertexSet left_;
  VertexSet right_;
  std::vector<VertexSet> rows_;
  VertexSet empty_;
};

// Immutable DAG with eager forward and backward adjacency. Copies share storage;
// opposite() is a constant-time view that swaps the two directions.
class DepGraph {
 public:
  DepGraph();

  static DepGraph in_star(const VertexSet& deps, Address target);
  static DepGraph from_edges(const VertexSet& vertices, std::span<const Edge> edges);

  std::size_t capacity() const noexcept;
  const VertexSet& vertices() const noexcept { return storage_->vertices; }
  std::size_t vertex_count() const noexcept { return storage_->vertex_count; }
  std::size_t edge_count() const noexcept { return storage_->edge_count; }
  bool has_vertex(Address a) const noexcept { return storage_->vertices.contains(a); }
  bool has_edge(Edge e) const noexcept;

  std::span<const Address> successors(Address a) const noexcept;
  std::span<const Address> predecessors(Address a) const noexcept;
  std::vector<Edge> out_edges(Address a) const;
  std::vector<Edge> in_edges(Address a) const;
  std::vector<Edge> edges() const;

  VertexSet sources() const;
  VertexSet sinks() const;

  DepGraph opposite() const;
  DepGraph remove_edges(std::span<const Edge> edges) const;

  // Throws GraphError{Cycle} if the graph is not acyclic.
  std::vector<Address> topological_order() const;
  bool is_acyclic() const;
  bool transpose_consistent() const;

  friend DepGraph graph_union(const DepGraph& a, const DepGraph& b);
  friend DepGraph disjoint_union(const DepGraph& a, const DepGraph& b);
  friend bool operator==(const DepGraph& a, const DepGraph& b);

 private:
  friend class GraphBuilder;
  struct Storage {
    VertexSet vertices;
    std::vector<std::vector<Address>> forward;
    std::vector<std::vector<Address>> backward;
    std::size_t vertex_count = 0;
    std::size_t edge_count = 0;
  };
  explicit DepGraph(std::shared_ptr<const Storage> storage, bool flipped = false)
      : storage_(std::move(storage)), flipped_(flipped) {}

  const std::vector<std::vector<Address>>& out_lists() const noexcept {
    return flipped_ ? storage_->backward : storage_->forward;
  }
  const std::vector<std::vector<Address>>& in_lists() const noexcept {
    return flipped_ ? storage_->forward : storage_->backward;
  }

  std::shared_ptr<const Storage> storage_;
  bool flipped_ = false;
};

// Single-threaded incremental construction used by the evaluator.
class GraphBuilder {
 public:
  GraphBuilder() = default;
  explicit GraphBuilder(const DepGraph& start);

  void add_vertex(Address a);
  // Adds in_star(deps, target); target must not already be a vertex.
  void add_in_star(std::span<const Address> deps, Address target);
  void add_edge(Address from, Address to);

  bool has_vertex(Address a) const noexcept { return vertices_.contains(a); }
  std::size_t vertex_count() const noexcept { return vertex_count_; }
  std::size_t edge_count() const noexcept { return edge_count_; }

  DepGraph snapshot() const;
  DepGraph freeze() &&;

 private:
  void ensure(Address a);

  VertexSet vertices_;
  std::vector<std::vector<Address>> forward_;
  std::vector<std::vector<Address>> backward_;
  std::size_t vertex_count_ = 0;
  std::size_t edge_count_ = 0;
};

// Monotone per-session address counter.
class AddressAllocator {
 public:
  explicit AddressAllocator(std::uint32_t start = 0) : next_(start) {}
  Address fresh() noexcept { return Address{next_++}; }
  std::uint32_t peek() const noexcept { return next_; }

 private:
  std::uint32_t next_;
};

// Reflexive-transitive closure over all vertices. Oracle use only.
Relation reachability(const DepGraph& g);
// reachability restricted to sources x sinks.
Relation io_relation(const DepGraph& g);

// Line-oriented edge list with a vertex header; lossless round trip.
std::string to_edge_list(const DepGraph& g);
DepGraph parse_edge_list(std::string_view text);

using VertexLabeler = std::function<std::string(Address)>;
std::string to_dot(const DepGraph& g, const VertexLabeler& label = {});

}  // namespace cognate
