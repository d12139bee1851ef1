#pragma once

#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "cognate/graph.hpp"

namespace cognate {

enum class QueryOp { Demands, DemandedBy, Suffices, DualPreimage, LinkedInputs, LinkedOutputs };

std::string_view to_string(QueryOp op);
std::optional<QueryOp> parse_query_op(std::string_view name);
// Sources for demandedBy/suffices/linkedInputs, sinks otherwise.
Universe input_universe(QueryOp op);
Universe output_universe(QueryOp op);

// Relational definitions. Arguments must lie inside the relation's universes.
VertexSet image(const Relation& r, const VertexSet& x);
VertexSet preimage(const Relation& r, const VertexSet& y);
VertexSet dual_image(const Relation& r, const VertexSet& x);
VertexSet dual_preimage(const Relation& r, const VertexSet& y);

// A total function between two powerset algebras.
struct SelectionFn {
  VertexSet domain;
  VertexSet codomain;
  std::function<VertexSet(const VertexSet&)> fn;

  VertexSet operator()(const VertexSet& x) const { return fn(x); }
};

// not . f . not, complements taken in f's domain and codomain.
SelectionFn de_morgan_dual(SelectionFn f);

// Graph algorithms. X must be a subset of sources(G); Y of sinks(G).
VertexSet demanded_by(const DepGraph& g, const VertexSet& x);
VertexSet suffices(const DepGraph& g, const VertexSet& x);
VertexSet demands(const DepGraph& g, const VertexSet& y);
VertexSet only_needed_for(const DepGraph& g, const VertexSet& y);
VertexSet linked_inputs(const DepGraph& g, const VertexSet& x);
VertexSet linked_outputs(const DepGraph& g, const VertexSet& y);

// Cognacy relative to a chosen set of observable outputs rather than all sinks.
VertexSet linked_inputs_via(const DepGraph& g, const VertexSet& x, const VertexSet& outputs);

struct Slice {
  VertexSet vertices;
  std::vector<Edge> edges;
};

// demanded_by together with the slice H it builds.
std::pair<VertexSet, Slice> demanded_by_verbose(const DepGraph& g, const VertexSet& x);

// State of suffices after each step: H, the pending graph P, and what remains of G.
struct PartialSlice {
  VertexSet h_vertices;
  std::vector<Edge> h_edges;
  std::vector<Edge> p_edges;
  std::vector<Edge> g_edges;
};

using SliceObserver = std::function<void(const PartialSlice&)>;

// Like suffices, but reports the partial slice after the initial state and
// after every pending/extend step.
VertexSet suffices_traced(const DepGraph& g, const VertexSet& x, const SliceObserver& observe);
std::pair<VertexSet, Slice> suffices_verbose(const DepGraph& g, const VertexSet& x);

// Returns a description of the first violated condition, if any.
std::optional<std::string> check_partial_slice(const DepGraph& g0, const VertexSet& x, const PartialSlice& s);

// The De Morgan dual formulations of the four operators.
namespace alt {
VertexSet demanded_by(const DepGraph& g, const VertexSet& x);
VertexSet demands(const DepGraph& g, const VertexSet& y);
VertexSet suffices(const DepGraph& g, const VertexSet& x);
VertexSet only_needed_for(const DepGraph& g, const VertexSet& y);
}  // namespace alt

// Checks the universe and dispatches to the graph algorithm.
VertexSet run_query(QueryOp op, const DepGraph& g, const VertexSet& s);
// Same answers computed from io_relation and the relational definitions.
VertexSet oracle_query(QueryOp op, const DepGraph& g, const VertexSet& s);

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kExhaustiveBudget = std::size_t{1} << 12;

// f(X) & Y empty <=> X & g(Y) empty, over all X in f's domain and Y in g's domain.
bool check_conjugate(const SelectionFn& f, const SelectionFn& g, std::size_t budget = kExhaustiveBudget);
bool check_conjugate_sampled(const SelectionFn& f, const SelectionFn& g, std::mt19937_64& rng, std::size_t samples);

enum class Ordering { Monotone, Antitone };

// Monotone: f(X) <= Y <=> X <= g(Y). Antitone: Y <= f(X) <=> X <= g(Y).
bool check_galois(const SelectionFn& f, const SelectionFn& g, Ordering ordering = Ordering::Monotone,
                  std::size_t budget = kExhaustiveBudget);

// Every subset of a universe, in binary counting order over its members.
bool check_galois_sampled(const SelectionFn& f, const SelectionFn& g, std::mt19937_64& rng, std::size_t samples,
                          Ordering ordering = Ordering::Monotone);

std::vector<VertexSet> subsets(const VertexSet& universe);

// SelectionFns for the graph operators, with the right universes attached.
SelectionFn as_selection_fn(QueryOp op, const DepGraph& g);
SelectionFn relation_image(const Relation& r);
SelectionFn relation_preimage(const Relation& r);

}  // namespace cognate
