#include "cognate/parallel.hpp"

#include <omp.h>

#include <exception>

namespace cognate {

int parallel_threads() { return omp_get_max_threads(); }

Relation io_relation_parallel(const DepGraph& g) {
  g.topological_order();
  const VertexSet sources = g.sources();
  const VertexSet sinks = g.sinks();
  const auto roots = sources.to_vector();
  std::vector<VertexSet> rows(roots.size());

#pragma omp parallel
  {
    std::vector<Address> stack;
    VertexSet seen(g.capacity());
#pragma omp for schedule(dynamic, 16)
    for (std::size_t i = 0; i < roots.size(); ++i) {
      seen.clear();
      VertexSet row(g.capacity());
      stack.assign(1, roots[i]);
      seen.insert(roots[i]);
      while (!stack.empty()) {
        const Address a = stack.back();
        stack.pop_back();
        if (sinks.contains(a)) row.insert(a);
        for (Address s : g.successors(a)) {
          if (!seen.contains(s)) {
            seen.insert(s);
            stack.push_back(s);
          }
        }
      }
      rows[i] = std::move(row);
    }
  }

  Relation rel(sources, sinks);
  for (std::size_t i = 0; i < roots.size(); ++i) rows[i].for_each([&](Address b) { rel.add(roots[i], b); });
  return rel;
}

std::vector<VertexSet> batch_query(QueryOp op, const DepGraph& g, const std::vector<VertexSet>& selections) {
  std::vector<VertexSet> out(selections.size());
  std::vector<std::exception_ptr> errors(selections.size());
  const long n = static_cast<long>(selections.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = run_query(op, g, selections[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<VertexSet> batch_query_serial(QueryOp op, const DepGraph& g, const std::vector<VertexSet>& selections) {
  std::vector<VertexSet> out;
  out.reserve(selections.size());
  for (const auto& s : selections) out.push_back(run_query(op, g, s));
  return out;
}

std::vector<VertexSet> singletons(QueryOp op, const DepGraph& g) {
  const VertexSet u = input_universe(op) == Universe::Sources ? g.sources() : g.sinks();
  std::vector<VertexSet> out;
  u.for_each([&](Address a) { out.push_back(VertexSet{a}); });
  return out;
}

}  // namespace cognate
