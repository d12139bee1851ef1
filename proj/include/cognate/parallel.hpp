#pragma once

#include <vector>

#include "cognate/graph.hpp"
#include "cognate/query.hpp"

namespace cognate {

// OpenMP kernels. Each has a serial counterpart with identical results that
// the tests and the kernel benchmark compare against.

// One reachability walk per source, distributed over threads.
Relation io_relation_parallel(const DepGraph& g);

// Answers op for each selection independently.
std::vector<VertexSet> batch_query(QueryOp op, const DepGraph& g, const std::vector<VertexSet>& selections);
std::vector<VertexSet> batch_query_serial(QueryOp op, const DepGraph& g, const std::vector<VertexSet>& selections);

// Singleton selections over the op's input universe, in address order.
std::vector<VertexSet> singletons(QueryOp op, const DepGraph& g);

int parallel_threads();

}  // namespace cognate
