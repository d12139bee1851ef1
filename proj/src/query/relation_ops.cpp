#include <string>

#include "cognate/query.hpp"

namespace cognate {

namespace {

void require_within(const VertexSet& s, const VertexSet& universe, const char* what) {
  if (!s.is_subset_of(universe)) {
    throw UniverseError(std::string(what) + ": selection " + to_string(s - universe) + " lies outside its universe");
  }
}

}  // namespace

std::string_view to_string(QueryOp op) {
  switch (op) {
    case QueryOp::Demands: return "demands";
    case QueryOp::DemandedBy: return "demandedBy";
    case QueryOp::Suffices: return "suffices";
    case QueryOp::DualPreimage: return "dualPreimage";
    case QueryOp::LinkedInputs: return "linkedInputs";
    case QueryOp::LinkedOutputs: return "linkedOutputs";
  }
  return "?";
}

std::optional<QueryOp> parse_query_op(std::string_view name) {
  for (QueryOp op : {QueryOp::Demands, QueryOp::DemandedBy, QueryOp::Suffices, QueryOp::DualPreimage,
                     QueryOp::LinkedInputs, QueryOp::LinkedOutputs}) {
    if (to_string(op) == name) return op;
  }
  if (name == "onlyNeededFor") return QueryOp::DualPreimage;
  return std::nullopt;
}

Universe input_universe(QueryOp op) {
  switch (op) {
    case QueryOp::DemandedBy:
    case QueryOp::Suffices:
    case QueryOp::LinkedInputs: return Universe::Sources;
    default: return Universe::Sinks;
  }
}

Universe output_universe(QueryOp op) {
  switch (op) {
    case QueryOp::DemandedBy:
    case QueryOp::Suffices:
    case QueryOp::LinkedOutputs: return Universe::Sinks;
    default: return Universe::Sources;
  }
}

VertexSet image(const Relation& r, const VertexSet& x) {
  require_within(x, r.left(), "image");
  VertexSet out(r.right().capacity());
  x.for_each([&](Address a) { out |= r.row(a); });
  return out;
}

VertexSet preimage(const Relation& r, const VertexSet& y) {
  require_within(y, r.right(), "preimage");
  VertexSet out(r.left().capacity());
  r.left().for_each([&](Address a) {
    if (r.row(a).intersects(y)) out.insert(a);
  });
  return out;
}

VertexSet dual_image(const Relation& r, const VertexSet& x) {
  require_within(x, r.left(), "dual image");
  const VertexSet excluded = r.left() - x;
  VertexSet out(r.right().capacity());
  r.right().for_each([&](Address b) {
    bool reached = false;
    excluded.for_each([&](Address a) { reached = reached || r.contains(a, b); });
    if (!reached) out.insert(b);
  });
  return out;
}

VertexSet dual_preimage(const Relation& r, const VertexSet& y) {
  require_within(y, r.right(), "dual preimage");
  const VertexSet excluded = r.right() - y;
  VertexSet out(r.left().capacity());
  r.left().for_each([&](Address a) {
    if (!r.row(a).intersects(excluded)) out.insert(a);
  });
  return out;
}

SelectionFn de_morgan_dual(SelectionFn f) {
  SelectionFn g;
  g.domain = f.domain;
  g.codomain = f.codomain;
  g.fn = [f = std::move(f)](const VertexSet& x) { return f.codomain - f(f.domain - x); };
  return g;
}

SelectionFn relation_image(const Relation& r) {
  return SelectionFn{r.left(), r.right(), [r](const VertexSet& x) { return image(r, x); }};
}

SelectionFn relation_preimage(const Relation& r) {
  return SelectionFn{r.right(), r.left(), [r](const VertexSet& y) { return preimage(r, y); }};
}

std::vector<VertexSet> subsets(const VertexSet& universe) {
  const auto members = universe.to_vector();
  if (members.size() > 24) throw BudgetExceeded("universe of " + std::to_string(members.size()) + " is too large");
  std::vector<VertexSet> out;
  out.reserve(std::size_t{1} << members.size());
  for (std::size_t mask = 0; mask < (std::size_t{1} << members.size()); ++mask) {
    VertexSet s(universe.capacity());
    for (std::size_t i = 0; i < members.size(); ++i) {
      if ((mask >> i) & 1u) s.insert(members[i]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

struct Tabulated {
  std::vector<VertexSet> xs;
  std::vector<VertexSet> fx;
  std::vector<VertexSet> ys;
  std::vector<VertexSet> gy;
};

Tabulated tabulate(const SelectionFn& f, const SelectionFn& g, std::size_t budget) {
  const std::size_t a = f.domain.size();
  const std::size_t b = g.domain.size();
  if (a + b >= 63 || (std::size_t{1} << (a + b)) > budget) {
    throw BudgetExceeded("exhaustive check needs 2^" + std::to_string(a + b) + " pairs, budget is " +
                         std::to_string(budget));
  }
  Tabulated t;
  t.xs = subsets(f.domain);
  t.ys = subsets(g.domain);
  for (const auto& x : t.xs) t.fx.push_back(f(x));
  for (const auto& y : t.ys) t.gy.push_back(g(y));
  return t;
}

}  // namespace

bool check_conjugate(const SelectionFn& f, const SelectionFn& g, std::size_t budget) {
  const Tabulated t = tabulate(f, g, budget);
  for (std::size_t i = 0; i < t.xs.size(); ++i) {
    for (std::size_t j = 0; j < t.ys.size(); ++j) {
      if (t.fx[i].intersects(t.ys[j]) != t.xs[i].intersects(t.gy[j])) return false;
    }
  }
  return true;
}

bool check_conjugate_sampled(const SelectionFn& f, const SelectionFn& g, std::mt19937_64& rng, std::size_t samples) {
  const auto left = f.domain.to_vector();
  const auto right = g.domain.to_vector();
  std::bernoulli_distribution coin(0.5);
  for (std::size_t k = 0; k < samples; ++k) {
    VertexSet x(f.domain.capacity());
    VertexSet y(g.domain.capacity());
    for (Address a : left) {
      if (coin(rng)) x.insert(a);
    }
    for (Address b : right) {
      if (coin(rng)) y.insert(b);
    }
    if (f(x).intersects(y) != x.intersects(g(y))) return false;
  }
  return true;
}

bool check_galois_sampled(const SelectionFn& f, const SelectionFn& g, std::mt19937_64& rng, std::size_t samples,
                          Ordering ordering) {
  const auto left = f.domain.to_vector();
  const auto right = g.domain.to_vector();
  std::bernoulli_distribution coin(0.5);
  for (std::size_t k = 0; k < samples; ++k) {
    VertexSet x(f.domain.capacity());
    VertexSet y(g.domain.capacity());
    for (Address a : left) {
      if (coin(rng)) x.insert(a);
    }
    for (Address b : right) {
      if (coin(rng)) y.insert(b);
    }
    const VertexSet fx = f(x);
    const bool lhs = ordering == Ordering::Monotone ? fx.is_subset_of(y) : y.is_subset_of(fx);
    if (lhs != x.is_subset_of(g(y))) return false;
  }
  return true;
}

bool check_galois(const SelectionFn& f, const SelectionFn& g, Ordering ordering, std::size_t budget) {
  const Tabulated t = tabulate(f, g, budget);
  for (std::size_t i = 0; i < t.xs.size(); ++i) {
    for (std::size_t j = 0; j < t.ys.size(); ++j) {
      const bool lhs = ordering == Ordering::Monotone ? t.fx[i].is_subset_of(t.ys[j]) : t.ys[j].is_subset_of(t.fx[i]);
      if (lhs != t.xs[i].is_subset_of(t.gy[j])) return false;
    }
  }
  return true;
}

}  // namespace cognate
