#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vcsp/errors.hpp"
#include "vcsp/instance.hpp"
#include "vcsp/mincut.hpp"
#include "vcsp/operations.hpp"

namespace vcsp {

enum class SolverPath { bruteforce, mincut, fallback, infeasible };

inline const char* to_string(SolverPath p) {
  switch (p) {
    case SolverPath::bruteforce: return "bruteforce";
    case SolverPath::mincut: return "mincut";
    case SolverPath::fallback: return "fallback";
    case SolverPath::infeasible: return "infeasible";
  }
  return "?";
}

struct SolveStats {
  SolverPath path = SolverPath::bruteforce;
  std::string fallback_reason;
  std::size_t stage2_iterations = 0;
  std::size_t consistency_revisions = 0;
  std::vector<std::pair<std::string, double>> timings_ms;
};

template <class C>
struct SolveResult {
  C optimum = C::infinity();
  std::optional<Assignment> argmin;
  SolveStats stats;
};

// Exhaustive minimum; the lexicographically first optimal assignment wins ties.
template <class C>
SolveResult<C> solve_bruteforce(const Instance<C>& inst, std::uint64_t cap = kDefaultEnumerationCap) {
  require_within_cap(inst.domains().assignment_count(), cap);
  SolveResult<C> r;
  r.stats.path = SolverPath::bruteforce;
  detail::search_finite(inst, [&](const Assignment& x, const C& cost) {
    if (!r.argmin || cost_less(cost, r.optimum)) {
      r.optimum = cost;
      r.argmin = x;
    }
  });
  return r;
}

struct TournamentOrder {
  // order[r] is the label of rank r, so meet = min and join = max by rank
  std::vector<std::optional<std::vector<Label>>> order;
  // 3-cycle a -> b -> c -> a (x -> y meaning x meet y = x) where no order exists
  std::vector<std::optional<std::array<Label, 3>>> cycle;

  bool total() const {
    return std::all_of(order.begin(), order.end(), [](const auto& o) { return o.has_value(); });
  }
};

inline TournamentOrder extract_tournament_order(const BinaryPair& pair) {
  const DomainSpec domains = domains_of(pair);
  if (auto v = is_stp_on(pair, PairSet::all(domains)); !v) {
    throw UsageError("extract_tournament_order: pair is not commutative everywhere, " + v.violation->describe());
  }
  TournamentOrder t;
  for (int i = 0; i < pair.variable_count(); ++i) {
    const auto& meet = pair.meet[static_cast<std::size_t>(i)];
    const int d = meet.domain_size();
    auto beats = [&](Label x, Label y) { return x != y && meet(x, y) == x; };
    std::vector<int> score(static_cast<std::size_t>(d), 0);
    for (Label x = 0; x < d; ++x)
      for (Label y = 0; y < d; ++y)
        if (beats(x, y)) ++score[static_cast<std::size_t>(x)];
    std::vector<Label> ranked(static_cast<std::size_t>(d));
    for (Label x = 0; x < d; ++x) ranked[static_cast<std::size_t>(x)] = x;
    std::sort(ranked.begin(), ranked.end(), [&](Label x, Label y) {
      return score[static_cast<std::size_t>(x)] > score[static_cast<std::size_t>(y)];
    });
    bool transitive = true;
    for (int r = 0; r < d; ++r) {
      if (score[static_cast<std::size_t>(ranked[static_cast<std::size_t>(r)])] != d - 1 - r) transitive = false;
    }
    if (transitive) {
      t.order.emplace_back(std::move(ranked));
      t.cycle.emplace_back();
      continue;
    }
    std::optional<std::array<Label, 3>> found;
    for (Label a = 0; a < d && !found; ++a)
      for (Label b = a + 1; b < d && !found; ++b)
        for (Label c = a + 1; c < d && !found; ++c)
          if (beats(a, b) && beats(b, c) && beats(c, a)) found = std::array<Label, 3>{a, b, c};
    if (!found) throw InternalError("non-transitive tournament without a 3-cycle");
    t.order.emplace_back();
    t.cycle.push_back(found);
  }
  return t;
}

struct StpOptions {
  bool force_fallback = false;
  std::uint64_t cap = kDefaultEnumerationCap;
};

// Relabels by the tournament order and uses the min-cut reduction when every term is at most binary;
// exhaustive search otherwise.
template <class C>
SolveResult<C> solve_stp(const Instance<C>& input, const BinaryPair& pair, const StpOptions& options = {}) {
  require_shape(pair, input.domains());
  const Instance<C> inst = canonicalize_scopes(input);
  const TournamentOrder tour = extract_tournament_order(pair);

  std::string reason;
  if (options.force_fallback) reason = "fallback requested";
  for (std::size_t i = 0; i < tour.cycle.size() && reason.empty(); ++i) {
    if (const auto& c = tour.cycle[i]) {
      reason = "cyclic tournament at variable " + std::to_string(i + 1) + ": " + std::to_string((*c)[0]) + " < " +
               std::to_string((*c)[1]) + " < " + std::to_string((*c)[2]) + " < " + std::to_string((*c)[0]);
    }
  }
  for (std::size_t t = 0; t < inst.terms().size() && reason.empty(); ++t) {
    if (inst.terms()[t].scope.size() > 2) {
      reason = "term " + std::to_string(t + 1) + " has arity " + std::to_string(inst.terms()[t].scope.size());
    }
  }

  SolveResult<C> result;
  if (!reason.empty()) {
    result = solve_bruteforce(inst, options.cap);
    result.stats.path = SolverPath::fallback;
    result.stats.fallback_reason = reason;
  } else {
    const int n = inst.variable_count();
    std::vector<std::vector<Label>> rank(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const auto& ord = *tour.order[static_cast<std::size_t>(i)];
      rank[static_cast<std::size_t>(i)].resize(ord.size());
      for (std::size_t r = 0; r < ord.size(); ++r) rank[static_cast<std::size_t>(i)][static_cast<std::size_t>(ord[r])] = static_cast<Label>(r);
    }
    Instance<C> ordered(inst.domains());
    for (const auto& term : inst.terms()) {
      Tuple x(term.scope.size());
      auto table = CostTable<C>::from_function(
          std::vector<int>(term.table.sizes().begin(), term.table.sizes().end()), [&](const Tuple& r) {
            for (std::size_t p = 0; p < r.size(); ++p) {
              x[p] = (*tour.order[static_cast<std::size_t>(term.scope[p])])[static_cast<std::size_t>(r[p])];
            }
            return term.table(x);
          });
      ordered.add_term(std::move(table), term.scope);
    }
    if (auto v = check_instance_binary(ordered, min_max_pair(ordered.domains())); !v) {
      throw InternalError("relabeled term " + std::to_string(*v.term + 1) + " is not submodular: " +
                          v.violation->describe());
    }
    auto cut = solve_mincut(ordered);
    result.stats.path = SolverPath::mincut;
    result.optimum = cut.optimum;
    if (cut.argmin) {
      Assignment x(cut.argmin->size());
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = (*tour.order[i])[static_cast<std::size_t>((*cut.argmin)[i])];
      result.argmin = std::move(x);
    }
  }
  if (result.argmin && !cost_eq(evaluate(input, *result.argmin), result.optimum)) {
    throw InternalError("solver returned an assignment whose cost differs from the reported optimum");
  }
  if (!result.argmin && result.optimum.is_finite()) throw InternalError("finite optimum without an assignment");
  return result;
}

}  // namespace vcsp
