#pragma once

#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vcsp/consistency.hpp"
#include "vcsp/errors.hpp"
#include "vcsp/instance.hpp"
#include "vcsp/operations.hpp"

namespace vcsp {

struct Seed {
  int k = -1;
  Label a = -1;
  Label b = -1;
  friend bool operator==(const Seed&, const Seed&) = default;
};

struct ReductionState {
  int k = -1;
  std::vector<char> in_u;    // membership of each variable in U
  std::vector<int> order;    // U in insertion order, starting with k
  std::vector<LabelSet> a;   // A_i (meaningful for i in U)
  std::vector<LabelSet> b;   // B_i

  bool contains(int i) const { return in_u.at(static_cast<std::size_t>(i)) != 0; }
  int size() const { return static_cast<int>(order.size()); }
  int sum_a() const {
    int s = 0;
    for (int i : order) s += a[static_cast<std::size_t>(i)].count();
    return s;
  }
  int sum_b() const {
    int s = 0;
    for (int i : order) s += b[static_cast<std::size_t>(i)].count();
    return s;
  }

  std::string dump() const {
    std::ostringstream os;
    os << "k=" << k + 1 << " U={";
    for (std::size_t p = 0; p < order.size(); ++p) os << (p ? "," : "") << order[p] + 1;
    os << "}";
    for (int i : order) {
      os << " A_" << i + 1 << "=" << a[static_cast<std::size_t>(i)].to_bit_string() << " B_" << i + 1 << "="
         << b[static_cast<std::size_t>(i)].to_bit_string();
    }
    return os.str();
  }
};

// Smallest (k, {a,b}) with {a,b} outside M_k.
inline std::optional<Seed> find_seed(const PairSet& m) {
  for (int k = 0; k < m.variable_count(); ++k) {
    const int d = m.domain_size(k);
    for (Label a = 0; a < d; ++a)
      for (Label b = a + 1; b < d; ++b)
        if (!m.contains(k, a, b)) return Seed{k, a, b};
  }
  return std::nullopt;
}

// Grows U and the sets A_i, B_i from a seed, choosing the smallest candidate at every step.
inline ReductionState grow_uab(const Seed& seed, const BinaryNetwork& net) {
  const int n = net.variable_count();
  const int k = seed.k;
  if (k < 0 || k >= n) throw UsageError("grow_uab: seed variable out of range");
  const int dk = net.domains().size(k);
  if (seed.a == seed.b || seed.a < 0 || seed.b < 0 || seed.a >= dk || seed.b >= dk) {
    throw UsageError("grow_uab: invalid seed pair");
  }

  ReductionState s;
  s.k = k;
  s.in_u.assign(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    s.a.emplace_back(net.domains().size(i));
    s.b.emplace_back(net.domains().size(i));
  }
  s.in_u[static_cast<std::size_t>(k)] = 1;
  s.order.push_back(k);
  auto& ak = s.a[static_cast<std::size_t>(k)];
  auto& bk = s.b[static_cast<std::size_t>(k)];
  ak.insert(seed.a);
  bk.insert(seed.b);

  auto close = [&](std::vector<LabelSet>& sets) {
    auto& xk = sets[static_cast<std::size_t>(k)];
    while (true) {
      Label found = -1;
      for (Label x = 0; x < dk && found < 0; ++x) {
        if (xk.contains(x)) continue;
        for (int i : s.order) {
          if (i == k) continue;
          if (net.relation(k, i).row(x).intersects(sets[static_cast<std::size_t>(i)])) {
            found = x;
            break;
          }
        }
      }
      if (found < 0) return;
      xk.insert(found);
      for (int j : s.order) {
        if (j != k) sets[static_cast<std::size_t>(j)] = image(net.relation(k, j), xk, Side::forward);
      }
    }
  };

  while (true) {
    int next = -1;
    for (int i = 0; i < n; ++i) {
      if (s.contains(i)) continue;
      const auto& r = net.relation(k, i);
      if (!image(r, ak, Side::forward).intersects(image(r, bk, Side::forward))) {
        next = i;
        break;
      }
    }
    if (next < 0) break;
    s.in_u[static_cast<std::size_t>(next)] = 1;
    s.order.push_back(next);
    s.a[static_cast<std::size_t>(next)] = image(net.relation(k, next), ak, Side::forward);
    s.b[static_cast<std::size_t>(next)] = image(net.relation(k, next), bk, Side::forward);
    close(s.a);
    close(s.b);
  }
  return s;
}

struct StateViolation {
  char clause = '?';  // 'a'..'d', or 'e' for an empty A_i / B_i
  std::string detail;
  std::string describe() const { return std::string("clause (") + clause + "): " + detail; }
};

// Checks disjointness, cross pairs outside M, the four image equalities and cross-boundary uniformity.
inline std::optional<StateViolation> check_reduction_state(const ReductionState& s, const BinaryNetwork& net,
                                                          const PairSet& m) {
  const int n = net.variable_count();
  const int k = s.k;
  auto var = [](int i) { return std::to_string(i + 1); };
  for (int i : s.order) {
    const auto& ai = s.a[static_cast<std::size_t>(i)];
    const auto& bi = s.b[static_cast<std::size_t>(i)];
    if (ai.empty() || bi.empty()) return StateViolation{'e', "empty set at variable " + var(i)};
    if (ai.intersects(bi)) {
      return StateViolation{'a', "A and B share label " + std::to_string((ai & bi).first()) + " at variable " + var(i)};
    }
    for (Label x : ai.labels())
      for (Label y : bi.labels())
        if (m.contains(i, x, y)) {
          return StateViolation{'b', "pair {" + std::to_string(x) + "," + std::to_string(y) + "} at variable " +
                                         var(i) + " already in M"};
        }
  }
  const auto& ak = s.a[static_cast<std::size_t>(k)];
  const auto& bk = s.b[static_cast<std::size_t>(k)];
  for (int i : s.order) {
    if (i == k) continue;
    const auto& r = net.relation(k, i);
    const auto& ai = s.a[static_cast<std::size_t>(i)];
    const auto& bi = s.b[static_cast<std::size_t>(i)];
    if (image(r, ak, Side::forward) != ai) return StateViolation{'c', "forward image of A_k differs from A_" + var(i)};
    if (image(r, bk, Side::forward) != bi) return StateViolation{'c', "forward image of B_k differs from B_" + var(i)};
    if (image(r, ai, Side::backward) != ak) return StateViolation{'c', "backward image of A_" + var(i) + " differs from A_k"};
    if (image(r, bi, Side::backward) != bk) return StateViolation{'c', "backward image of B_" + var(i) + " differs from B_k"};
  }
  for (int i : s.order) {
    LabelSet both = s.a[static_cast<std::size_t>(i)] | s.b[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) {
      if (s.contains(j)) continue;
      const auto& r = net.relation(i, j);
      for (Label x = 0; x < r.cols(); ++x) {
        LabelSet col = r.column(x) & both;
        if (!col.empty() && col != both) {
          return StateViolation{'d', "label " + std::to_string(x) + " of variable " + var(j) +
                                         " is supported by only part of A_" + var(i) + " and B_" + var(i)};
        }
      }
    }
  }
  return std::nullopt;
}

// Adds A_i x B_i to M_i with a meet b = a and a join b = b in both argument orders.
inline OperationSystem apply_modification(const ReductionState& s, OperationSystem ops) {
  for (int i : s.order) {
    const auto ui = static_cast<std::size_t>(i);
    for (Label x : s.a[ui].labels())
      for (Label y : s.b[ui].labels()) {
        ops.m.insert(i, x, y);
        ops.pair.meet[ui].set(x, y, x);
        ops.pair.meet[ui].set(y, x, x);
        ops.pair.join[ui].set(x, y, y);
        ops.pair.join[ui].set(y, x, y);
      }
  }
  return ops;
}

// ---- network-wide diagnostic scans -------------------------------------------------------

struct ScanViolation {
  int i = -1, j = -1;
  Label a = -1, b = -1, a2 = -1, b2 = -1;
  std::string detail;
  std::string describe() const {
    std::ostringstream os;
    os << "variables " << i + 1 << "," << j + 1 << " labels a=" << a << " b=" << b << " a'=" << a2
       << " b'=" << b2 << ": " << detail;
    return os.str();
  }
};

// For {a,b} outside M_i, {a',b'} any pair at j and (a,a'),(b,b') in rho_ij: either both cross
// tuples (a,b'),(b,a') are in rho_ij, or neither is and {a',b'} is outside M_j.
inline std::optional<ScanViolation> scan_exchange_property(const BinaryNetwork& net, const PairSet& m) {
  const int n = net.variable_count();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto& r = net.relation(i, j);
      const int di = r.rows(), dj = r.cols();
      for (Label a = 0; a < di; ++a)
        for (Label b = 0; b < di; ++b) {
          if (a == b || m.contains(i, a, b)) continue;
          for (Label a2 = 0; a2 < dj; ++a2) {
            if (!r.test(a, a2)) continue;
            for (Label b2 = 0; b2 < dj; ++b2) {
              if (a2 == b2 || !r.test(b, b2)) continue;
              const bool x = r.test(a, b2), y = r.test(b, a2);
              const bool first = x && y;
              const bool second = !x && !y && !m.contains(j, a2, b2);
              if (first == second) {
                return ScanViolation{i, j, a, b, a2, b2,
                                     first ? "both alternatives hold" : "neither alternative holds"};
              }
            }
          }
        }
    }
  return std::nullopt;
}

// For i in U, j outside U, a in A_i, b in B_i, c in A_i or B_i with (a,x),(b,x),(c,y) in rho_ij:
// (a,y),(b,y),(c,x) are in rho_ij as well.
inline std::optional<ScanViolation> scan_boundary_closure(const ReductionState& s, const BinaryNetwork& net) {
  const int n = net.variable_count();
  for (int i : s.order) {
    const auto& ai = s.a[static_cast<std::size_t>(i)];
    const auto& bi = s.b[static_cast<std::size_t>(i)];
    const auto both = (ai | bi).labels();
    for (int j = 0; j < n; ++j) {
      if (s.contains(j)) continue;
      const auto& r = net.relation(i, j);
      for (Label a : ai.labels())
        for (Label b : bi.labels())
          for (Label c : both)
            for (Label x = 0; x < r.cols(); ++x) {
              if (!r.test(a, x) || !r.test(b, x)) continue;
              for (Label y = 0; y < r.cols(); ++y) {
                if (!r.test(c, y)) continue;
                if (!r.test(a, y) || !r.test(b, y) || !r.test(c, x)) {
                  return ScanViolation{i, j, a, b, x, y, "closure fails for c=" + std::to_string(c)};
                }
              }
            }
    }
  }
  return std::nullopt;
}

// ---- driver ----------------------------------------------------------------------------------

struct IterationRecord {
  Seed seed;
  int u_size = 0;
  int sum_a = 0;
  int sum_b = 0;
};

struct Stage2Options {
  bool verify_multimorphism = true;  // re-check every term against the new pair after each iteration
  bool paranoid = false;             // run the network-wide scans
  std::function<void(const IterationRecord&, const ReductionState&)> on_iteration;
  // Sees every grown state together with the operations it will modify, before any check runs.
  std::function<void(const ReductionState&, const BinaryNetwork&, const OperationSystem&)> observe;
};

struct Stage2Result {
  OperationSystem ops;
  std::vector<IterationRecord> iterations;
};

// instance and net must share domains; ops must be a valid system on them. The instance should carry
// only network-consistent tuples (see restrict_to_network) for the multimorphism re-check to apply.
template <class C>
Stage2Result run_stage2(const Instance<C>& inst, OperationSystem ops, const BinaryNetwork& net,
                        const Stage2Options& options = {}) {
  if (!(inst.domains() == net.domains())) throw UsageError("run_stage2: instance and network domains differ");
  require_shape(ops.pair, net.domains());
  if (auto msg = validate_operation_system(ops)) throw PipelineError("stage2", "invalid operation system: " + *msg);
  ops = normalize_commutative(std::move(ops));

  Stage2Result result;
  const int bound = PairSet::all(net.domains()).total();
  while (auto seed = find_seed(ops.m)) {
    if (static_cast<int>(result.iterations.size()) >= bound) {
      throw InternalError("stage 2 exceeded its iteration bound");
    }
    if (options.paranoid) {
      if (auto v = scan_exchange_property(net, ops.m)) {
        throw PipelineError("stage2", "exchange property violated: " + v->describe());
      }
    }
    ReductionState state = grow_uab(*seed, net);
    if (options.observe) options.observe(state, net, ops);
    if (auto v = check_reduction_state(state, net, ops.m)) {
      throw PipelineError("stage2", "reduction state check failed, " + v->describe() + "; state " + state.dump());
    }
    if (options.paranoid) {
      if (auto v = scan_boundary_closure(state, net)) {
        throw PipelineError("stage2", "boundary closure violated: " + v->describe() + "; state " + state.dump());
      }
    }
    const int before = ops.m.total();
    ops = apply_modification(state, std::move(ops));
    if (ops.m.total() <= before) throw InternalError("stage 2 made no progress");
    if (auto v = is_stp_on(ops.pair, ops.m); !v) {
      throw InternalError("modified pair is not an STP on M: " + v.violation->describe());
    }
    if (options.verify_multimorphism) {
      if (auto v = check_instance_binary(inst, ops.pair); !v) {
        throw PipelineError("stage2", "term " + std::to_string(*v.term + 1) +
                                          " lost the binary multimorphism after iteration " +
                                          std::to_string(result.iterations.size() + 1) + ": " +
                                          v.violation->describe());
      }
    }
    IterationRecord rec{*seed, state.size(), state.sum_a(), state.sum_b()};
    if (options.on_iteration) options.on_iteration(rec, state);
    result.iterations.push_back(rec);
  }
  result.ops = std::move(ops);
  return result;
}

inline std::string format_iteration(std::size_t n, const IterationRecord& r, Label a, Label b) {
  std::ostringstream os;
  os << "iter " << n << " k=" << r.seed.k + 1 << " seed=" << a << ":" << b << " |U|=" << r.u_size
     << " sumA=" << r.sum_a << " sumB=" << r.sum_b;
  return os.str();
}

}  // namespace vcsp
