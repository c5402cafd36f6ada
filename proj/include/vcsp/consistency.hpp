#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "vcsp/bit_matrix.hpp"
#include "vcsp/errors.hpp"
#include "vcsp/instance.hpp"
#include "vcsp/operations.hpp"

namespace vcsp {

// Unary relations rho_i and binary relations rho_ij over every ordered pair of distinct variables.
// rho_ij and rho_ji are kept as transposes of each other.
class BinaryNetwork {
 public:
  BinaryNetwork() = default;
  explicit BinaryNetwork(DomainSpec domains) : domains_(std::move(domains)) {
    const int n = domains_.variable_count();
    for (int i = 0; i < n; ++i) unary_.push_back(LabelSet::full(domains_.size(i)));
    binary_.resize(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) at(i, j) = BitMatrix::full(domains_.size(i), domains_.size(j));
  }

  const DomainSpec& domains() const { return domains_; }
  int variable_count() const { return domains_.variable_count(); }

  const LabelSet& unary(int i) const { return unary_.at(static_cast<std::size_t>(i)); }
  const BitMatrix& relation(int i, int j) const {
    if (i == j) throw UsageError("relation: variables must be distinct");
    return binary_.at(static_cast<std::size_t>(i * variable_count() + j));
  }

  bool restrict_unary(int i, const LabelSet& s) {
    auto& u = unary_.at(static_cast<std::size_t>(i));
    LabelSet next = u & s;
    if (next == u) return false;
    u = next;
    return true;
  }

  bool restrict_relation(int i, int j, const BitMatrix& r) {
    BitMatrix next = relation(i, j) & r;
    if (next == relation(i, j)) return false;
    at(j, i) = next.transpose();
    at(i, j) = std::move(next);
    return true;
  }

  bool has_empty_domain() const {
    for (const auto& u : unary_) if (u.empty()) return true;
    return false;
  }

  friend bool operator==(const BinaryNetwork&, const BinaryNetwork&) = default;

 private:
  BitMatrix& at(int i, int j) { return binary_[static_cast<std::size_t>(i * variable_count() + j)]; }

  DomainSpec domains_;
  std::vector<LabelSet> unary_;
  std::vector<BitMatrix> binary_;
};

// Projects every term's dom onto its variables and variable pairs and intersects the results.
template <class C>
BinaryNetwork decompose_instance(const Instance<C>& inst, std::uint64_t cap = kDefaultEnumerationCap) {
  BinaryNetwork net(inst.domains());
  for (const auto& term : inst.terms()) {
    require_within_cap(term.table.size(), cap);
    const std::size_t m = term.scope.size();
    std::vector<LabelSet> unary;
    for (std::size_t p = 0; p < m; ++p) unary.emplace_back(term.table.sizes()[p]);
    std::vector<BitMatrix> pairs(m * m);
    for (std::size_t p = 0; p < m; ++p)
      for (std::size_t q = 0; q < m; ++q) pairs[p * m + q] = BitMatrix(term.table.sizes()[p], term.table.sizes()[q]);
    for (const auto& x : term.table.dom()) {
      for (std::size_t p = 0; p < m; ++p) {
        unary[p].insert(x[p]);
        for (std::size_t q = p + 1; q < m; ++q) pairs[p * m + q].set(x[p], x[q]);
      }
    }
    for (std::size_t p = 0; p < m; ++p) {
      net.restrict_unary(term.scope[p], unary[p]);
      for (std::size_t q = p + 1; q < m; ++q) {
        if (term.scope[p] == term.scope[q]) {
          LabelSet diag(term.table.sizes()[p]);
          for (Label a = 0; a < diag.universe(); ++a) if (pairs[p * m + q].test(a, a)) diag.insert(a);
          net.restrict_unary(term.scope[p], diag);
          continue;
        }
        net.restrict_relation(term.scope[p], term.scope[q], pairs[p * m + q]);
      }
    }
  }
  return net;
}

struct ConsistencyOptions {
  // When set, the worklist is processed in a pseudo-random order drawn from this seed.
  std::optional<std::uint64_t> shuffle_seed;
};

struct ConsistencyResult {
  BinaryNetwork network;
  bool empty = false;
  std::size_t revisions = 0;
};

// Greatest fixed point of arc- and path-consistency pruning.
inline ConsistencyResult enforce_strong_3_consistency(BinaryNetwork net, const ConsistencyOptions& options = {}) {
  const int n = net.variable_count();
  ConsistencyResult result;
  std::vector<std::pair<int, int>> work;
  std::vector<char> queued(static_cast<std::size_t>(n * n), 0);
  auto push = [&](int i, int j) {
    if (i > j) std::swap(i, j);
    auto& q = queued[static_cast<std::size_t>(i * n + j)];
    if (!q) {
      q = 1;
      work.emplace_back(i, j);
    }
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) push(i, j);

  std::mt19937_64 rng(options.shuffle_seed.value_or(0));
  std::size_t head = 0;
  while (head < work.size()) {
    if (options.shuffle_seed) {
      std::uniform_int_distribution<std::size_t> pick(head, work.size() - 1);
      std::swap(work[head], work[pick(rng)]);
    }
    auto [i, j] = work[head++];
    queued[static_cast<std::size_t>(i * n + j)] = 0;
    ++result.revisions;

    BitMatrix r = net.relation(i, j) & BitMatrix::product(net.unary(i), net.unary(j));
    for (int k = 0; k < n; ++k) {
      if (k == i || k == j) continue;
      r &= compose(net.relation(i, k), net.relation(k, j));
    }
    if (net.restrict_relation(i, j, r)) {
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        push(i, k);
        push(j, k);
      }
    }
    if (net.restrict_unary(i, net.relation(i, j).row_support())) {
      for (int k = 0; k < n; ++k) if (k != i) push(i, k);
    }
    if (net.restrict_unary(j, net.relation(i, j).column_support())) {
      for (int k = 0; k < n; ++k) if (k != j) push(j, k);
    }
    if (head > 4096 && head * 2 > work.size()) {
      work.erase(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(head));
      head = 0;
    }
  }
  result.empty = net.has_empty_domain();
  result.network = std::move(net);
  return result;
}

inline bool is_arc_consistent(const BinaryNetwork& net) {
  const int n = net.variable_count();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto& r = net.relation(i, j);
      if (r.row_support() != net.unary(i)) return false;
      if (!((r & BitMatrix::product(net.unary(i), net.unary(j))) == r)) return false;
    }
  return true;
}

inline bool is_path_consistent(const BinaryNetwork& net) {
  const int n = net.variable_count();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (i == j || j == k || i == k) continue;
        const auto& rij = net.relation(i, j);
        for (Label x = 0; x < rij.rows(); ++x)
          for (Label y : rij.row(x).labels())
            if (!net.relation(i, k).row(x).intersects(net.relation(j, k).row(y))) return false;
      }
  return true;
}

struct CertifyResult {
  bool ok = true;
  std::optional<Assignment> counterexample;  // first assignment on which the biconditional fails
};

// x in dom Cost_I  <=>  x_i in rho_i for all i and (x_i, x_j) in rho_ij for all i != j.
template <class C>
CertifyResult certify_decomposition(const BinaryNetwork& net, const Instance<C>& inst,
                                    std::uint64_t cap = kDefaultEnumerationCap) {
  if (!(net.domains() == inst.domains())) throw UsageError("certify_decomposition: domains differ");
  require_within_cap(inst.domains().assignment_count(), cap);
  const int n = inst.variable_count();
  CertifyResult out;
  for_each_tuple(inst.domains().sizes(), [&](const Tuple& x) {
    if (!out.ok) return;
    bool in_network = true;
    for (int i = 0; i < n && in_network; ++i) {
      if (!net.unary(i).contains(x[static_cast<std::size_t>(i)])) in_network = false;
      for (int j = i + 1; j < n && in_network; ++j) {
        if (!net.relation(i, j).test(x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(j)])) {
          in_network = false;
        }
      }
    }
    bool in_dom = evaluate(inst, x).is_finite();
    if (in_dom != in_network) {
      out.ok = false;
      out.counterexample = x;
    }
  });
  return out;
}

// ---- shrinking domains to the unary relations ----------------------------------------------

// Label maps between original domains and the domains D_i := rho_i.
struct DomainMap {
  DomainSpec original;
  DomainSpec reduced;
  std::vector<std::vector<Label>> to_original;  // reduced label -> original label
  std::vector<std::vector<Label>> to_reduced;   // original label -> reduced label or -1
};

// Requires every rho_i non-empty.
inline DomainMap domain_map_from(const BinaryNetwork& net) {
  DomainMap map;
  map.original = net.domains();
  std::vector<int> sizes;
  for (int i = 0; i < net.variable_count(); ++i) {
    auto labels = net.unary(i).labels();
    if (labels.empty()) throw UsageError("domain_map_from: empty unary relation for variable " + std::to_string(i + 1));
    std::vector<Label> back(static_cast<std::size_t>(net.domains().size(i)), -1);
    for (std::size_t r = 0; r < labels.size(); ++r) back[static_cast<std::size_t>(labels[r])] = static_cast<Label>(r);
    sizes.push_back(static_cast<int>(labels.size()));
    map.to_original.push_back(std::move(labels));
    map.to_reduced.push_back(std::move(back));
  }
  map.reduced = DomainSpec(std::move(sizes));
  return map;
}

inline BinaryNetwork shrink_network(const BinaryNetwork& net, const DomainMap& map) {
  BinaryNetwork out(map.reduced);
  const int n = net.variable_count();
  for (int i = 0; i < n; ++i) {
    const auto& ti = map.to_original[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < n; ++j) {
      const auto& tj = map.to_original[static_cast<std::size_t>(j)];
      BitMatrix r(static_cast<int>(ti.size()), static_cast<int>(tj.size()));
      for (std::size_t a = 0; a < ti.size(); ++a)
        for (std::size_t b = 0; b < tj.size(); ++b)
          r.set(static_cast<Label>(a), static_cast<Label>(b), net.relation(i, j).test(ti[a], tj[b]));
      out.restrict_relation(i, j, r);
    }
  }
  return out;
}

template <class C>
Instance<C> shrink_instance(const Instance<C>& inst, const DomainMap& map) {
  Instance<C> out(map.reduced);
  for (const auto& term : inst.terms()) {
    std::vector<int> sizes;
    for (int v : term.scope) sizes.push_back(map.reduced.size(v));
    Tuple orig(term.scope.size());
    auto table = CostTable<C>::from_function(sizes, [&](const Tuple& y) {
      for (std::size_t p = 0; p < y.size(); ++p) {
        orig[p] = map.to_original[static_cast<std::size_t>(term.scope[p])][static_cast<std::size_t>(y[p])];
      }
      return term.table(orig);
    });
    out.add_term(std::move(table), term.scope);
  }
  return out;
}

// Restricts conservative operation tables to the reduced domains.
inline OperationSystem shrink_operations(const OperationSystem& ops, const DomainMap& map) {
  auto down = [&](int i, Label original) {
    Label r = map.to_reduced[static_cast<std::size_t>(i)][static_cast<std::size_t>(original)];
    if (r < 0) throw InternalError("operation left the reduced domain of variable " + std::to_string(i + 1));
    return r;
  };
  OperationSystem out;
  out.m = PairSet(map.reduced);
  for (int i = 0; i < map.reduced.variable_count(); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const auto& up = map.to_original[ui];
    const int d = map.reduced.size(i);
    out.pair.meet.push_back(BinaryTable::from_function(d, [&](Label a, Label b) { return down(i, ops.pair.meet[ui](up[static_cast<std::size_t>(a)], up[static_cast<std::size_t>(b)])); }));
    out.pair.join.push_back(BinaryTable::from_function(d, [&](Label a, Label b) { return down(i, ops.pair.join[ui](up[static_cast<std::size_t>(a)], up[static_cast<std::size_t>(b)])); }));
    auto lift3 = [&](const TernaryTable& t) {
      return TernaryTable::from_function(d, [&](Label a, Label b, Label c) {
        return down(i, t(up[static_cast<std::size_t>(a)], up[static_cast<std::size_t>(b)], up[static_cast<std::size_t>(c)]));
      });
    };
    out.triple.mj1.push_back(lift3(ops.triple.mj1[ui]));
    out.triple.mj2.push_back(lift3(ops.triple.mj2[ui]));
    out.triple.mn3.push_back(lift3(ops.triple.mn3[ui]));
    for (Label a = 0; a < d; ++a)
      for (Label b = a + 1; b < d; ++b)
        if (ops.m.contains(i, up[static_cast<std::size_t>(a)], up[static_cast<std::size_t>(b)])) out.m.insert(i, a, b);
  }
  return out;
}

inline Assignment expand_assignment(const DomainMap& map, std::span<const Label> reduced) {
  Assignment x(reduced.size());
  for (std::size_t i = 0; i < reduced.size(); ++i) x[i] = map.to_original[i][static_cast<std::size_t>(reduced[i])];
  return x;
}

// Each term gets infinity on tuples that violate a unary or pairwise relation among its scope;
// then a crisp term is appended for every pair (i, j) whose relation is not the full product.
template <class C>
Instance<C> restrict_to_network(const Instance<C>& inst, const BinaryNetwork& net) {
  if (!(net.domains() == inst.domains())) throw UsageError("restrict_to_network: domains differ");
  Instance<C> out(inst.domains());
  for (const auto& term : inst.terms()) {
    const auto& s = term.scope;
    auto table = CostTable<C>::from_function(std::vector<int>(term.table.sizes().begin(), term.table.sizes().end()),
                                             [&](const Tuple& x) {
                                               for (std::size_t p = 0; p < s.size(); ++p) {
                                                 if (!net.unary(s[p]).contains(x[p])) return C::infinity();
                                                 for (std::size_t q = p + 1; q < s.size(); ++q) {
                                                   if (s[p] != s[q] && !net.relation(s[p], s[q]).test(x[p], x[q])) {
                                                     return C::infinity();
                                                   }
                                                 }
                                               }
                                               return term.table(x);
                                             });
    out.add_term(std::move(table), s);
  }
  const int n = net.variable_count();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const auto& r = net.relation(i, j);
      if (r == BitMatrix::full(r.rows(), r.cols())) continue;
      out.add_term(crisp_table<C>(r), {i, j});
    }
  return out;
}

// Diagnostic dump: one line per relation, rows as bit-strings (1-based variables).
inline void write_network(std::ostream& os, const BinaryNetwork& net) {
  const int n = net.variable_count();
  for (int i = 0; i < n; ++i) os << "unary " << i + 1 << ' ' << net.unary(i).to_bit_string() << '\n';
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      os << "binary " << i + 1 << ' ' << j + 1 << ' ' << net.relation(i, j).to_bit_string(' ') << '\n';
}

}  // namespace vcsp
