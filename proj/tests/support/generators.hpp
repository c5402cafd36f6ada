#pragma once

// Random instances together with operation systems they provably admit.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "vcsp/vcsp.hpp"

namespace testgen {

using vcsp::Cost;
using vcsp::DomainSpec;
using vcsp::Instance;
using vcsp::Label;
using vcsp::OperationSystem;
using vcsp::Tuple;
using Rng = std::mt19937_64;

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

inline DomainSpec random_domains(Rng& rng, int variables, int max_size, int min_size = 2) {
  std::vector<int> sizes;
  for (int i = 0; i < variables; ++i) sizes.push_back(uniform(rng, min_size, max_size));
  return DomainSpec(sizes);
}

struct SystemOptions {
  double m_probability = 0.5;
  // Off the complement of M the triple is free (conservative); false draws it at random.
  bool canonical_everywhere = false;
};

// STP on M (random tournaments), projection pairs on the complement, MJN on the complement.
inline OperationSystem random_system(Rng& rng, const DomainSpec& d, const SystemOptions& opt = {}) {
  OperationSystem ops;
  ops.m = vcsp::PairSet(d);
  for (int i = 0; i < d.variable_count(); ++i) {
    const int n = d.size(i);
    vcsp::BinaryTable meet(n), join(n);
    for (Label a = 0; a < n; ++a) {
      meet.set(a, a, a);
      join.set(a, a, a);
      for (Label b = a + 1; b < n; ++b) {
        if (coin(rng, opt.m_probability)) {
          ops.m.insert(i, a, b);
          Label lo = coin(rng, 0.5) ? a : b;
          Label hi = lo == a ? b : a;
          meet.set(a, b, lo);
          meet.set(b, a, lo);
          join.set(a, b, hi);
          join.set(b, a, hi);
        } else if (coin(rng, 0.5)) {
          meet.set(a, b, a);
          meet.set(b, a, b);
          join.set(a, b, b);
          join.set(b, a, a);
        } else {
          meet.set(a, b, b);
          meet.set(b, a, a);
          join.set(a, b, a);
          join.set(b, a, b);
        }
      }
    }
    ops.pair.meet.push_back(meet);
    ops.pair.join.push_back(join);

    auto on_mbar = [&](Label x, Label y, Label z) {
      std::set<Label> s{x, y, z};
      if (s.size() != 2) return false;
      return !ops.m.contains(i, *s.begin(), *s.rbegin());
    };
    auto make = [&](auto canonical) {
      return vcsp::TernaryTable::from_function(n, [&](Label x, Label y, Label z) {
        if (opt.canonical_everywhere || on_mbar(x, y, z)) return canonical(x, y, z);
        const Label pick[3] = {x, y, z};
        return pick[uniform(rng, 0, 2)];
      });
    };
    ops.triple.mj1.push_back(make(vcsp::canonical_mj1));
    ops.triple.mj2.push_back(make(vcsp::canonical_mj2));
    ops.triple.mn3.push_back(make(vcsp::canonical_mn3));
  }
  return ops;
}

// Pure MJN setting: M empty, first-projection pair, canonical tables.
inline OperationSystem mjn_system(const DomainSpec& d) {
  return OperationSystem{vcsp::projection_pair(d), vcsp::canonical_mjn(d), vcsp::PairSet(d)};
}

// Makes variable j a relabelled copy of variable i: every operation at j is the operation at i
// conjugated by a random bijection pi, so the graph of pi is closed under all of them.
inline std::vector<Label> link_variables(Rng& rng, OperationSystem& ops, int i, int j) {
  const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
  const int n = ops.pair.meet[ui].domain_size();
  std::vector<Label> pi(static_cast<std::size_t>(n)), inv(static_cast<std::size_t>(n));
  for (Label a = 0; a < n; ++a) pi[static_cast<std::size_t>(a)] = a;
  std::shuffle(pi.begin(), pi.end(), rng);
  for (Label a = 0; a < n; ++a) inv[static_cast<std::size_t>(pi[static_cast<std::size_t>(a)])] = a;
  auto p = [&](Label a) { return pi[static_cast<std::size_t>(a)]; };
  auto q = [&](Label a) { return inv[static_cast<std::size_t>(a)]; };
  auto conj2 = [&](const vcsp::BinaryTable& t) {
    return vcsp::BinaryTable::from_function(n, [&](Label x, Label y) { return p(t(q(x), q(y))); });
  };
  auto conj3 = [&](const vcsp::TernaryTable& t) {
    return vcsp::TernaryTable::from_function(n, [&](Label x, Label y, Label z) { return p(t(q(x), q(y), q(z))); });
  };
  ops.pair.meet[uj] = conj2(ops.pair.meet[ui]);
  ops.pair.join[uj] = conj2(ops.pair.join[ui]);
  ops.triple.mj1[uj] = conj3(ops.triple.mj1[ui]);
  ops.triple.mj2[uj] = conj3(ops.triple.mj2[ui]);
  ops.triple.mn3[uj] = conj3(ops.triple.mn3[ui]);
  for (Label a = 0; a < n; ++a)
    for (Label b = a + 1; b < n; ++b) {
      ops.m.erase(j, a, b);
      if (ops.m.contains(i, q(a), q(b))) ops.m.insert(j, a, b);
    }
  return pi;
}

// Componentwise action of the five operations on tuples over a scope.
struct ScopedOps {
  const OperationSystem& ops;
  const std::vector<int>& scope;

  Tuple meet(const Tuple& x, const Tuple& y) const { return apply2(ops.pair.meet, x, y); }
  Tuple join(const Tuple& x, const Tuple& y) const { return apply2(ops.pair.join, x, y); }
  Tuple mj1(const Tuple& x, const Tuple& y, const Tuple& z) const { return apply3(ops.triple.mj1, x, y, z); }
  Tuple mj2(const Tuple& x, const Tuple& y, const Tuple& z) const { return apply3(ops.triple.mj2, x, y, z); }
  Tuple mn3(const Tuple& x, const Tuple& y, const Tuple& z) const { return apply3(ops.triple.mn3, x, y, z); }

 private:
  Tuple apply2(const std::vector<vcsp::BinaryTable>& t, const Tuple& x, const Tuple& y) const {
    Tuple r(x.size());
    for (std::size_t p = 0; p < x.size(); ++p) r[p] = t[static_cast<std::size_t>(scope[p])](x[p], y[p]);
    return r;
  }
  Tuple apply3(const vcsp::TernaryOperation& t, const Tuple& x, const Tuple& y, const Tuple& z) const {
    Tuple r(x.size());
    for (std::size_t p = 0; p < x.size(); ++p) r[p] = t[static_cast<std::size_t>(scope[p])](x[p], y[p], z[p]);
    return r;
  }
};

// Smallest superset of seeds closed under all five operations.
inline std::set<Tuple> close_under(const OperationSystem& ops, const std::vector<int>& scope, std::set<Tuple> set) {
  ScopedOps f{ops, scope};
  for (bool grew = true; grew;) {
    grew = false;
    std::vector<Tuple> v(set.begin(), set.end());
    auto add = [&](Tuple t) { grew = set.insert(std::move(t)).second || grew; };
    for (const auto& x : v)
      for (const auto& y : v) {
        add(f.meet(x, y));
        add(f.join(x, y));
        for (const auto& z : v) {
          add(f.mj1(x, y, z));
          add(f.mj2(x, y, z));
          add(f.mn3(x, y, z));
        }
      }
  }
  return set;
}

// Integer costs on a closed set, lowered until both multimorphism inequalities hold.
// Repair only lowers outputs not cancelled by inputs, so total cost strictly decreases.
class Repairer {
 public:
  Repairer(const OperationSystem& ops, const std::vector<int>& scope, std::vector<Tuple> dom, std::vector<long long> cost)
      : f_{ops, scope}, dom_(std::move(dom)), cost_(std::move(cost)) {
    for (std::size_t k = 0; k < dom_.size(); ++k) index_[dom_[k]] = k;
  }

  void run() {
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& x : dom_)
        for (const auto& y : dom_) changed = fix({f_.meet(x, y), f_.join(x, y)}, {x, y}) || changed;
      for (const auto& x : dom_)
        for (const auto& y : dom_)
          for (const auto& z : dom_) changed = fix({f_.mj1(x, y, z), f_.mj2(x, y, z), f_.mn3(x, y, z)}, {x, y, z}) || changed;
    }
  }

  long long cost(const Tuple& t) const { return cost_[index_.at(t)]; }

 private:
  bool fix(std::vector<Tuple> out, std::vector<Tuple> in) {
    long long lhs = 0, rhs = 0;
    for (const auto& t : out) lhs += cost(t);
    for (const auto& t : in) rhs += cost(t);
    if (lhs <= rhs) return false;
    for (auto it = out.begin(); it != out.end();) {
      auto hit = std::find(in.begin(), in.end(), *it);
      if (hit != in.end()) {
        in.erase(hit);
        it = out.erase(it);
      } else {
        ++it;
      }
    }
    long long excess = lhs - rhs;
    for (const auto& t : out) {
      auto& c = cost_[index_.at(t)];
      long long dec = std::min(c, excess);
      c -= dec;
      excess -= dec;
    }
    return true;
  }

  ScopedOps f_;
  std::vector<Tuple> dom_;
  std::vector<long long> cost_;
  std::map<Tuple, std::size_t> index_;
};

struct TermOptions {
  int max_cost = 6;
  double crisp_probability = 0.25;
  double full_probability = 0.25;  // dom is the whole product
  int max_seeds = 3;
};

// A term over scope admitting ops; `planted` (if non-empty) is kept inside dom.
inline vcsp::CostTable<Cost> random_term(Rng& rng, const OperationSystem& ops, const DomainSpec& d,
                                         const std::vector<int>& scope, const Tuple& planted, const TermOptions& opt) {
  std::vector<int> sizes;
  for (int v : scope) sizes.push_back(d.size(v));
  std::set<Tuple> seeds;
  if (coin(rng, opt.full_probability)) {
    vcsp::for_each_tuple(sizes, [&](const Tuple& t) { seeds.insert(t); });
  } else {
    if (!planted.empty()) {
      Tuple t;
      for (int v : scope) t.push_back(planted[static_cast<std::size_t>(v)]);
      seeds.insert(t);
    }
    const int extra = uniform(rng, planted.empty() ? 1 : 0, opt.max_seeds);
    for (int s = 0; s < extra; ++s) {
      Tuple t;
      for (int sz : sizes) t.push_back(uniform(rng, 0, sz - 1));
      seeds.insert(t);
    }
  }
  auto dom_set = close_under(ops, scope, seeds);
  std::vector<Tuple> dom(dom_set.begin(), dom_set.end());
  std::vector<long long> cost(dom.size(), 0);
  if (!coin(rng, opt.crisp_probability)) {
    for (auto& c : cost) c = uniform(rng, 0, opt.max_cost);
  }
  Repairer repair(ops, scope, dom, cost);
  repair.run();
  vcsp::CostTable<Cost> table(sizes, Cost::infinity());
  for (const auto& t : dom) table.set(t, Cost(repair.cost(t)));
  return table;
}

struct InstanceOptions {
  int max_arity = 3;
  int min_terms = 1;
  int max_terms = 8;
  double planted_probability = 0.85;
  std::optional<Tuple> planted;  // overrides the random draw when set
  TermOptions term;
};

inline std::vector<int> random_scope(Rng& rng, int variables, int arity) {
  std::vector<int> all(static_cast<std::size_t>(variables));
  for (int i = 0; i < variables; ++i) all[static_cast<std::size_t>(i)] = i;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(static_cast<std::size_t>(arity));
  return all;
}

inline Instance<Cost> random_instance(Rng& rng, const OperationSystem& ops, const DomainSpec& d,
                                      const InstanceOptions& opt = {}) {
  Instance<Cost> inst(d);
  Tuple planted;
  if (opt.planted) {
    planted = *opt.planted;
  } else if (coin(rng, opt.planted_probability)) {
    for (int i = 0; i < d.variable_count(); ++i) planted.push_back(uniform(rng, 0, d.size(i) - 1));
  }
  const int terms = uniform(rng, opt.min_terms, opt.max_terms);
  for (int t = 0; t < terms; ++t) {
    const int arity = uniform(rng, 1, std::min(opt.max_arity, d.variable_count()));
    auto scope = random_scope(rng, d.variable_count(), arity);
    inst.add_term(random_term(rng, ops, d, scope, planted, opt.term), scope);
  }
  return inst;
}

struct Case {
  Instance<Cost> instance;
  OperationSystem ops;
};

struct Link {
  std::vector<int> scope;
  std::vector<Label> pi;
};

// Links random later variables to earlier ones of equal domain size and returns an assignment
// (drawn with probability planted_probability) that respects every link.
inline std::vector<Link> add_links(Rng& rng, OperationSystem& ops, const DomainSpec& d, double probability,
                                   InstanceOptions& io) {
  std::vector<Link> links;
  const int v = d.variable_count();
  for (int j = 1; j < v; ++j) {
    if (!coin(rng, probability)) continue;
    const int i = uniform(rng, 0, j - 1);
    if (d.size(i) != d.size(j)) continue;
    links.push_back({{i, j}, link_variables(rng, ops, i, j)});
  }
  if (coin(rng, io.planted_probability)) {
    Tuple x;
    for (int i = 0; i < v; ++i) x.push_back(uniform(rng, 0, d.size(i) - 1));
    for (const auto& l : links) {
      x[static_cast<std::size_t>(l.scope[1])] = l.pi[static_cast<std::size_t>(x[static_cast<std::size_t>(l.scope[0])])];
    }
    io.planted = x;
  }
  return links;
}

inline void add_link_terms(Instance<Cost>& inst, const std::vector<Link>& links) {
  for (const auto& l : links) {
    const int di = inst.domains().size(l.scope[0]);
    inst.add_term(vcsp::crisp_table<Cost>({di, di}, [&](const Tuple& x) { return l.pi[static_cast<std::size_t>(x[0])] == x[1]; }),
                  l.scope);
  }
}

// Mixed STP/MJN instance: V <= max_vars, |D_i| <= max_domain, arity <= 3. Some variables are
// relabelled copies of others, tied by a bijection term, so stage 2 grows non-trivial U sets.
inline Case mixed_case(Rng& rng, int max_vars = 6, int max_domain = 4, double link_probability = 0.3) {
  const int v = uniform(rng, 2, max_vars);
  auto d = random_domains(rng, v, max_domain);
  SystemOptions so;
  so.m_probability = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  so.canonical_everywhere = coin(rng, 0.5);
  auto ops = random_system(rng, d, so);
  InstanceOptions io;
  io.max_terms = 2 * v;
  auto links = add_links(rng, ops, d, link_probability, io);
  auto inst = random_instance(rng, ops, d, io);
  add_link_terms(inst, links);
  return Case{inst, ops};
}

inline Case boolean_mjn_case(Rng& rng, int max_vars = 8) {
  const int v = uniform(rng, 2, max_vars);
  DomainSpec d(std::vector<int>(static_cast<std::size_t>(v), 2));
  auto ops = mjn_system(d);
  InstanceOptions io;
  io.max_terms = 2 * v;
  auto links = add_links(rng, ops, d, 0.2, io);
  auto inst = random_instance(rng, ops, d, io);
  add_link_terms(inst, links);
  return Case{inst, ops};
}

// Pairwise submodular cost in numeric label order: random Monge part plus a lattice-closed domain.
inline vcsp::CostTable<Cost> random_submodular_pair(Rng& rng, int di, int dj, bool with_infinity) {
  std::vector<long long> row(static_cast<std::size_t>(di)), col(static_cast<std::size_t>(dj));
  for (auto& r : row) r = uniform(rng, 0, 6);
  for (auto& c : col) c = uniform(rng, 0, 6);
  std::vector<long long> acc(static_cast<std::size_t>(di * dj), 0);
  // prefix sums of non-positive second differences
  for (int a = 1; a < di; ++a)
    for (int b = 1; b < dj; ++b) {
      long long delta = coin(rng, 0.6) ? -uniform(rng, 0, 4) : 0;
      acc[static_cast<std::size_t>(a * dj + b)] = delta + acc[static_cast<std::size_t>((a - 1) * dj + b)] +
                                                  acc[static_cast<std::size_t>(a * dj + b - 1)] -
                                                  acc[static_cast<std::size_t>((a - 1) * dj + b - 1)];
    }
  long long lowest = 0;
  std::vector<long long> v(static_cast<std::size_t>(di * dj));
  for (int a = 0; a < di; ++a)
    for (int b = 0; b < dj; ++b) {
      auto& x = v[static_cast<std::size_t>(a * dj + b)];
      x = row[static_cast<std::size_t>(a)] + col[static_cast<std::size_t>(b)] + acc[static_cast<std::size_t>(a * dj + b)];
      lowest = std::min(lowest, x);
    }
  std::set<Tuple> dom;
  if (with_infinity) {
    std::set<Tuple> seeds;
    const int n = uniform(rng, 1, 3);
    for (int s = 0; s < n; ++s) seeds.insert(Tuple{uniform(rng, 0, di - 1), uniform(rng, 0, dj - 1)});
    for (bool grew = true; grew;) {
      grew = false;
      std::vector<Tuple> cur(seeds.begin(), seeds.end());
      for (const auto& x : cur)
        for (const auto& y : cur) {
          grew = seeds.insert(Tuple{std::min(x[0], y[0]), std::min(x[1], y[1])}).second || grew;
          grew = seeds.insert(Tuple{std::max(x[0], y[0]), std::max(x[1], y[1])}).second || grew;
        }
    }
    dom = std::move(seeds);
  }
  vcsp::CostTable<Cost> t(std::vector<int>{di, dj});
  for (int a = 0; a < di; ++a)
    for (int b = 0; b < dj; ++b) {
      const Tuple x{a, b};
      if (with_infinity && !dom.count(x)) {
        t.set(x, Cost::infinity());
      } else {
        t.set(x, Cost(v[static_cast<std::size_t>(a * dj + b)] - lowest));
      }
    }
  return t;
}

// Binary submodular instance over ordered domains (V <= max_vars, d <= max_domain).
inline Instance<Cost> submodular_instance(Rng& rng, int max_vars = 8, int max_domain = 5) {
  const int v = uniform(rng, 2, max_vars);
  auto d = random_domains(rng, v, max_domain);
  Instance<Cost> inst(d);
  for (int i = 0; i < v; ++i) {
    if (!coin(rng, 0.7)) continue;
    vcsp::CostTable<Cost> u(std::vector<int>{d.size(i)});
    for (Label a = 0; a < d.size(i); ++a) u.set(Tuple{a}, coin(rng, 0.1) ? Cost::infinity() : Cost(uniform(rng, 0, 9)));
    inst.add_term(std::move(u), {i});
  }
  const int terms = uniform(rng, 1, 2 * v);
  for (int t = 0; t < terms; ++t) {
    auto scope = random_scope(rng, v, 2);
    inst.add_term(random_submodular_pair(rng, d.size(scope[0]), d.size(scope[1]), coin(rng, 0.3)), scope);
  }
  return inst;
}

// Crisp instance closed under the operations of a random valid system (hence under its majority).
inline Case majority_closed_crisp(Rng& rng, int max_vars = 6, int max_domain = 4) {
  const int v = uniform(rng, 2, max_vars);
  auto d = random_domains(rng, v, max_domain);
  SystemOptions so;
  so.m_probability = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  auto ops = random_system(rng, d, so);
  InstanceOptions io;
  io.max_terms = 2 * v;
  io.term.crisp_probability = 1.0;
  io.term.full_probability = 0.1;
  auto links = add_links(rng, ops, d, 0.2, io);
  auto inst = random_instance(rng, ops, d, io);
  add_link_terms(inst, links);
  return Case{inst, ops};
}

}  // namespace testgen
