#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "vcsp/bit_matrix.hpp"
#include "vcsp/errors.hpp"
#include "vcsp/instance.hpp"

namespace vcsp {

// d x d table of labels for one variable.
class BinaryTable {
 public:
  BinaryTable() = default;
  explicit BinaryTable(int d) : d_(d), v_(static_cast<std::size_t>(d * d), 0) {}

  template <class F>
  static BinaryTable from_function(int d, F&& fn) {
    BinaryTable t(d);
    for (Label a = 0; a < d; ++a)
      for (Label b = 0; b < d; ++b) t.set(a, b, fn(a, b));
    return t;
  }

  int domain_size() const { return d_; }
  Label operator()(Label a, Label b) const { return v_[static_cast<std::size_t>(a * d_ + b)]; }
  void set(Label a, Label b, Label value) { v_[static_cast<std::size_t>(a * d_ + b)] = value; }

  friend bool operator==(const BinaryTable&, const BinaryTable&) = default;

 private:
  int d_ = 0;
  std::vector<Label> v_;
};

// d x d x d table of labels for one variable.
class TernaryTable {
 public:
  TernaryTable() = default;
  explicit TernaryTable(int d) : d_(d), v_(static_cast<std::size_t>(d * d * d), 0) {}

  template <class F>
  static TernaryTable from_function(int d, F&& fn) {
    TernaryTable t(d);
    for (Label a = 0; a < d; ++a)
      for (Label b = 0; b < d; ++b)
        for (Label c = 0; c < d; ++c) t.set(a, b, c, fn(a, b, c));
    return t;
  }

  int domain_size() const { return d_; }
  Label operator()(Label a, Label b, Label c) const { return v_[static_cast<std::size_t>((a * d_ + b) * d_ + c)]; }
  void set(Label a, Label b, Label c, Label value) { v_[static_cast<std::size_t>((a * d_ + b) * d_ + c)] = value; }

  friend bool operator==(const TernaryTable&, const TernaryTable&) = default;

 private:
  int d_ = 0;
  std::vector<Label> v_;
};

// Per-variable binary pair <meet_i, join_i>.
struct BinaryPair {
  std::vector<BinaryTable> meet;
  std::vector<BinaryTable> join;

  int variable_count() const { return static_cast<int>(meet.size()); }
  friend bool operator==(const BinaryPair&, const BinaryPair&) = default;
};

// Per-variable ternary operation.
using TernaryOperation = std::vector<TernaryTable>;

struct MjnTriple {
  TernaryOperation mj1;
  TernaryOperation mj2;
  TernaryOperation mn3;

  int variable_count() const { return static_cast<int>(mj1.size()); }
  friend bool operator==(const MjnTriple&, const MjnTriple&) = default;
};

// Family M = (M_i) of unordered label pairs {a, b}, a != b, per variable.
class PairSet {
 public:
  PairSet() = default;
  explicit PairSet(const DomainSpec& domains) {
    for (int i = 0; i < domains.variable_count(); ++i) m_.emplace_back(domains.size(i), domains.size(i));
  }

  static PairSet all(const DomainSpec& domains) { return PairSet(domains).complement(); }

  int variable_count() const { return static_cast<int>(m_.size()); }
  int domain_size(int i) const { return m_.at(static_cast<std::size_t>(i)).rows(); }

  bool contains(int i, Label a, Label b) const {
    const auto& m = m_.at(static_cast<std::size_t>(i));
    if (a == b || a < 0 || b < 0 || a >= m.rows() || b >= m.rows()) return false;
    return m.test(a, b);
  }

  void insert(int i, Label a, Label b) {
    auto& m = m_.at(static_cast<std::size_t>(i));
    if (a == b || a < 0 || b < 0 || a >= m.rows() || b >= m.rows()) {
      throw UsageError("pair {" + std::to_string(a) + "," + std::to_string(b) + "} is not a valid pair of variable " +
                       std::to_string(i + 1));
    }
    m.set(a, b);
    m.set(b, a);
  }

  void erase(int i, Label a, Label b) {
    auto& m = m_.at(static_cast<std::size_t>(i));
    if (a == b) return;
    m.set(a, b, false);
    m.set(b, a, false);
  }

  PairSet complement() const {
    PairSet out = *this;
    for (auto& m : out.m_) {
      for (Label a = 0; a < m.rows(); ++a)
        for (Label b = 0; b < m.rows(); ++b) m.set(a, b, a != b && !m.test(a, b));
    }
    return out;
  }

  int count(int i) const { return m_.at(static_cast<std::size_t>(i)).count() / 2; }
  int total() const {
    int n = 0;
    for (int i = 0; i < variable_count(); ++i) n += count(i);
    return n;
  }

  // Pairs of variable i as (a, b) with a < b, lexicographic.
  std::vector<std::pair<Label, Label>> pairs(int i) const {
    std::vector<std::pair<Label, Label>> out;
    const auto& m = m_.at(static_cast<std::size_t>(i));
    for (Label a = 0; a < m.rows(); ++a)
      for (Label b = a + 1; b < m.rows(); ++b)
        if (m.test(a, b)) out.emplace_back(a, b);
    return out;
  }

  friend bool operator==(const PairSet&, const PairSet&) = default;

 private:
  std::vector<BitMatrix> m_;
};

struct OperationSystem {
  BinaryPair pair;
  MjnTriple triple;
  PairSet m;

  friend bool operator==(const OperationSystem&, const OperationSystem&) = default;
};

// ---- standard operations -------------------------------------------------------------------

inline BinaryPair min_max_pair(const DomainSpec& domains) {
  BinaryPair p;
  for (int i = 0; i < domains.variable_count(); ++i) {
    int d = domains.size(i);
    p.meet.push_back(BinaryTable::from_function(d, [](Label a, Label b) { return std::min(a, b); }));
    p.join.push_back(BinaryTable::from_function(d, [](Label a, Label b) { return std::max(a, b); }));
  }
  return p;
}

// meet = first argument, join = second argument.
inline BinaryPair projection_pair(const DomainSpec& domains) {
  BinaryPair p;
  for (int i = 0; i < domains.variable_count(); ++i) {
    int d = domains.size(i);
    p.meet.push_back(BinaryTable::from_function(d, [](Label a, Label) { return a; }));
    p.join.push_back(BinaryTable::from_function(d, [](Label, Label b) { return b; }));
  }
  return p;
}

inline Label canonical_mj1(Label x, Label y, Label z) { return y == z ? y : x; }
inline Label canonical_mj2(Label x, Label y, Label z) { return x == z ? x : y; }
inline Label canonical_mn3(Label x, Label y, Label z) {
  if (y == z && z != x) return x;
  if (x == z && z != y) return y;
  return z;
}

inline MjnTriple canonical_mjn(const DomainSpec& domains) {
  MjnTriple t;
  for (int i = 0; i < domains.variable_count(); ++i) {
    int d = domains.size(i);
    t.mj1.push_back(TernaryTable::from_function(d, canonical_mj1));
    t.mj2.push_back(TernaryTable::from_function(d, canonical_mj2));
    t.mn3.push_back(TernaryTable::from_function(d, canonical_mn3));
  }
  return t;
}

// ---- witnesses ---------------------------------------------------------------------------

struct PairWitness {
  int variable = 0;
  Label a = 0;
  Label b = 0;
  std::string reason;

  std::string describe() const {
    return "variable " + std::to_string(variable + 1) + ", labels (" + std::to_string(a) + "," + std::to_string(b) +
           "): " + reason;
  }
  friend bool operator==(const PairWitness&, const PairWitness&) = default;
};

struct TripleWitness {
  int variable = 0;
  Label a = 0;
  Label b = 0;
  Label c = 0;
  std::string reason;

  std::string describe() const {
    return "variable " + std::to_string(variable + 1) + ", labels (" + std::to_string(a) + "," + std::to_string(b) +
           "," + std::to_string(c) + "): " + reason;
  }
  friend bool operator==(const TripleWitness&, const TripleWitness&) = default;
};

// ok() iff no violation; violation is the lexicographically smallest offender.
template <class W>
struct Verdict {
  std::optional<W> violation;

  bool ok() const { return !violation.has_value(); }
  explicit operator bool() const { return ok(); }
};

inline std::string tuple_to_string(std::span<const Label> t) {
  std::string s = "(";
  for (std::size_t p = 0; p < t.size(); ++p) {
    if (p) s += ",";
    s += std::to_string(t[p]);
  }
  return s + ")";
}

// ---- shape checks ----------------------------------------------------------------------------

inline void require_shape(const BinaryPair& pair, const DomainSpec& domains) {
  if (pair.meet.size() != pair.join.size() || pair.variable_count() != domains.variable_count()) {
    throw UsageError("binary pair covers " + std::to_string(pair.variable_count()) + " variables, expected " +
                     std::to_string(domains.variable_count()));
  }
  for (int i = 0; i < domains.variable_count(); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (pair.meet[ui].domain_size() != domains.size(i) || pair.join[ui].domain_size() != domains.size(i)) {
      throw UsageError("binary pair table of variable " + std::to_string(i + 1) + " has the wrong size");
    }
  }
}

inline void require_shape(const TernaryOperation& op, const DomainSpec& domains) {
  if (static_cast<int>(op.size()) != domains.variable_count()) {
    throw UsageError("ternary operation covers " + std::to_string(op.size()) + " variables, expected " +
                     std::to_string(domains.variable_count()));
  }
  for (int i = 0; i < domains.variable_count(); ++i) {
    if (op[static_cast<std::size_t>(i)].domain_size() != domains.size(i)) {
      throw UsageError("ternary table of variable " + std::to_string(i + 1) + " has the wrong size");
    }
  }
}

inline void require_shape(const MjnTriple& t, const DomainSpec& domains) {
  require_shape(t.mj1, domains);
  require_shape(t.mj2, domains);
  require_shape(t.mn3, domains);
}

inline DomainSpec domains_of(const BinaryPair& pair) {
  std::vector<int> sizes;
  for (const auto& t : pair.meet) sizes.push_back(t.domain_size());
  return DomainSpec(std::move(sizes));
}

// ---- pair algebra ------------------------------------------------------------------------

inline std::pair<Assignment, Assignment> apply_pair(const BinaryPair& pair, std::span<const Label> x,
                                                    std::span<const Label> y) {
  if (x.size() != y.size() || static_cast<int>(x.size()) != pair.variable_count()) {
    throw UsageError("apply_pair: shape mismatch");
  }
  Assignment lo(x.size()), hi(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    lo[i] = pair.meet[i](x[i], y[i]);
    hi[i] = pair.join[i](x[i], y[i]);
  }
  return {lo, hi};
}

inline Assignment apply_ternary(const TernaryOperation& op, std::span<const Label> x, std::span<const Label> y,
                                std::span<const Label> z) {
  if (x.size() != y.size() || x.size() != z.size() || x.size() != op.size()) {
    throw UsageError("apply_ternary: shape mismatch");
  }
  Assignment out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = op[i](x[i], y[i], z[i]);
  return out;
}

inline std::optional<PairWitness> find_nonconservative(const BinaryPair& pair) {
  for (int i = 0; i < pair.variable_count(); ++i) {
    const auto& meet = pair.meet[static_cast<std::size_t>(i)];
    const auto& join = pair.join[static_cast<std::size_t>(i)];
    for (Label a = 0; a < meet.domain_size(); ++a) {
      for (Label b = 0; b < meet.domain_size(); ++b) {
        Label lo = meet(a, b), hi = join(a, b);
        bool ok = (lo == a && hi == b) || (lo == b && hi == a);
        if (!ok) {
          return PairWitness{i, a, b,
                             "not conservative: meet=" + std::to_string(lo) + " join=" + std::to_string(hi)};
        }
      }
    }
  }
  return std::nullopt;
}

struct PairClass {
  Label a;
  Label b;
  bool commutative;
  friend bool operator==(const PairClass&, const PairClass&) = default;
};

// Commutativity of every pair {a, b} (a < b) of variable i.
inline std::vector<PairClass> classify_pair(const BinaryPair& pair, int i) {
  if (i < 0 || i >= pair.variable_count()) throw UsageError("classify_pair: variable out of range");
  const auto& meet = pair.meet[static_cast<std::size_t>(i)];
  const auto& join = pair.join[static_cast<std::size_t>(i)];
  const int d = meet.domain_size();
  for (Label a = 0; a < d; ++a) {
    for (Label b = 0; b < d; ++b) {
      Label lo = meet(a, b), hi = join(a, b);
      if (!((lo == a && hi == b) || (lo == b && hi == a))) {
        throw ValidationError("non-conservative pair at " + PairWitness{i, a, b, "not conservative"}.describe());
      }
    }
  }
  std::vector<PairClass> out;
  for (Label a = 0; a < d; ++a)
    for (Label b = a + 1; b < d; ++b)
      out.push_back(PairClass{a, b, meet(a, b) == meet(b, a) && join(a, b) == join(b, a)});
  return out;
}

inline bool is_commutative_on(const BinaryPair& pair, int i, Label a, Label b) {
  const auto& meet = pair.meet[static_cast<std::size_t>(i)];
  const auto& join = pair.join[static_cast<std::size_t>(i)];
  return meet(a, b) == meet(b, a) && join(a, b) == join(b, a);
}

// Conservative on every P_i and commutative on every M_i.
inline Verdict<PairWitness> is_stp_on(const BinaryPair& pair, const PairSet& m) {
  if (pair.variable_count() != m.variable_count()) throw UsageError("is_stp_on: shape mismatch");
  if (auto w = find_nonconservative(pair)) return {w};
  for (int i = 0; i < m.variable_count(); ++i) {
    if (m.domain_size(i) != pair.meet[static_cast<std::size_t>(i)].domain_size()) {
      throw UsageError("is_stp_on: domain size mismatch");
    }
    for (auto [a, b] : m.pairs(i)) {
      if (!is_commutative_on(pair, i, a, b)) return {PairWitness{i, a, b, "pair in M is not commutative"}};
    }
  }
  return {};
}

// Conservative components; majority/minority behaviour on every triple whose value set is a pair of mbar.
inline Verdict<TripleWitness> is_mjn_on(const MjnTriple& triple, const PairSet& mbar) {
  const int n = triple.variable_count();
  if (static_cast<int>(triple.mj2.size()) != n || static_cast<int>(triple.mn3.size()) != n ||
      mbar.variable_count() != n) {
    throw UsageError("is_mjn_on: shape mismatch");
  }
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const auto& f1 = triple.mj1[ui];
    const auto& f2 = triple.mj2[ui];
    const auto& f3 = triple.mn3[ui];
    const int d = f1.domain_size();
    if (f2.domain_size() != d || f3.domain_size() != d || mbar.domain_size(i) != d) {
      throw UsageError("is_mjn_on: domain size mismatch");
    }
    for (Label a = 0; a < d; ++a) {
      for (Label b = 0; b < d; ++b) {
        for (Label c = 0; c < d; ++c) {
          auto member = [&](Label v) { return v == a || v == b || v == c; };
          Label v1 = f1(a, b, c), v2 = f2(a, b, c), v3 = f3(a, b, c);
          if (!member(v1)) return {TripleWitness{i, a, b, c, "mj1 not conservative"}};
          if (!member(v2)) return {TripleWitness{i, a, b, c, "mj2 not conservative"}};
          if (!member(v3)) return {TripleWitness{i, a, b, c, "mn3 not conservative"}};
          bool two_values = !(a == b && b == c) && (a == b || b == c || a == c);
          if (!two_values) continue;
          Label majority = (a == b || a == c) ? a : b;
          Label minority = (a == b) ? c : (a == c ? b : a);
          if (!mbar.contains(i, majority, minority)) continue;
          if (v1 != majority) return {TripleWitness{i, a, b, c, "mj1 does not return the majority label"}};
          if (v2 != majority) return {TripleWitness{i, a, b, c, "mj2 does not return the majority label"}};
          if (v3 != minority) return {TripleWitness{i, a, b, c, "mn3 does not return the minority label"}};
        }
      }
    }
  }
  return {};
}

// Moves every pair of mbar on which the pair is commutative into M.
inline OperationSystem normalize_commutative(OperationSystem ops) {
  PairSet mbar = ops.m.complement();
  for (int i = 0; i < mbar.variable_count(); ++i) {
    for (auto [a, b] : mbar.pairs(i)) {
      if (is_commutative_on(ops.pair, i, a, b)) ops.m.insert(i, a, b);
    }
  }
  return ops;
}

// STP on M and MJN on the complement of M; returns a description of the first violation.
inline std::optional<std::string> validate_operation_system(const OperationSystem& ops) {
  if (auto v = is_stp_on(ops.pair, ops.m); !v) return "STP on M violated at " + v.violation->describe();
  if (auto v = is_mjn_on(ops.triple, ops.m.complement()); !v) {
    return "MJN on complement of M violated at " + v.violation->describe();
  }
  return std::nullopt;
}

// ---- restriction to a scope ----------------------------------------------------------------

inline BinaryPair restrict_pair(const BinaryPair& pair, std::span<const int> scope) {
  BinaryPair out;
  for (int v : scope) {
    out.meet.push_back(pair.meet.at(static_cast<std::size_t>(v)));
    out.join.push_back(pair.join.at(static_cast<std::size_t>(v)));
  }
  return out;
}

inline TernaryOperation restrict_operation(const TernaryOperation& op, std::span<const int> scope) {
  TernaryOperation out;
  for (int v : scope) out.push_back(op.at(static_cast<std::size_t>(v)));
  return out;
}

inline MjnTriple restrict_triple(const MjnTriple& t, std::span<const int> scope) {
  return MjnTriple{restrict_operation(t.mj1, scope), restrict_operation(t.mj2, scope),
                   restrict_operation(t.mn3, scope)};
}

// ---- multimorphism checks ------------------------------------------------------------------

template <class C>
struct BinaryViolation {
  Tuple x;
  Tuple y;
  C lhs;
  C rhs;

  std::string describe() const {
    return "x=" + tuple_to_string(x) + " y=" + tuple_to_string(y) + ": f(x meet y)+f(x join y)=" + lhs.to_string() +
           " > f(x)+f(y)=" + rhs.to_string();
  }
};

template <class C>
struct TernaryViolation {
  Tuple x;
  Tuple y;
  Tuple z;
  C lhs;
  C rhs;

  std::string describe() const {
    return "x=" + tuple_to_string(x) + " y=" + tuple_to_string(y) + " z=" + tuple_to_string(z) +
           ": sum of images=" + lhs.to_string() + " > f(x)+f(y)+f(z)=" + rhs.to_string();
  }
};

namespace detail {

inline void require_table_shape(std::span<const int> sizes, std::size_t components,
                                const std::function<int(std::size_t)>& component_size) {
  if (components != sizes.size()) throw UsageError("operation does not cover the table's arguments");
  for (std::size_t p = 0; p < sizes.size(); ++p) {
    if (component_size(p) != sizes[p]) throw UsageError("operation domain differs from table argument domain");
  }
}

}  // namespace detail

// f(x meet y) + f(x join y) <= f(x) + f(y) for all x, y in dom f. The pair's components are the
// table's argument positions.
template <class C>
Verdict<BinaryViolation<C>> check_binary_multimorphism(const CostTable<C>& f, const BinaryPair& pair) {
  detail::require_table_shape(f.sizes(), pair.meet.size(), [&](std::size_t p) { return pair.meet[p].domain_size(); });
  const auto dom = f.dom_indices();
  const auto strides = f.strides();
  const std::size_t m = f.sizes().size();
  std::vector<Tuple> tuples;
  tuples.reserve(dom.size());
  for (auto k : dom) tuples.push_back(f.tuple_at(k));
  for (std::size_t ix = 0; ix < dom.size(); ++ix) {
    const Tuple& x = tuples[ix];
    for (std::size_t iy = 0; iy < dom.size(); ++iy) {
      const Tuple& y = tuples[iy];
      std::size_t lo = 0, hi = 0;
      for (std::size_t p = 0; p < m; ++p) {
        lo += strides[p] * static_cast<std::size_t>(pair.meet[p](x[p], y[p]));
        hi += strides[p] * static_cast<std::size_t>(pair.join[p](x[p], y[p]));
      }
      C lhs = f.at(lo) + f.at(hi);
      C rhs = f.at(dom[ix]) + f.at(dom[iy]);
      if (!cost_leq(lhs, rhs)) return {BinaryViolation<C>{x, y, lhs, rhs}};
    }
  }
  return {};
}

template <class C>
Verdict<TernaryViolation<C>> check_ternary_multimorphism(const CostTable<C>& f, const MjnTriple& triple) {
  detail::require_table_shape(f.sizes(), triple.mj1.size(), [&](std::size_t p) { return triple.mj1[p].domain_size(); });
  const auto dom = f.dom_indices();
  const auto strides = f.strides();
  const std::size_t m = f.sizes().size();
  std::vector<Tuple> tuples;
  tuples.reserve(dom.size());
  for (auto k : dom) tuples.push_back(f.tuple_at(k));
  for (std::size_t ix = 0; ix < dom.size(); ++ix) {
    const Tuple& x = tuples[ix];
    for (std::size_t iy = 0; iy < dom.size(); ++iy) {
      const Tuple& y = tuples[iy];
      C fxy = f.at(dom[ix]) + f.at(dom[iy]);
      for (std::size_t iz = 0; iz < dom.size(); ++iz) {
        const Tuple& z = tuples[iz];
        std::size_t k1 = 0, k2 = 0, k3 = 0;
        for (std::size_t p = 0; p < m; ++p) {
          k1 += strides[p] * static_cast<std::size_t>(triple.mj1[p](x[p], y[p], z[p]));
          k2 += strides[p] * static_cast<std::size_t>(triple.mj2[p](x[p], y[p], z[p]));
          k3 += strides[p] * static_cast<std::size_t>(triple.mn3[p](x[p], y[p], z[p]));
        }
        C lhs = f.at(k1) + f.at(k2) + f.at(k3);
        C rhs = fxy + f.at(dom[iz]);
        if (!cost_leq(lhs, rhs)) return {TernaryViolation<C>{x, y, z, lhs, rhs}};
      }
    }
  }
  return {};
}

// ---- polymorphisms -------------------------------------------------------------------------

struct PolymorphismViolation {
  std::vector<Tuple> arguments;  // k tuples of the relation whose image leaves it
  Tuple image;

  std::string describe() const {
    std::string s;
    for (const auto& t : arguments) s += tuple_to_string(t) + " ";
    return s + "-> " + tuple_to_string(image);
  }
};

// Closure of dom rel under the k-ary componentwise operation op(position, args).
template <class C, class Op>
Verdict<PolymorphismViolation> check_polymorphism(const CostTable<C>& rel, int k, Op&& op) {
  if (k < 1) throw UsageError("check_polymorphism: arity must be positive");
  const auto dom = rel.dom();
  const std::size_t m = rel.sizes().size();
  if (dom.empty()) return {};
  std::vector<std::size_t> pick(static_cast<std::size_t>(k), 0);
  std::vector<Label> args(static_cast<std::size_t>(k));
  Tuple img(m);
  while (true) {
    for (std::size_t p = 0; p < m; ++p) {
      for (std::size_t a = 0; a < pick.size(); ++a) args[a] = dom[pick[a]][p];
      img[p] = op(p, std::span<const Label>(args));
    }
    if (rel(img).is_infinite()) {
      PolymorphismViolation v;
      for (auto q : pick) v.arguments.push_back(dom[q]);
      v.image = img;
      return {v};
    }
    std::size_t a = pick.size();
    while (a > 0) {
      --a;
      if (++pick[a] < dom.size()) break;
      pick[a] = 0;
      if (a == 0) return {};
    }
  }
}

// Ternary operation whose components are the table's argument positions.
template <class C>
Verdict<PolymorphismViolation> check_polymorphism(const CostTable<C>& rel, const TernaryOperation& op) {
  detail::require_table_shape(rel.sizes(), op.size(), [&](std::size_t p) { return op[p].domain_size(); });
  return check_polymorphism(rel, 3, [&](std::size_t p, std::span<const Label> a) { return op[p](a[0], a[1], a[2]); });
}

// Binary operation (for example meet or join) whose components are the table's argument positions.
template <class C>
Verdict<PolymorphismViolation> check_polymorphism(const CostTable<C>& rel, const std::vector<BinaryTable>& op) {
  detail::require_table_shape(rel.sizes(), op.size(), [&](std::size_t p) { return op[p].domain_size(); });
  return check_polymorphism(rel, 2, [&](std::size_t p, std::span<const Label> a) { return op[p](a[0], a[1]); });
}

// Binary relation over (D_i, D_j) against the two per-variable components.
inline Verdict<PolymorphismViolation> check_polymorphism(const BitMatrix& rel, const TernaryTable& fi,
                                                         const TernaryTable& fj) {
  return check_polymorphism(crisp_table<Cost>(rel), TernaryOperation{fi, fj});
}

// ---- majority construction -----------------------------------------------------------------

inline std::optional<TripleWitness> find_majority_violation(const TernaryOperation& op) {
  for (int i = 0; i < static_cast<int>(op.size()); ++i) {
    const auto& t = op[static_cast<std::size_t>(i)];
    for (Label x = 0; x < t.domain_size(); ++x) {
      for (Label y = 0; y < t.domain_size(); ++y) {
        if (t(x, x, y) != x) return TripleWitness{i, x, x, y, "not a majority"};
        if (t(x, y, x) != x) return TripleWitness{i, x, y, x, "not a majority"};
        if (t(y, x, x) != x) return TripleWitness{i, y, x, x, "not a majority"};
      }
    }
  }
  return std::nullopt;
}

// mu_bar(x,y,z) = [(y join x) meet (y join z)] meet (x join z);
// mu(x,y,z) = mj1(mu_bar(x,y,z), mu_bar(y,z,x), mu_bar(z,x,y)).
inline TernaryOperation build_majority(const BinaryPair& pair, const MjnTriple& triple) {
  if (auto w = find_nonconservative(pair)) throw ValidationError("build_majority: " + w->describe());
  if (triple.variable_count() != pair.variable_count()) throw UsageError("build_majority: shape mismatch");
  TernaryOperation mu;
  for (int i = 0; i < pair.variable_count(); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const auto& meet = pair.meet[ui];
    const auto& join = pair.join[ui];
    const auto& mj1 = triple.mj1[ui];
    if (mj1.domain_size() != meet.domain_size()) throw UsageError("build_majority: domain size mismatch");
    auto bar = [&](Label x, Label y, Label z) { return meet(meet(join(y, x), join(y, z)), join(x, z)); };
    mu.push_back(TernaryTable::from_function(meet.domain_size(), [&](Label x, Label y, Label z) {
      return mj1(bar(x, y, z), bar(y, z, x), bar(z, x, y));
    }));
  }
  if (auto w = find_majority_violation(mu)) {
    throw InternalError("constructed operation is not a majority operation at " + w->describe() +
                        " (the input operation system is invalid)");
  }
  return mu;
}

// ---- whole-instance checks -----------------------------------------------------------------

template <class W>
struct TermVerdict {
  std::optional<std::size_t> term;  // index of the first failing term
  std::optional<W> violation;

  bool ok() const { return !term.has_value(); }
  explicit operator bool() const { return ok(); }
};

template <class C>
TermVerdict<BinaryViolation<C>> check_instance_binary(const Instance<C>& inst, const BinaryPair& pair) {
  require_shape(pair, inst.domains());
  for (std::size_t t = 0; t < inst.terms().size(); ++t) {
    const auto& term = inst.terms()[t];
    if (auto v = check_binary_multimorphism(term.table, restrict_pair(pair, term.scope)); !v) return {t, v.violation};
  }
  return {};
}

template <class C>
TermVerdict<TernaryViolation<C>> check_instance_ternary(const Instance<C>& inst, const MjnTriple& triple) {
  require_shape(triple, inst.domains());
  for (std::size_t t = 0; t < inst.terms().size(); ++t) {
    const auto& term = inst.terms()[t];
    if (auto v = check_ternary_multimorphism(term.table, restrict_triple(triple, term.scope)); !v) {
      return {t, v.violation};
    }
  }
  return {};
}

template <class C>
TermVerdict<PolymorphismViolation> check_instance_polymorphism(const Instance<C>& inst, const TernaryOperation& op) {
  require_shape(op, inst.domains());
  for (std::size_t t = 0; t < inst.terms().size(); ++t) {
    const auto& term = inst.terms()[t];
    if (auto v = check_polymorphism(term.table, restrict_operation(op, term.scope)); !v) return {t, v.violation};
  }
  return {};
}

// The binary multimorphism inequality over dom Cost_I itself, to cross-check the per-term route.
template <class C>
Verdict<BinaryViolation<C>> check_global_binary(const Instance<C>& inst, const BinaryPair& pair,
                                                std::uint64_t cap = kDefaultEnumerationCap) {
  require_shape(pair, inst.domains());
  auto dom = feasible_assignments(inst, cap);
  require_within_cap(static_cast<std::uint64_t>(dom.size()) * dom.size(), cap);
  for (const auto& x : dom) {
    C fx = evaluate(inst, x);
    for (const auto& y : dom) {
      auto [lo, hi] = apply_pair(pair, x, y);
      C lhs = evaluate(inst, lo) + evaluate(inst, hi);
      C rhs = fx + evaluate(inst, y);
      if (!cost_leq(lhs, rhs)) return {BinaryViolation<C>{x, y, lhs, rhs}};
    }
  }
  return {};
}

}  // namespace vcsp
