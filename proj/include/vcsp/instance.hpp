#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vcsp/bit_matrix.hpp"
#include "vcsp/errors.hpp"
#include "vcsp/ext_cost.hpp"

namespace vcsp {

using Assignment = std::vector<Label>;
using Tuple = std::vector<Label>;

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

// Product of sizes, saturating at uint64 max.
inline std::uint64_t tuple_count(std::span<const int> sizes) {
  std::uint64_t n = 1;
  for (int s : sizes) {
    auto u = static_cast<std::uint64_t>(s);
    if (u != 0 && n > std::numeric_limits<std::uint64_t>::max() / u) return std::numeric_limits<std::uint64_t>::max();
    n *= u;
  }
  return n;
}

inline void require_within_cap(std::uint64_t requested, std::uint64_t cap) {
  if (requested > cap) throw CapExceeded(requested, cap);
}

// Calls fn(tuple) for every tuple of the product, lexicographically (last position fastest).
template <class F>
void for_each_tuple(std::span<const int> sizes, F&& fn) {
  for (int s : sizes) if (s <= 0) return;
  Tuple t(sizes.size(), 0);
  while (true) {
    fn(static_cast<const Tuple&>(t));
    std::size_t p = t.size();
    while (p > 0) {
      --p;
      if (++t[p] < sizes[p]) break;
      t[p] = 0;
      if (p == 0) return;
    }
    if (t.empty()) return;
  }
}

class DomainSpec {
 public:
  DomainSpec() = default;
  explicit DomainSpec(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    for (std::size_t i = 0; i < sizes_.size(); ++i) {
      if (sizes_[i] < 1 || sizes_[i] > kMaxDomainSize) {
        throw UsageError("domain of variable " + std::to_string(i + 1) + " has size " +
                         std::to_string(sizes_[i]) + "; sizes must lie in 1.." + std::to_string(kMaxDomainSize));
      }
    }
  }

  int variable_count() const { return static_cast<int>(sizes_.size()); }
  int size(int i) const { return sizes_.at(static_cast<std::size_t>(i)); }
  std::span<const int> sizes() const { return sizes_; }
  std::uint64_t assignment_count() const { return tuple_count(sizes_); }

  bool conforms(std::span<const Label> x) const {
    if (x.size() != sizes_.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) if (x[i] < 0 || x[i] >= sizes_[i]) return false;
    return true;
  }

  friend bool operator==(const DomainSpec&, const DomainSpec&) = default;

 private:
  std::vector<int> sizes_;
};

// Explicit m-ary table of extended costs, row-major (last argument fastest).
template <class C>
class CostTable {
 public:
  using cost_type = C;

  CostTable() = default;
  explicit CostTable(std::vector<int> sizes, C fill = C{}) : sizes_(std::move(sizes)) {
    if (sizes_.empty()) throw UsageError("cost table arity must be at least 1");
    strides_.assign(sizes_.size(), 1);
    for (std::size_t p = sizes_.size(); p-- > 1;) strides_[p - 1] = strides_[p] * static_cast<std::size_t>(sizes_[p]);
    for (int s : sizes_) {
      if (s < 1 || s > kMaxDomainSize) throw UsageError("cost table argument domain size " + std::to_string(s));
    }
    entries_.assign(strides_[0] * static_cast<std::size_t>(sizes_[0]), fill);
  }

  template <class F>
  static CostTable from_function(std::vector<int> sizes, F&& fn) {
    CostTable t(std::move(sizes));
    std::size_t k = 0;
    for_each_tuple(t.sizes(), [&](const Tuple& x) { t.entries_[k++] = fn(x); });
    return t;
  }

  int arity() const { return static_cast<int>(sizes_.size()); }
  std::span<const int> sizes() const { return sizes_; }
  std::size_t size() const { return entries_.size(); }
  std::span<const std::size_t> strides() const { return strides_; }

  std::size_t index(std::span<const Label> x) const {
    if (x.size() != sizes_.size()) throw UsageError("tuple arity does not match table arity");
    std::size_t k = 0;
    for (std::size_t p = 0; p < x.size(); ++p) {
      if (x[p] < 0 || x[p] >= sizes_[p]) throw UsageError("label out of range in table lookup");
      k += strides_[p] * static_cast<std::size_t>(x[p]);
    }
    return k;
  }

  Tuple tuple_at(std::size_t k) const {
    Tuple x(sizes_.size());
    for (std::size_t p = 0; p < x.size(); ++p) {
      x[p] = static_cast<Label>(k / strides_[p]);
      k %= strides_[p];
    }
    return x;
  }

  const C& operator()(std::span<const Label> x) const { return entries_[index(x)]; }
  const C& at(std::size_t k) const { return entries_.at(k); }
  void set(std::span<const Label> x, C v) { entries_[index(x)] = std::move(v); }
  void set_at(std::size_t k, C v) { entries_.at(k) = std::move(v); }
  std::span<const C> entries() const { return entries_; }

  // dom f in lexicographic order.
  std::vector<Tuple> dom() const {
    std::vector<Tuple> out;
    for (std::size_t k = 0; k < entries_.size(); ++k) if (entries_[k].is_finite()) out.push_back(tuple_at(k));
    return out;
  }
  std::vector<std::size_t> dom_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < entries_.size(); ++k) if (entries_[k].is_finite()) out.push_back(k);
    return out;
  }

  bool is_crisp() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const C& c) { return c.is_infinite() || c == C{}; });
  }

  bool operator==(const CostTable& o) const { return sizes_ == o.sizes_ && entries_ == o.entries_; }

 private:
  std::vector<int> sizes_;
  std::vector<std::size_t> strides_;
  std::vector<C> entries_;
};

template <class C>
CostTable<C> crisp_table(std::vector<int> sizes, const std::function<bool(const Tuple&)>& member) {
  return CostTable<C>::from_function(std::move(sizes), [&](const Tuple& x) { return member(x) ? C{} : C::infinity(); });
}

template <class C>
CostTable<C> crisp_table(const BitMatrix& rel) {
  return crisp_table<C>({rel.rows(), rel.cols()}, [&](const Tuple& x) { return rel.test(x[0], x[1]); });
}

template <class C>
struct Term {
  CostTable<C> table;
  std::vector<int> scope;  // 0-based variable indices

  friend bool operator==(const Term&, const Term&) = default;
};

template <class C>
class Instance {
 public:
  using cost_type = C;

  Instance() = default;
  explicit Instance(DomainSpec domains, std::vector<Term<C>> terms = {}) : domains_(std::move(domains)) {
    for (auto& t : terms) add_term(std::move(t.table), std::move(t.scope));
  }

  const DomainSpec& domains() const { return domains_; }
  int variable_count() const { return domains_.variable_count(); }
  const std::vector<Term<C>>& terms() const { return terms_; }

  void add_term(CostTable<C> table, std::vector<int> scope) {
    if (scope.empty()) throw UsageError("terms must have at least one variable");
    if (static_cast<int>(scope.size()) != table.arity()) {
      throw UsageError("term scope length " + std::to_string(scope.size()) + " differs from table arity " +
                       std::to_string(table.arity()));
    }
    for (std::size_t p = 0; p < scope.size(); ++p) {
      int v = scope[p];
      if (v < 0 || v >= domains_.variable_count()) {
        throw UsageError("term scope variable " + std::to_string(v + 1) + " does not exist");
      }
      if (table.sizes()[p] != domains_.size(v)) {
        throw UsageError("term argument " + std::to_string(p + 1) + " has domain size " +
                         std::to_string(table.sizes()[p]) + " but variable " + std::to_string(v + 1) +
                         " has " + std::to_string(domains_.size(v)));
      }
    }
    terms_.push_back(Term<C>{std::move(table), std::move(scope)});
  }

  friend bool operator==(const Instance&, const Instance&) = default;

 private:
  DomainSpec domains_;
  std::vector<Term<C>> terms_;
};

template <class C>
std::size_t term_index(const Term<C>& term, std::span<const Label> x) {
  std::size_t k = 0;
  auto strides = term.table.strides();
  for (std::size_t p = 0; p < term.scope.size(); ++p) {
    k += strides[p] * static_cast<std::size_t>(x[static_cast<std::size_t>(term.scope[p])]);
  }
  return k;
}

template <class C>
C evaluate(const Instance<C>& inst, std::span<const Label> x) {
  if (!inst.domains().conforms(x)) throw UsageError("assignment does not conform to the instance domains");
  C total{};
  for (const auto& t : inst.terms()) {
    total += t.table.at(term_index(t, x));
    if (total.is_infinite()) break;
  }
  return total;
}

namespace detail {

// Depth-first enumeration of assignments in lexicographic order. Terms are summed as soon as their
// last scope variable is fixed; branches reaching infinity are pruned. visit(x, cost) sees only
// assignments of finite cost.
template <class C, class Visit>
void search_finite(const Instance<C>& inst, Visit&& visit) {
  const int n = inst.variable_count();
  std::vector<std::vector<const Term<C>*>> closing(static_cast<std::size_t>(std::max(n, 1)));
  for (const auto& t : inst.terms()) {
    int last = *std::max_element(t.scope.begin(), t.scope.end());
    closing[static_cast<std::size_t>(last)].push_back(&t);
  }
  if (n == 0) {
    visit(Assignment{}, C{});
    return;
  }
  Assignment x(static_cast<std::size_t>(n), 0);
  std::vector<C> partial(static_cast<std::size_t>(n) + 1, C{});
  std::function<void(int)> rec = [&](int v) {
    const auto uv = static_cast<std::size_t>(v);
    for (Label a = 0; a < inst.domains().size(v); ++a) {
      x[uv] = a;
      C c = partial[uv];
      for (const Term<C>* t : closing[uv]) {
        c += t->table.at(term_index(*t, x));
        if (c.is_infinite()) break;
      }
      if (c.is_infinite()) continue;
      if (v + 1 == n) {
        visit(static_cast<const Assignment&>(x), c);
      } else {
        partial[uv + 1] = c;
        rec(v + 1);
      }
    }
  };
  rec(0);
}

}  // namespace detail

template <class C>
std::vector<Assignment> feasible_assignments(const Instance<C>& inst, std::uint64_t cap = kDefaultEnumerationCap) {
  require_within_cap(inst.domains().assignment_count(), cap);
  std::vector<Assignment> out;
  detail::search_finite(inst, [&](const Assignment& x, const C&) { out.push_back(x); });
  return out;
}

// Projection of dom Cost_I onto one variable.
template <class C>
LabelSet project(const Instance<C>& inst, int i, std::uint64_t cap = kDefaultEnumerationCap) {
  if (i < 0 || i >= inst.variable_count()) throw UsageError("project: variable out of range");
  require_within_cap(inst.domains().assignment_count(), cap);
  LabelSet s(inst.domains().size(i));
  detail::search_finite(inst, [&](const Assignment& x, const C&) { s.insert(x[static_cast<std::size_t>(i)]); });
  return s;
}

// Projection of dom Cost_I onto the ordered pair (i, j).
template <class C>
BitMatrix project(const Instance<C>& inst, int i, int j, std::uint64_t cap = kDefaultEnumerationCap) {
  if (i < 0 || j < 0 || i >= inst.variable_count() || j >= inst.variable_count()) {
    throw UsageError("project: variable out of range");
  }
  require_within_cap(inst.domains().assignment_count(), cap);
  BitMatrix m(inst.domains().size(i), inst.domains().size(j));
  detail::search_finite(inst, [&](const Assignment& x, const C&) {
    m.set(x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(j)]);
  });
  return m;
}

// Equivalent instance in which no term mentions a variable twice: repeated positions are merged
// into one argument and the table restricted to its diagonal.
template <class C>
Instance<C> canonicalize_scopes(const Instance<C>& inst) {
  Instance<C> out(inst.domains());
  for (const auto& t : inst.terms()) {
    std::vector<int> scope;
    std::vector<std::size_t> position_of(t.scope.size());
    for (std::size_t p = 0; p < t.scope.size(); ++p) {
      auto it = std::find(scope.begin(), scope.end(), t.scope[p]);
      position_of[p] = static_cast<std::size_t>(it - scope.begin());
      if (it == scope.end()) scope.push_back(t.scope[p]);
    }
    if (scope.size() == t.scope.size()) {
      out.add_term(t.table, t.scope);
      continue;
    }
    std::vector<int> sizes;
    for (int v : scope) sizes.push_back(inst.domains().size(v));
    Tuple full(t.scope.size());
    auto table = CostTable<C>::from_function(sizes, [&](const Tuple& y) {
      for (std::size_t p = 0; p < full.size(); ++p) full[p] = y[position_of[p]];
      return t.table(full);
    });
    out.add_term(std::move(table), std::move(scope));
  }
  return out;
}

}  // namespace vcsp
