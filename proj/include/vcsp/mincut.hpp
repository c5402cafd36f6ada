#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vcsp/errors.hpp"
#include "vcsp/instance.hpp"
#include "vcsp/maxflow.hpp"

namespace vcsp {

// Cut graph for an instance whose labels are ordered numerically, every term of arity <= 2 and
// submodular in that order. Node nodes[i][l-1] stands for [x_i >= labels[i][l]].
template <class C>
struct MincutReduction {
  using S = typename C::scalar_type;

  FlowNetwork<S> network;
  int source = -1;
  int sink = -1;
  bool infeasible = false;  // some variable lost every label to arc consistency
  S offset{0};
  std::vector<std::vector<Label>> labels;
  std::vector<std::vector<int>> nodes;

  // Assignment (original labels) read off a source side.
  Assignment decode(const std::vector<char>& side) const {
    Assignment x(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      std::size_t level = 0;
      while (level < nodes[i].size() && side[static_cast<std::size_t>(nodes[i][level])]) ++level;
      for (std::size_t rest = level; rest < nodes[i].size(); ++rest) {
        if (side[static_cast<std::size_t>(nodes[i][rest])]) {
          throw InternalError("cut is not monotone on variable " + std::to_string(i + 1));
        }
      }
      x[i] = labels[i][level];
    }
    return x;
  }
};

namespace detail {

// Value a + C*b with the big constant C still symbolic.
template <class S>
struct Symbolic {
  S a{0};
  S b{0};
  Symbolic& operator+=(const Symbolic& o) { a += o.a; b += o.b; return *this; }
  Symbolic& operator-=(const Symbolic& o) { a -= o.a; b -= o.b; return *this; }
};

}  // namespace detail

template <class C>
MincutReduction<C> mincut_reduce(const Instance<C>& input) {
  using S = typename C::scalar_type;
  using Sym = detail::Symbolic<S>;
  const Instance<C> inst = canonicalize_scopes(input);
  const int n = inst.variable_count();
  const auto& dom = inst.domains();

  MincutReduction<C> red;
  std::vector<std::vector<C>> unary(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) unary[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(dom.size(i)), C());
  // (i, j) with i < j -> table indexed [a * d_j + b]
  std::map<std::pair<int, int>, std::vector<C>> pairwise;

  for (const auto& term : inst.terms()) {
    const auto& t = term.table;
    if (term.scope.size() == 1) {
      auto& u = unary[static_cast<std::size_t>(term.scope[0])];
      for (Label a = 0; a < t.sizes()[0]; ++a) u[static_cast<std::size_t>(a)] += t.at(static_cast<std::size_t>(a));
    } else if (term.scope.size() == 2) {
      int i = term.scope[0], j = term.scope[1];
      const bool flip = i > j;
      if (flip) std::swap(i, j);
      const int di = dom.size(i), dj = dom.size(j);
      auto& table = pairwise[{i, j}];
      if (table.empty()) table.assign(static_cast<std::size_t>(di * dj), C());
      for (Label a = 0; a < di; ++a)
        for (Label b = 0; b < dj; ++b) {
          const Label p[2] = {flip ? b : a, flip ? a : b};
          table[static_cast<std::size_t>(a * dj + b)] += t(std::span<const Label>(p, 2));
        }
    } else {
      throw UsageError("mincut_reduce: term of arity " + std::to_string(term.scope.size()) + " is not supported");
    }
  }

  red.labels.resize(static_cast<std::size_t>(n));
  red.nodes.resize(static_cast<std::size_t>(n));
  red.source = red.network.add_node();
  red.sink = red.network.add_node();
  // Arc consistency on finite entries.
  std::vector<LabelSet> alive;
  for (int i = 0; i < n; ++i) {
    LabelSet s(dom.size(i));
    for (Label a = 0; a < dom.size(i); ++a) if (unary[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)].is_finite()) s.insert(a);
    alive.push_back(s);
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [key, table] : pairwise) {
      auto [i, j] = key;
      const int dj = dom.size(j);
      LabelSet si(dom.size(i)), sj(dj);
      for (Label a : alive[static_cast<std::size_t>(i)].labels())
        for (Label b : alive[static_cast<std::size_t>(j)].labels())
          if (table[static_cast<std::size_t>(a * dj + b)].is_finite()) {
            si.insert(a);
            sj.insert(b);
          }
      if (si != alive[static_cast<std::size_t>(i)] || sj != alive[static_cast<std::size_t>(j)]) {
        alive[static_cast<std::size_t>(i)] = si;
        alive[static_cast<std::size_t>(j)] = sj;
        changed = true;
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (alive[static_cast<std::size_t>(i)].empty()) {
      red.infeasible = true;
      return red;
    }
    red.labels[static_cast<std::size_t>(i)] = alive[static_cast<std::size_t>(i)].labels();
  }

  auto size_of = [&](int i) { return static_cast<int>(red.labels[static_cast<std::size_t>(i)].size()); };
  auto orig = [&](int i, int r) { return red.labels[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)]; };

  std::vector<std::vector<S>> u(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < size_of(i); ++r) {
      u[static_cast<std::size_t>(i)].push_back(unary[static_cast<std::size_t>(i)][static_cast<std::size_t>(orig(i, r))].value());
    }

  for (int i = 0; i < n; ++i)
    for (int l = 1; l < size_of(i); ++l) red.nodes[static_cast<std::size_t>(i)].push_back(red.network.add_node());
  // node of [x_i >= l] over compressed labels; l = 0 is the source, l = size is the sink
  auto level = [&](int i, int l) {
    if (l <= 0) return red.source;
    if (l >= size_of(i)) return red.sink;
    return red.nodes[static_cast<std::size_t>(i)][static_cast<std::size_t>(l - 1)];
  };
  const auto inf = ExtCost<S>::infinity();

  for (const auto& [key, full] : pairwise) {
    auto [i, j] = key;
    const int di = size_of(i), dj = size_of(j);
    const int fdj = dom.size(j);
    std::vector<std::optional<S>> theta(static_cast<std::size_t>(di * dj));
    for (int a = 0; a < di; ++a)
      for (int b = 0; b < dj; ++b) {
        const C& c = full[static_cast<std::size_t>(orig(i, a) * fdj + orig(j, b))];
        if (c.is_finite()) theta[static_cast<std::size_t>(a * dj + b)] = c.value();
      }
    auto in_r = [&](int a, int b) { return theta[static_cast<std::size_t>(a * dj + b)].has_value(); };

    // Implication edges and a check that they carve out exactly the effective domain.
    std::vector<std::pair<int, int>> forward, backward;  // [x_i>=l] => [x_j>=m];  [x_j>=m] => [x_i>=l]
    for (int l = 1; l < di; ++l)
      for (int m = 1; m < dj; ++m) {
        bool f = true, g = true;
        for (int a = 0; a < di; ++a)
          for (int b = 0; b < dj; ++b) {
            if (!in_r(a, b)) continue;
            if (a >= l && b < m) f = false;
            if (b >= m && a < l) g = false;
          }
        if (f) forward.emplace_back(l, m);
        if (g) backward.emplace_back(l, m);
      }
    std::vector<int> lo(static_cast<std::size_t>(di)), hi(static_cast<std::size_t>(di));
    for (int a = 0; a < di; ++a) {
      int first = -1, last = -1;
      for (int b = 0; b < dj; ++b) {
        const bool allowed = [&] {
          for (auto [l, m] : forward) if (a >= l && b < m) return false;
          for (auto [l, m] : backward) if (b >= m && a < l) return false;
          return true;
        }();
        if (allowed != in_r(a, b)) {
          throw ValidationError("pairwise cost on variables " + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                " is not submodular: its effective domain is not closed under min and max");
        }
        if (allowed) {
          if (first < 0) first = b;
          last = b;
        }
      }
      lo[static_cast<std::size_t>(a)] = first;
      hi[static_cast<std::size_t>(a)] = last;
    }

    // Finite extension: clamp into the row interval and pay C per step outside it.
    auto ext = [&](int a, int b) {
      const int l = lo[static_cast<std::size_t>(a)], h = hi[static_cast<std::size_t>(a)];
      const int c = b < l ? l : (b > h ? h : b);
      const int dist = b < l ? l - b : (b > h ? b - h : 0);
      return Sym{*theta[static_cast<std::size_t>(a * dj + c)], S(dist)};
    };
    auto second_difference = [&](int l, int m) {
      Sym d = ext(l, m);
      d += ext(l - 1, m - 1);
      d -= ext(l - 1, m);
      d -= ext(l, m - 1);
      return d;
    };
    S big{1};
    for (int l = 1; l < di; ++l)
      for (int m = 1; m < dj; ++m) {
        Sym d = second_difference(l, m);
        if (d.b < S(0)) {
          S need = d.a / (-d.b) + S(1);
          if (big < need) big = need;
        } else if (ScalarTraits<S>::less(S(0), d.a) || S(0) < d.b) {
          if (in_r(l, m) && in_r(l - 1, m - 1) && in_r(l - 1, m) && in_r(l, m - 1)) {
            throw ValidationError("pairwise cost on variables " + std::to_string(i + 1) + "," +
                                  std::to_string(j + 1) + " is not submodular at labels (" +
                                  std::to_string(orig(i, l)) + "," + std::to_string(orig(j, m)) + ")");
          }
          throw InternalError("no finite submodular extension for the pairwise cost on variables " +
                              std::to_string(i + 1) + "," + std::to_string(j + 1));
        }
      }
    auto value = [&](const Sym& s) { return s.a + big * s.b; };

    std::vector<S> row_sum(static_cast<std::size_t>(di), S(0));
    for (int l = 1; l < di; ++l)
      for (int m = 1; m < dj; ++m) {
        S d = value(second_difference(l, m));
        if (ScalarTraits<S>::less(S(0), d)) throw InternalError("positive second difference after extension");
        row_sum[static_cast<std::size_t>(l)] += d;
        if (ScalarTraits<S>::less(d, S(0))) red.network.add_edge(level(i, l), level(j, m), ExtCost<S>(-d));
      }
    const S base = value(ext(0, 0));
    S acc{0};
    for (int a = 0; a < di; ++a) {
      acc += row_sum[static_cast<std::size_t>(a)];
      u[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] += value(ext(a, 0)) - base + acc;
    }
    for (int b = 0; b < dj; ++b) u[static_cast<std::size_t>(j)][static_cast<std::size_t>(b)] += value(ext(0, b));
    for (auto [l, m] : forward) red.network.add_edge(level(i, l), level(j, m), inf);
    for (auto [l, m] : backward) red.network.add_edge(level(j, m), level(i, l), inf);
  }

  for (int i = 0; i < n; ++i) {
    auto& ui = u[static_cast<std::size_t>(i)];
    S lowest = ui[0];
    for (const auto& v : ui) if (v < lowest) lowest = v;
    red.offset += lowest;
    for (int a = 0; a < size_of(i); ++a) {
      red.network.add_edge(level(i, a), level(i, a + 1), ExtCost<S>(ui[static_cast<std::size_t>(a)] - lowest));
      if (a >= 1 && a + 1 < size_of(i)) red.network.add_edge(level(i, a + 1), level(i, a), inf);
    }
  }
  return red;
}

template <class C>
struct MincutSolution {
  C optimum;
  std::optional<Assignment> argmin;
};

template <class C>
MincutSolution<C> solve_mincut(const Instance<C>& inst) {
  auto red = mincut_reduce(inst);
  if (red.infeasible) return {C::infinity(), std::nullopt};
  auto flow = red.network.max_flow(red.source, red.sink);
  if (flow.is_infinite()) return {C::infinity(), std::nullopt};
  auto side = red.network.source_side(red.source);
  Assignment x = red.decode(side);
  C cost = evaluate(inst, x);
  using S = typename C::scalar_type;
  if (cost.is_infinite() || !ScalarTraits<S>::eq(cost.value(), flow.value() + red.offset)) {
    throw InternalError("decoded cut costs " + cost.to_string() + " but the cut value plus offset is " +
                        ScalarTraits<S>::format(flow.value() + red.offset));
  }
  return {cost, std::move(x)};
}

}  // namespace vcsp
