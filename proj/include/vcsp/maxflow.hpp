#pragma once

#include <deque>
#include <limits>
#include <vector>

#include "vcsp/errors.hpp"
#include "vcsp/ext_cost.hpp"

namespace vcsp {

// Directed flow network with exact capacities; infinite edges are a separate class, not a big constant.
template <class S>
class FlowNetwork {
 public:
  using Capacity = ExtCost<S>;

  struct Edge {
    int from = 0;
    int to = 0;
    Capacity capacity;
    S flow{0};  // negative on reverse edges
    int reverse = -1;
    bool residual_only = false;  // the zero-capacity twin of a user edge
  };

  int add_node() { adj_.emplace_back(); return static_cast<int>(adj_.size()) - 1; }
  int node_count() const { return static_cast<int>(adj_.size()); }

  void add_edge(int u, int v, const Capacity& capacity) {
    check_node(u);
    check_node(v);
    if (u == v) return;
    if (capacity.is_finite() && !ScalarTraits<S>::less(S(0), capacity.value())) return;
    const int e = static_cast<int>(edges_.size());
    edges_.push_back(Edge{u, v, capacity, S(0), e + 1, false});
    edges_.push_back(Edge{v, u, Capacity(), S(0), e, true});
    adj_[static_cast<std::size_t>(u)].push_back(e);
    adj_[static_cast<std::size_t>(v)].push_back(e + 1);
  }

  const std::vector<Edge>& edges() const { return edges_; }

  // Edmonds-Karp. Returns infinity when an all-infinite augmenting path exists.
  Capacity max_flow(int s, int t) {
    check_node(s);
    check_node(t);
    if (s == t) throw UsageError("max_flow: source equals sink");
    Capacity total;
    std::vector<int> via(adj_.size());
    while (true) {
      std::fill(via.begin(), via.end(), -1);
      std::deque<int> queue{s};
      via[static_cast<std::size_t>(s)] = -2;
      while (!queue.empty() && via[static_cast<std::size_t>(t)] == -1) {
        int u = queue.front();
        queue.pop_front();
        for (int e : adj_[static_cast<std::size_t>(u)]) {
          const auto& edge = edges_[static_cast<std::size_t>(e)];
          if (via[static_cast<std::size_t>(edge.to)] != -1 || !has_residual(edge)) continue;
          via[static_cast<std::size_t>(edge.to)] = e;
          queue.push_back(edge.to);
        }
      }
      if (via[static_cast<std::size_t>(t)] == -1) return total;
      Capacity bottleneck = Capacity::infinity();
      for (int v = t; v != s;) {
        const auto& edge = edges_[static_cast<std::size_t>(via[static_cast<std::size_t>(v)])];
        Capacity r = residual(edge);
        if (r < bottleneck) bottleneck = r;
        v = edge.from;
      }
      if (bottleneck.is_infinite()) return Capacity::infinity();
      const S amount = bottleneck.value();
      for (int v = t; v != s;) {
        const int e = via[static_cast<std::size_t>(v)];
        auto& edge = edges_[static_cast<std::size_t>(e)];
        edge.flow += amount;
        edges_[static_cast<std::size_t>(edge.reverse)].flow -= amount;
        v = edge.from;
      }
      total += bottleneck;
    }
  }

  // Nodes reachable from s in the residual graph; call after max_flow.
  std::vector<char> source_side(int s) const {
    check_node(s);
    std::vector<char> seen(adj_.size(), 0);
    std::deque<int> queue{s};
    seen[static_cast<std::size_t>(s)] = 1;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (int e : adj_[static_cast<std::size_t>(u)]) {
        const auto& edge = edges_[static_cast<std::size_t>(e)];
        if (seen[static_cast<std::size_t>(edge.to)] || !has_residual(edge)) continue;
        seen[static_cast<std::size_t>(edge.to)] = 1;
        queue.push_back(edge.to);
      }
    }
    return seen;
  }

  // Total capacity of user edges leaving the given source side.
  Capacity cut_value(const std::vector<char>& side) const {
    if (side.size() != adj_.size()) throw UsageError("cut_value: side vector has wrong size");
    Capacity c;
    for (const auto& e : edges_) {
      if (e.residual_only) continue;
      if (side[static_cast<std::size_t>(e.from)] && !side[static_cast<std::size_t>(e.to)]) c += e.capacity;
    }
    return c;
  }

 private:
  static Capacity residual(const Edge& e) {
    if (e.capacity.is_infinite()) return Capacity::infinity();
    S r = e.capacity.value() - e.flow;
    if (r < S(0)) r = S(0);
    return Capacity(r);
  }
  static bool has_residual(const Edge& e) {
    if (e.capacity.is_infinite()) return true;
    return ScalarTraits<S>::less(S(0), e.capacity.value() - e.flow);
  }
  void check_node(int u) const {
    if (u < 0 || u >= node_count()) throw UsageError("flow network: node " + std::to_string(u) + " out of range");
  }

  std::vector<std::vector<int>> adj_;
  std::vector<Edge> edges_;
};

}  // namespace vcsp
