#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vcsp/consistency.hpp"
#include "vcsp/errors.hpp"
#include "vcsp/instance.hpp"
#include "vcsp/operations.hpp"
#include "vcsp/reduction.hpp"
#include "vcsp/solvers.hpp"

namespace vcsp {

struct PipelineOptions {
  bool paranoid = false;
  bool verify_multimorphism = true;
  bool force_fallback = false;
  std::uint64_t cap = kDefaultEnumerationCap;
  std::optional<std::uint64_t> shuffle_seed;
  std::function<void(const std::string&)> trace;  // receives one line per stage-2 iteration
  std::function<void(const ReductionState&, const BinaryNetwork&, const OperationSystem&)> observe;
};

template <class C>
struct Reduction {
  bool empty = false;                // some unary relation became empty
  BinaryNetwork network;             // strong-3-consistent network over the original domains
  std::size_t revisions = 0;
  DomainMap map;                     // original <-> shrunk labels (unset when empty)
  Instance<C> instance;              // restricted to the network and shrunk
  BinaryNetwork shrunk_network;
  OperationSystem ops;               // full STP on the shrunk domains after stage 2
  TernaryOperation majority;         // over the original domains
  std::vector<IterationRecord> iterations;
  std::vector<std::pair<std::string, double>> timings_ms;
};

namespace detail {

class StageClock {
 public:
  explicit StageClock(std::vector<std::pair<std::string, double>>& out) : out_(out) {}
  void lap(const std::string& stage) {
    auto now = std::chrono::steady_clock::now();
    out_.emplace_back(stage, std::chrono::duration<double, std::milli>(now - last_).count());
    last_ = now;
  }

 private:
  std::vector<std::pair<std::string, double>>& out_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

inline void require_ops_shape(const OperationSystem& ops, const DomainSpec& domains) {
  try {
    require_shape(ops.pair, domains);
    require_shape(ops.triple, domains);
    if (ops.m.variable_count() != domains.variable_count()) throw UsageError("M covers the wrong number of variables");
    for (int i = 0; i < domains.variable_count(); ++i) {
      if (ops.m.domain_size(i) != domains.size(i)) throw UsageError("M has the wrong domain size at variable " + std::to_string(i + 1));
    }
  } catch (const UsageError& e) {
    throw PipelineError("stage0", std::string("operation tables do not match the instance: ") + e.what());
  }
}

}  // namespace detail

// Stages 0-2: validation, consistency and the rewrite of the pair into a full STP.
template <class C>
Reduction<C> reduce_to_stp(const Instance<C>& input, const OperationSystem& input_ops, const PipelineOptions& options = {}) {
  Reduction<C> out;
  detail::StageClock clock(out.timings_ms);
  detail::require_ops_shape(input_ops, input.domains());
  const Instance<C> inst = canonicalize_scopes(input);

  if (auto msg = validate_operation_system(input_ops)) throw PipelineError("stage0", *msg);
  OperationSystem ops = normalize_commutative(input_ops);
  if (auto v = check_instance_binary(inst, ops.pair); !v) {
    throw PipelineError("stage0", "term " + std::to_string(*v.term + 1) + " violates the binary multimorphism: " +
                                      v.violation->describe());
  }
  if (auto v = check_instance_ternary(inst, ops.triple); !v) {
    throw PipelineError("stage0", "term " + std::to_string(*v.term + 1) + " violates the ternary multimorphism: " +
                                      v.violation->describe());
  }
  try {
    out.majority = build_majority(ops.pair, ops.triple);
  } catch (const InternalError& e) {
    throw PipelineError("stage0", e.what());
  }
  if (auto v = check_instance_polymorphism(inst, out.majority); !v) {
    throw PipelineError("stage0", "majority operation is not a polymorphism of term " + std::to_string(*v.term + 1) +
                                      ": " + v.violation->describe());
  }
  clock.lap("stage0");

  auto consistency = enforce_strong_3_consistency(decompose_instance(inst, options.cap),
                                                  ConsistencyOptions{options.shuffle_seed});
  out.network = std::move(consistency.network);
  out.revisions = consistency.revisions;
  out.empty = consistency.empty;
  if (auto cert = certify_decomposition(out.network, inst, options.cap); !cert.ok) {
    throw PipelineError("stage1", "feasible set is not described by the binary network; first mismatch at x=" +
                                      tuple_to_string(*cert.counterexample));
  }
  clock.lap("stage1");
  if (out.empty) return out;

  out.map = domain_map_from(out.network);
  out.shrunk_network = shrink_network(out.network, out.map);
  out.instance = shrink_instance(restrict_to_network(inst, out.network), out.map);
  OperationSystem shrunk = shrink_operations(ops, out.map);

  Stage2Options s2;
  s2.verify_multimorphism = options.verify_multimorphism;
  s2.paranoid = options.paranoid;
  s2.observe = options.observe;
  if (options.trace) {
    std::size_t n = 0;
    s2.on_iteration = [&, n](const IterationRecord& r, const ReductionState&) mutable {
      const auto& back = out.map.to_original[static_cast<std::size_t>(r.seed.k)];
      options.trace(format_iteration(++n, r, back[static_cast<std::size_t>(r.seed.a)], back[static_cast<std::size_t>(r.seed.b)]));
    };
  }
  auto stage2 = run_stage2(out.instance, std::move(shrunk), out.shrunk_network, s2);
  out.ops = std::move(stage2.ops);
  out.iterations = std::move(stage2.iterations);
  clock.lap("stage2");
  return out;
}

template <class C>
SolveResult<C> solve_pipeline(const Instance<C>& inst, const OperationSystem& ops, const PipelineOptions& options = {}) {
  Reduction<C> red = reduce_to_stp(inst, ops, options);
  SolveResult<C> result;
  if (red.empty) {
    result.optimum = C::infinity();
    result.stats.path = SolverPath::infeasible;
  } else {
    auto start = std::chrono::steady_clock::now();
    result = solve_stp(red.instance, red.ops.pair, StpOptions{options.force_fallback, options.cap});
    red.timings_ms.emplace_back(
        "stage3", std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
    if (result.argmin) result.argmin = expand_assignment(red.map, *result.argmin);
  }
  result.stats.stage2_iterations = red.iterations.size();
  result.stats.consistency_revisions = red.revisions;
  result.stats.timings_ms = std::move(red.timings_ms);
  if (result.argmin && !cost_eq(evaluate(inst, *result.argmin), result.optimum)) {
    throw InternalError("pipeline assignment " + tuple_to_string(*result.argmin) + " costs " +
                        evaluate(inst, *result.argmin).to_string() + ", reported optimum " +
                        result.optimum.to_string());
  }
  return result;
}

}  // namespace vcsp
