// Command-line front end: solve, oracle, verify, consistency, reduce.

#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "vcsp/vcsp.hpp"

namespace {

enum Exit { kOk = 0, kInvalid = 1, kUsage = 2, kCap = 3, kInternal = 4 };

struct Args {
  std::string instance;
  std::string ops;
  std::string trace;
  bool paranoid = false;
  bool use_float = false;
  bool json = false;
  bool timings = false;
  bool fallback = false;
  std::uint64_t cap = vcsp::kDefaultEnumerationCap;
};

class TraceSink {
 public:
  explicit TraceSink(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw vcsp::UsageError("cannot write trace file '" + path + "'");
  }
  bool active() const { return file_ != nullptr; }
  void operator()(const std::string& line) const { *file_ << line << '\n'; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

vcsp::PipelineOptions pipeline_options(const Args& a, const TraceSink& sink) {
  vcsp::PipelineOptions o;
  o.paranoid = a.paranoid;
  o.cap = a.cap;
  o.force_fallback = a.fallback;
  if (sink.active()) o.trace = [&sink](const std::string& line) { sink(line); };
  return o;
}

template <class C>
void print_result(const Args& a, const vcsp::SolveResult<C>& r) {
  if (a.json) {
    std::cout << vcsp::result_to_json(r, a.timings).dump(2) << '\n';
  } else {
    vcsp::write_result(std::cout, r, a.timings);
  }
}

template <class C>
int cmd_solve(const Args& a) {
  auto inst = vcsp::load_instance<C>(a.instance, a.cap);
  auto ops = vcsp::load_ops(a.ops, inst.domains());
  TraceSink sink(a.trace);
  print_result(a, vcsp::solve_pipeline(inst, ops, pipeline_options(a, sink)));
  return kOk;
}

template <class C>
int cmd_oracle(const Args& a) {
  auto inst = vcsp::load_instance<C>(a.instance, a.cap);
  print_result(a, vcsp::solve_bruteforce(inst, a.cap));
  return kOk;
}

template <class C>
int cmd_verify(const Args& a) {
  auto inst = vcsp::load_instance<C>(a.instance, a.cap);
  auto ops = vcsp::load_ops(a.ops, inst.domains(), false);
  bool ok = true;
  if (auto w = vcsp::find_nonconservative(ops.pair)) {
    std::cout << "operation system: non-conservative pair at " << w->describe() << '\n';
    return kInvalid;
  }
  if (auto msg = vcsp::validate_operation_system(ops)) {
    std::cout << "operation system: " << *msg << '\n';
    return kInvalid;
  }
  std::cout << "operation system: ok\n";
  ops = vcsp::normalize_commutative(std::move(ops));
  for (std::size_t t = 0; t < inst.terms().size(); ++t) {
    const auto& term = inst.terms()[t];
    auto b = vcsp::check_binary_multimorphism(term.table, vcsp::restrict_pair(ops.pair, term.scope));
    auto c = vcsp::check_ternary_multimorphism(term.table, vcsp::restrict_triple(ops.triple, term.scope));
    std::cout << "term " << t + 1 << ": binary " << (b ? "ok" : "violated at " + b.violation->describe()) << '\n';
    std::cout << "term " << t + 1 << ": ternary " << (c ? "ok" : "violated at " + c.violation->describe()) << '\n';
    ok = ok && b.ok() && c.ok();
  }
  return ok ? kOk : kInvalid;
}

template <class C>
int cmd_consistency(const Args& a) {
  auto inst = vcsp::canonicalize_scopes(vcsp::load_instance<C>(a.instance, a.cap));
  auto res = vcsp::enforce_strong_3_consistency(vcsp::decompose_instance(inst, a.cap));
  std::cout << "empty: " << (res.empty ? "yes" : "no") << '\n';
  std::cout << "revisions: " << res.revisions << '\n';
  if (inst.domains().assignment_count() <= a.cap) {
    auto cert = vcsp::certify_decomposition(res.network, inst, a.cap);
    std::cout << "certified: " << (cert.ok ? "yes" : "no, x=" + vcsp::tuple_to_string(*cert.counterexample)) << '\n';
  } else {
    std::cout << "certified: unknown (assignment space exceeds the cap)\n";
  }
  vcsp::write_network(std::cout, res.network);
  return kOk;
}

template <class C>
int cmd_reduce(const Args& a) {
  auto inst = vcsp::load_instance<C>(a.instance, a.cap);
  auto ops = vcsp::load_ops(a.ops, inst.domains());
  TraceSink sink(a.trace);
  std::vector<std::string> lines;
  auto opts = pipeline_options(a, sink);
  opts.trace = [&](const std::string& line) {
    if (sink.active()) sink(line);
    lines.push_back(line);
  };
  auto red = vcsp::reduce_to_stp(inst, ops, opts);
  std::cout << "empty: " << (red.empty ? "yes" : "no") << '\n';
  if (red.empty) return kOk;
  std::cout << "iterations: " << red.iterations.size() << '\n';
  for (const auto& l : lines) std::cout << l << '\n';
  for (int i = 0; i < red.map.reduced.variable_count(); ++i) {
    std::cout << "# labels " << i + 1;
    for (vcsp::Label l : red.map.to_original[static_cast<std::size_t>(i)]) std::cout << ' ' << l;
    std::cout << '\n';
  }
  vcsp::write_ops(std::cout, red.ops);
  return kOk;
}

template <class C>
int dispatch(const std::string& cmd, const Args& a) {
  if (cmd == "solve") return cmd_solve<C>(a);
  if (cmd == "oracle") return cmd_oracle<C>(a);
  if (cmd == "verify") return cmd_verify<C>(a);
  if (cmd == "consistency") return cmd_consistency<C>(a);
  return cmd_reduce<C>(a);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact solver for valued constraint instances with STP/MJN multimorphisms"};
  app.require_subcommand(1);
  Args a;

  auto common = [&](CLI::App* sub, bool needs_ops) {
    sub->add_option("instance", a.instance, "instance file")->required();
    if (needs_ops) sub->add_option("ops", a.ops, "operation-system file")->required();
    sub->add_flag("--float", a.use_float, "use floating-point costs (tolerance 1e-9)");
    sub->add_option("--cap", a.cap, "enumeration cap for exhaustive steps");
  };
  auto* solve = app.add_subcommand("solve", "run the full pipeline");
  common(solve, true);
  solve->add_flag("--paranoid", a.paranoid, "run the network-wide diagnostic scans in stage 2");
  solve->add_option("--trace", a.trace, "write the stage-2 iteration trace to this file");
  solve->add_flag("--json", a.json, "machine-readable output");
  solve->add_flag("--timings", a.timings, "include per-stage timings");
  solve->add_flag("--fallback", a.fallback, "skip the min-cut path in stage 3");
  auto* oracle = app.add_subcommand("oracle", "exhaustive minimum");
  common(oracle, false);
  oracle->add_flag("--json", a.json, "machine-readable output");
  auto* verify = app.add_subcommand("verify", "check the operation system and every term");
  common(verify, true);
  auto* cons = app.add_subcommand("consistency", "stage 1 only; dumps the network");
  common(cons, false);
  auto* reduce = app.add_subcommand("reduce", "stages 0-2; dumps the final operations");
  common(reduce, true);
  reduce->add_flag("--paranoid", a.paranoid, "run the network-wide diagnostic scans in stage 2");
  reduce->add_option("--trace", a.trace, "write the stage-2 iteration trace to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    return a.use_float ? dispatch<vcsp::FloatCost>(cmd, a) : dispatch<vcsp::Cost>(cmd, a);
  } catch (const vcsp::CapExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCap;
  } catch (const vcsp::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const vcsp::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const vcsp::InternalError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  } catch (const vcsp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}
