#include "ipsolve/bench.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace ipsolve;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitDivergence = 2;
constexpr int kExitCheckFailed = 3;

void print_audit_row(const AuditReport& a) {
  std::printf("%-22s %-5s worst_violation=%-13.6g at_t=%-8ld tol=%g\n", a.audit_name.c_str(),
              a.passed ? "pass" : "FAIL", a.worst_violation, a.worst_iteration, a.tolerance);
}

const char* property_name(RegimeProperty p) {
  switch (p) {
    case RegimeProperty::Monotone: return "monotone";
    case RegimeProperty::Comonotone: return "comonotone";
    case RegimeProperty::WeakMVI: return "weak_mvi";
    case RegimeProperty::Lipschitz: return "lipschitz";
  }
  return "?";
}

RegimeProperty property_from_name(const std::string& name) {
  if (name == "monotone") return RegimeProperty::Monotone;
  if (name == "comonotone") return RegimeProperty::Comonotone;
  if (name == "weak_mvi") return RegimeProperty::WeakMVI;
  if (name == "lipschitz") return RegimeProperty::Lipschitz;
  throw std::invalid_argument("unknown property \"" + name +
                              "\" (want monotone|comonotone|weak_mvi|lipschitz)");
}

RegimeProperty default_property(const InclusionProblem& p) {
  switch (p.regime.kind) {
    case Regime::Kind::Monotone: return RegimeProperty::Monotone;
    case Regime::Kind::Comonotone: return RegimeProperty::Comonotone;
    case Regime::Kind::WeakMVI: return RegimeProperty::WeakMVI;
  }
  return RegimeProperty::Monotone;
}

struct SolveFlags {
  std::string config_path, problem, algo, initial, out;
  double eta = 0.0, eps = 0.0;
  int max_iters = 0, record_every = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> audits;
};

int run_solve(const CLI::App& cmd, const SolveFlags& f) {
  ExperimentConfig cfg;
  if (cmd.count("--config")) {
    std::ifstream in(f.config_path);
    if (!in) throw std::invalid_argument("cannot open config file \"" + f.config_path + "\"");
    cfg = experiment_from_json(nlohmann::json::parse(in));
  }
  if (cfg.algorithms.empty()) {
    if (!cmd.count("--algo"))
      throw std::invalid_argument("missing --algo (or a --config file with algorithm entries)");
    cfg.algorithms.emplace_back();
  }

  auto per_run = [&](const char* flag) {
    if (cfg.algorithms.size() > 1)
      throw std::invalid_argument(std::string(flag) +
                                  " conflicts with a multi-algorithm config; set the value on "
                                  "the algorithm entry instead");
    return &cfg.algorithms.front();
  };
  if (cmd.count("--algo")) per_run("--algo")->config.algorithm = algorithm_from_name(f.algo);
  if (cmd.count("--eta")) per_run("--eta")->config.eta = f.eta;
  if (cmd.count("--max-iters")) per_run("--max-iters")->config.max_iterations = f.max_iters;
  if (cmd.count("--eps")) per_run("--eps")->config.stop_epsilon = f.eps;
  if (cmd.count("--seed")) per_run("--seed")->config.seed = f.seed;
  if (cmd.count("--initial")) {
    auto* run = per_run("--initial");
    if (f.initial != "ones" && f.initial != "zeros")
      throw std::invalid_argument("--initial must be ones or zeros, got \"" + f.initial + "\"");
    run->initial = f.initial;
  }
  if (cmd.count("--problem")) cfg.problem = f.problem;
  if (cmd.count("--out")) cfg.output_dir = f.out;
  if (cmd.count("--record-every")) cfg.record_every = f.record_every;
  for (const auto& a : f.audits) cfg.audits.push_back(a);

  const ExperimentResult result = run_experiment(cfg, std::cout);
  std::cout << "artifacts written to " << cfg.output_dir << '\n';
  return result.diverged ? kExitDivergence : kExitOk;
}

struct VerifyFlags {
  bool identities = false;
  bool sequence_bound = false;
  std::string regime_spec, property;
  double c1 = 1.0, p = 0.1, radius = 10.0;
  int horizon = 10000, trials = 1000, dim = 8;
  std::uint64_t seed = 0;
};

int run_verify(const CLI::App& cmd, const VerifyFlags& f) {
  if (!f.identities && !f.sequence_bound && f.regime_spec.empty())
    throw std::invalid_argument(
        "nothing to verify; pass --identities, --sequence-bound, or --regime <problem>");

  bool all_pass = true;
  if (f.identities) {
    for (const char* which : {"first", "second"}) {
      const AuditReport r = verify_identity(which, f.trials, f.seed, f.dim);
      print_audit_row(r);
      all_pass = all_pass && r.passed;
    }
  }
  if (f.sequence_bound) {
    const AuditReport r = verify_sequence_bound(f.c1, f.p, f.horizon, f.seed);
    print_audit_row(r);
    all_pass = all_pass && r.passed;
  }
  if (!f.regime_spec.empty()) {
    const InclusionProblem problem = parse_problem_spec(f.regime_spec);
    const RegimeProperty prop =
        cmd.count("--property") ? property_from_name(f.property) : default_property(problem);
    const CertifyReport r =
        certify_regime(problem, prop, f.trials, f.radius, f.seed, 1e-9);
    std::printf("%-22s %-5s worst_margin=%-13.6g samples=%-8d tol=%g\n", property_name(prop),
                r.pass ? "pass" : "FAIL", r.worst_margin, r.samples, r.tolerance);
    if (!r.pass) {
      std::cout << "  witness z  = [" << r.witness_z.transpose() << "]\n";
      std::cout << "  witness z' = [" << r.witness_zp.transpose() << "]\n";
    }
    all_pass = all_pass && r.pass;
  }
  return all_pass ? kExitOk : kExitCheckFailed;
}

struct AuditFlags {
  std::string problem = "antidiagonal:n=100";
  std::string algo, initial = "ones", out;
  double eta = 0.0, eps = 0.0;
  int max_iters = 1000;
  std::vector<std::string> audits;
};

double default_eta(const InclusionProblem& p, Algorithm alg) {
  const double L = p.F.lipschitz;
  const double rho = p.regime.kind == Regime::Kind::Monotone ? 0.0 : std::min(0.0, p.regime.rho);
  switch (alg) {
    case Algorithm::OG: return stepsize_og(L, rho);
    case Algorithm::ARG: return stepsize_arg(L, rho);
    case Algorithm::RG: return 0.4 / L;  // inside the eta < 1/((1+sqrt(2)) L) range
    default: return 0.5 / L;
  }
}

int run_audit_cmd(const CLI::App& cmd, const AuditFlags& f) {
  ExperimentConfig cfg;
  cfg.problem = f.problem;
  AlgorithmRun run;
  run.config.algorithm = algorithm_from_name(f.algo);
  run.config.eta =
      cmd.count("--eta") ? f.eta : default_eta(parse_problem_spec(f.problem), run.config.algorithm);
  run.config.max_iterations = f.max_iters;
  run.config.stop_epsilon = f.eps;
  run.initial = f.initial;
  cfg.algorithms.push_back(run);

  cfg.audits = f.audits;
  if (cfg.audits.empty()) {
    switch (run.config.algorithm) {
      case Algorithm::OG: cfg.audits = {"og_thm"}; break;
      case Algorithm::RG: cfg.audits = {"rg_potential", "rg_thm", "best_iterate_sums"}; break;
      case Algorithm::ARG: cfg.audits = {"arg_potential", "arg_thm"}; break;
      default:
        throw std::invalid_argument("no audits apply to " + f.algo +
                                    "; audits cover og, rg, and arg runs");
    }
  }

  if (cmd.count("--out")) {
    cfg.output_dir = f.out;
    const ExperimentResult result = run_experiment(cfg, std::cout);
    if (result.diverged) return kExitDivergence;
    for (const auto& s : result.summaries)
      for (const auto& a : s.audits)
        if (!a.passed) return kExitCheckFailed;
    return kExitOk;
  }

  // no artifacts requested; run in-process and print the report rows
  const InclusionProblem problem = parse_problem_spec(cfg.problem);
  AlgorithmConfig ac = run.config;
  ac.initial_point =
      run.initial == "zeros" ? Vec::Zero(problem.dim) : Vec::Constant(problem.dim, 1.0);
  const Trajectory traj = ipsolve::run(problem, ac);
  for (const auto& w : traj.warnings) std::cout << "warning: " << w << '\n';
  if (traj.terminated_by == Termination::Divergence) {
    std::cout << "diverged after " << traj.records.back().t << " iterations\n";
    return kExitDivergence;
  }
  bool all_pass = true;
  for (const auto& name : cfg.audits) {
    AuditReport r;
    if (name == "rg_potential")
      r = audit_rg_potential(traj);
    else if (name == "arg_potential")
      r = audit_arg_potential(traj);
    else if (name == "best_iterate_sums")
      r = audit_best_iterate_sums(traj);
    else
      r = audit_theorem_bound(traj, name);
    print_audit_row(r);
    all_pass = all_pass && r.passed;
  }
  return all_pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"benchmark and verification harness for inclusion-problem solvers"};
  app.require_subcommand(1);

  SolveFlags sf;
  CLI::App* solve = app.add_subcommand("solve", "run algorithms on a problem, write artifacts");
  solve->add_option("--config", sf.config_path, "experiment config JSON; flags override");
  solve->add_option("--problem", sf.problem, "problem spec, e.g. antidiagonal:n=100");
  solve->add_option("--algo", sf.algo, "eg|peg|og|rg|arg");
  solve->add_option("--eta", sf.eta, "stepsize");
  solve->add_option("--max-iters", sf.max_iters, "iteration cap");
  solve->add_option("--eps", sf.eps, "stop when the certified residual falls below this");
  solve->add_option("--seed", sf.seed, "kept in artifacts for provenance");
  solve->add_option("--initial", sf.initial, "ones|zeros");
  solve->add_option("--record-every", sf.record_every, "CSV subsampling stride");
  solve->add_option("--out", sf.out, "output directory");
  solve->add_option("--audit", sf.audits, "audit to run (repeatable)");

  int rep_n = 100;
  std::string rep_out = "out/comparison";
  CLI::App* reproduce =
      app.add_subcommand("reproduce", "reference comparison: eg/rg race plus an anchored run");
  reproduce->add_option("--n", rep_n, "problem dimension (even)");
  reproduce->add_option("--out", rep_out, "output directory");

  VerifyFlags vf;
  CLI::App* verify = app.add_subcommand("verify", "run numerical verifiers");
  verify->add_flag("--identities", vf.identities, "check both sum-of-squares identities");
  verify->add_flag("--sequence-bound", vf.sequence_bound, "check the recursive sequence bound");
  verify->add_option("--c1", vf.c1, "sequence bound: initial constant");
  verify->add_option("--p", vf.p, "sequence bound: contraction parameter, in (0, 1/3)");
  verify->add_option("--horizon", vf.horizon, "sequence bound: length K");
  verify->add_option("--regime", vf.regime_spec, "sample a regime property on this problem");
  verify->add_option("--property", vf.property, "monotone|comonotone|weak_mvi|lipschitz");
  verify->add_option("--radius", vf.radius, "sampling radius around the solution");
  verify->add_option("--trials", vf.trials, "random trials / samples");
  verify->add_option("--seed", vf.seed, "RNG seed");
  verify->add_option("--dim", vf.dim, "identity check dimension");

  AuditFlags af;
  CLI::App* audit = app.add_subcommand("audit", "run one algorithm and audit its trajectory");
  audit->add_option("--problem", af.problem, "problem spec");
  audit->add_option("--algo", af.algo, "og|rg|arg")->required();
  audit->add_option("--eta", af.eta, "stepsize (default: the method's admissible choice)");
  audit->add_option("--max-iters", af.max_iters, "iteration cap");
  audit->add_option("--eps", af.eps, "residual stop");
  audit->add_option("--initial", af.initial, "ones|zeros");
  audit->add_option("--audit", af.audits, "audit to run (repeatable; default per algorithm)");
  audit->add_option("--out", af.out, "also write artifacts here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (solve->parsed()) return run_solve(*solve, sf);
    if (reproduce->parsed()) {
      const ComparisonResult r = run_reference_comparison(rep_n, rep_out, std::cout);
      return r.comparison_ok ? kExitOk : kExitCheckFailed;
    }
    if (verify->parsed()) return run_verify(*verify, vf);
    if (audit->parsed()) return run_audit_cmd(*audit, af);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
