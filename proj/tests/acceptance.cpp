// End-to-end acceptance gate. Each numbered check prints one PASS/FAIL line;
// the process exits 0 only if every check passes. Tolerances are pinned here
// and intentionally not configurable.
#include "ipsolve/bench.hpp"

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace ipsolve;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d. %-34s %s\n", pass ? "PASS" : "FAIL", number, name.c_str(),
              detail.c_str());
  if (!pass) ++g_failures;
}

Trajectory run_on(const InclusionProblem& P, Algorithm alg, double eta, int iters) {
  AlgorithmConfig cfg;
  cfg.algorithm = alg;
  cfg.eta = eta;
  cfg.max_iterations = iters;
  cfg.initial_point = Vec::Constant(P.dim, 1.0);
  return run(P, cfg);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

int run_cli(const std::string& args, std::string* output = nullptr) {
  const std::string cmd = std::string(IPBENCH_BIN) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return -1;
  char buf[512];
  std::string text;
  while (fgets(buf, sizeof(buf), pipe)) text += buf;
  if (output) *output = text;
  const int status = pclose(pipe);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string file_without_wall_time(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::string text, line;
  while (std::getline(in, line))
    if (line.find("wall_time_seconds") == std::string::npos) text += line + "\n";
  return text;
}

void check_identities() {
  bool pass = true;
  double worst = 0.0;
  for (int dim : {1, 2, 8, 64})
    for (const char* which : {"first", "second"}) {
      const auto rep = verify_identity(which, 1000, 42, dim);
      pass = pass && rep.passed && rep.worst_violation <= 1e-9;
      worst = std::max(worst, rep.worst_violation);
    }
  report(1, "sum-of-squares identities", pass,
         "dims {1,2,8,64} x 1000 trials, worst relative defect " + fmt(worst) + " (tol 1e-9)");
}

void check_residual_ordering() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  auto rand_vec = [&](int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = u(rng);
    return v;
  };
  const std::vector<FeasibleSet> sets = {
      FeasibleSet::box(Vec::Constant(3, -1.0), Vec::Constant(3, 1.0)),
      FeasibleSet::ball(rand_vec(3) * 0.1, 1.3),
      FeasibleSet::nonneg_orthant(),
  };
  Eigen::MatrixXd G(3, 3);
  G << 0.6, 1.0, -0.3, -1.0, 0.2, 0.8, 0.3, -0.8, 0.1;
  int samples = 0;
  double worst = 0.0;
  for (const auto& Z : sets) {
    const auto P = make_problem({[&](const Vec& z) -> Vec { return G * z + Vec::Ones(3); }, 2.0},
                                MaximalMonotoneOperator::normal_cone(Z), Regime::monotone(), 3);
    for (int trial = 0; trial < 3400; ++trial) {
      const Vec z = Z.project(rand_vec(3));
      const double tan = tangent_residual_exact(P, z);
      worst = std::max(worst, natural_residual(P, z) - tan);
      for (double a : {0.1, 0.5, 1.0, 2.0})
        worst = std::max(worst, forward_backward_residual(P, a, z) - tan);
      ++samples;
    }
  }
  report(2, "residual ordering", samples >= 10000 && worst <= 1e-10,
         std::to_string(samples) + " samples, worst (other - tangent) = " + fmt(worst) +
             " (tol 1e-10)");
}

void check_rg_potential(const Trajectory& anti, const Trajectory& boxed) {
  const auto a = audit_rg_potential(anti);
  const auto b = audit_rg_potential(boxed);
  report(3, "reflected potential decrease", a.passed && b.passed,
         "worst increase " + fmt(std::max(a.worst_violation, b.worst_violation)) +
             " over 10^4 iterations on both instances");
}

void check_rg_theorem(const Trajectory& anti, const Trajectory& boxed) {
  const auto a = audit_theorem_bound(anti, "rg_thm");
  const auto b = audit_theorem_bound(boxed, "rg_thm");
  report(4, "reflected sqrt-T rate bound", a.passed && b.passed,
         "residual and gap bounds hold at every prefix; worst relative slack " +
             fmt(std::max(a.worst_violation, b.worst_violation)));
}

void check_arg_audits(const Trajectory& anti, const Trajectory& rot) {
  const auto pa = audit_arg_potential(anti);
  const auto pr = audit_arg_potential(rot);
  const auto ta = audit_theorem_bound(anti, "arg_thm");
  const auto tr = audit_theorem_bound(rot, "arg_thm");
  const bool pass = pa.passed && pr.passed && ta.passed && tr.passed;
  report(5, "anchored potential and 1/T bound", pass,
         "lemma margin " + fmt(std::max(pa.worst_violation, pr.worst_violation)) +
             ", theorem margin " + fmt(std::max(ta.worst_violation, tr.worst_violation)) +
             " (tol 1e-9 relative)");
}

void check_arg_rate(const Trajectory& rot) {
  const auto fit = fit_rate(rot, 100, 10000);
  report(6, "anchored empirical slope", fit.slope <= -0.9,
         "log-log slope " + fmt(fit.slope) + " over [1e2, 1e4] (need <= -0.9)");
}

void check_og_theorem() {
  const double rho = -1.0 / (24.0 * std::sqrt(3.0));
  const auto P = make_rotation_problem(1.0, std::acos(rho));
  const auto traj = run_on(P, Algorithm::OG, stepsize_og(1.0, rho), 10000);
  const auto rep = audit_theorem_bound(traj, "og_thm");
  report(7, "optimistic best-iterate bound", rep.passed,
         "C = " + fmt(rep.constants.at("C")) + ", worst relative slack " +
             fmt(rep.worst_violation));
}

void check_stepsizes() {
  bool pass = true;
  const double eta_og = stepsize_og(1.0, 0.0);
  const double C = 0.5 + 2.0 * 0.0 / eta_og - 2.0 * eta_og * eta_og;
  pass = pass && std::abs(C - 1.0 / 3.0) <= 1e-15;
  const double eta_arg = stepsize_arg(1.0, -1.0 / 60.0);
  pass = pass && eta_arg == 1.0 / 12.0;
  const double r = (-1.0 / 60.0) / eta_arg;
  const double lhs = 0.5 - (12.0 - 4.0 * r) * eta_arg * eta_arg + 2.0 * r;
  pass = pass && lhs > 0.0;
  bool grid = true;
  for (int i = 0; i < 100; ++i) {
    const double rho = -(1.0 / 60.0) * i / 99.0;
    grid = grid && rho / stepsize_arg(1.0, rho) >= -0.25;
  }
  pass = pass && grid;
  report(8, "stepsize selection facts", pass,
         "C - 1/3 = " + fmt(C - 1.0 / 3.0) + ", admissibility LHS = " + fmt(lhs) +
             ", anchor ratio grid ok");
}

void check_sequence_bound() {
  bool pass = true;
  double worst = -1e300;
  for (double p : {0.05, 0.1, 0.3}) {
    const auto rep = verify_sequence_bound(1.0, p, 10000);
    pass = pass && rep.passed;
    worst = std::max(worst, rep.worst_violation);
  }
  report(9, "recursive sequence bound", pass,
         "p in {0.05, 0.1, 0.3}, K = 10^4, worst margin " + fmt(worst));
}

void check_reference_comparison() {
  const auto dir = std::filesystem::temp_directory_path() / "ipsolve_accept_cmp";
  std::filesystem::remove_all(dir);
  std::string out;
  const int rep = run_cli("reproduce --n 100 --out " + (dir / "rep").string(), &out);
  const int div =
      run_cli("solve --algo rg --eta 0.7 --problem antidiagonal:n=100 --out " +
              (dir / "div").string());
  const bool pass = rep == 0 && div == 2;
  std::string counts = "gradient-call comparison not found";
  const auto at = out.find("rg-0.4 used");
  if (at != std::string::npos) counts = out.substr(at, out.find('\n', at) - at);
  report(10, "reference comparison", pass,
         counts + "; oversized stepsize exit " + std::to_string(div) + " (want 2)");
  std::filesystem::remove_all(dir);
}

void check_determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "ipsolve_accept_det";
  std::filesystem::remove_all(dir);
  const std::string args =
      "solve --problem bilinear_box:n=4 --algo rg --eta 0.3 --max-iters 2000 "
      "--audit rg_potential --audit rg_thm --out ";
  const int a = run_cli(args + (dir / "a").string());
  const int b = run_cli(args + (dir / "b").string());
  bool pass = a == 0 && b == 0;
  std::ifstream csv_a(dir / "a" / "rg_trajectory.csv", std::ios::binary);
  std::ifstream csv_b(dir / "b" / "rg_trajectory.csv", std::ios::binary);
  std::stringstream sa, sb;
  sa << csv_a.rdbuf();
  sb << csv_b.rdbuf();
  pass = pass && sa.str() == sb.str() && !sa.str().empty();
  pass = pass && file_without_wall_time(dir / "a" / "rg_summary.json") ==
                     file_without_wall_time(dir / "b" / "rg_summary.json");
  report(11, "deterministic artifacts", pass,
         "CSV byte-identical, summary identical after dropping wall time");
  std::filesystem::remove_all(dir);
}

}  // namespace

int main() {
  check_identities();
  check_residual_ordering();

  const auto rg_anti = run_on(make_antidiagonal_problem(100), Algorithm::RG, 0.3, 10000);
  const auto rg_box = run_on(make_bilinear_box_problem(2, 1.0), Algorithm::RG, 0.3, 10000);
  check_rg_potential(rg_anti, rg_box);
  check_rg_theorem(rg_anti, rg_box);

  const auto arg_anti = run_on(make_antidiagonal_problem(100), Algorithm::ARG, 1.0 / 12.0, 10000);
  const auto arg_rot = run_on(make_rotation_problem(1.0, std::acos(-1.0 / 60.0)), Algorithm::ARG,
                              1.0 / 12.0, 10000);
  check_arg_audits(arg_anti, arg_rot);
  check_arg_rate(arg_rot);

  check_og_theorem();
  check_stepsizes();
  check_sequence_bound();
  check_reference_comparison();
  check_determinism();

  if (g_failures == 0) {
    std::printf("all 11 checks passed\n");
    return 0;
  }
  std::printf("%d check(s) failed\n", g_failures);
  return 1;
}
