#include "ipsolve/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ipsolve {

namespace {

const std::set<std::string> kKnownAudits = {"rg_potential", "arg_potential",    "og_thm",
                                            "arg_thm",      "best_iterate_sums", "rg_thm"};

bool audit_applies(const std::string& name, Algorithm alg) {
  if (name == "rg_potential" || name == "rg_thm" || name == "best_iterate_sums")
    return alg == Algorithm::RG;
  if (name == "arg_potential" || name == "arg_thm") return alg == Algorithm::ARG;
  if (name == "og_thm") return alg == Algorithm::OG;
  return false;
}

AuditReport run_audit(const std::string& name, const Trajectory& traj) {
  if (name == "rg_potential") return audit_rg_potential(traj);
  if (name == "arg_potential") return audit_arg_potential(traj);
  if (name == "best_iterate_sums") return audit_best_iterate_sums(traj);
  return audit_theorem_bound(traj, name);
}

std::map<std::string, double> parse_params(const std::string& text,
                                           const std::set<std::string>& allowed,
                                           const std::string& where) {
  std::map<std::string, double> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(where + ": expected key=value, got \"" + item + "\"");
    std::string key = item.substr(0, eq);
    std::string val = item.substr(eq + 1);
    if (!allowed.count(key))
      throw std::invalid_argument(where + ": unknown parameter \"" + key + "\"");
    try {
      std::size_t used = 0;
      out[key] = std::stod(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
    } catch (const std::exception&) {
      throw std::invalid_argument(where + ": parameter \"" + key + "\" has non-numeric value \"" +
                                  val + "\"");
    }
  }
  return out;
}

Vec resolve_initial(const AlgorithmRun& spec, int dim) {
  if (spec.initial == "ones") return Vec::Constant(dim, 1.0);
  if (spec.initial == "zeros") return Vec::Zero(dim);
  if (spec.initial == "custom") {
    if (spec.config.initial_point.size() == 0)
      throw std::invalid_argument("initial_point: custom start requested but no vector given");
    return spec.config.initial_point;
  }
  throw std::invalid_argument("initial_point: unknown fill \"" + spec.initial +
                              "\" (want ones|zeros|custom)");
}

std::string unique_label(const AlgorithmRun& spec, std::set<std::string>& used) {
  std::string base = spec.label.empty() ? algorithm_name(spec.config.algorithm) : spec.label;
  std::string label = base;
  if (used.count(label)) {
    std::ostringstream eta;
    eta << spec.config.eta;
    label = base + "-" + eta.str();
  }
  int idx = 2;
  while (used.count(label)) label = base + "-" + std::to_string(idx++);
  used.insert(label);
  return label;
}

double wall_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RunSummary summarize(const std::string& label, const std::string& problem, const Trajectory& traj,
                     double wall) {
  RunSummary s;
  s.label = label;
  s.algorithm = algorithm_name(traj.config.algorithm);
  s.problem = problem;
  s.iterations_used = traj.records.back().t;
  s.gradient_calls = traj.records.back().grad_calls;
  s.resolvent_calls = traj.records.back().resolvent_calls;
  const auto& res = traj.records.back().residuals;
  s.final_residual = res.certified ? *res.certified : res.natural;
  s.wall_time_seconds = wall;
  s.terminated_by = termination_name(traj.terminated_by);
  s.warnings = traj.warnings;
  const int N = traj.records.back().t;
  if (N >= 20) {
    try {
      s.fitted_slope = fit_rate(traj, std::max(1, N / 10), N).slope;
    } catch (const std::invalid_argument&) {
      // window had nonpositive residuals; leave the slope unset
    }
  }
  return s;
}

SvgSeries residual_series(const std::string& label, const Trajectory& traj) {
  SvgSeries s;
  s.label = label;
  for (const auto& rec : traj.records) {
    if (rec.t < 1) continue;
    const auto& res = rec.residuals;
    const double r = res.certified ? *res.certified : res.natural;
    if (r > 0.0) s.points.emplace_back(double(rec.t), r);
  }
  return s;
}

}  // namespace

InclusionProblem parse_problem_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string params = (colon == std::string::npos) ? "" : spec.substr(colon + 1);

  if (name == "antidiagonal") {
    auto kv = parse_params(params, {"n"}, "problem antidiagonal");
    const int n = kv.count("n") ? static_cast<int>(kv["n"]) : 100;
    return make_antidiagonal_problem(n);
  }
  if (name == "rotation") {
    auto kv = parse_params(params, {"L", "theta", "costheta"}, "problem rotation");
    const double L = kv.count("L") ? kv["L"] : 1.0;
    if (kv.count("theta") && kv.count("costheta"))
      throw std::invalid_argument("problem rotation: give either theta or costheta, not both");
    double theta;
    if (kv.count("theta"))
      theta = kv["theta"];
    else if (kv.count("costheta"))
      theta = std::acos(kv["costheta"]);
    else
      throw std::invalid_argument("problem rotation: missing parameter theta (or costheta)");
    return make_rotation_problem(L, theta);
  }
  if (name == "bilinear_box") {
    auto kv = parse_params(params, {"n", "bound"}, "problem bilinear_box");
    const int n = kv.count("n") ? static_cast<int>(kv["n"]) : 2;
    const double bound = kv.count("bound") ? kv["bound"] : 1.0;
    return make_bilinear_box_problem(n, bound);
  }
  throw std::invalid_argument("unknown problem \"" + name +
                              "\" (want antidiagonal|rotation|bilinear_box)");
}

ExperimentConfig experiment_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  static const std::set<std::string> top = {"problem", "algorithms", "audits", "output_dir",
                                            "record_every"};
  for (const auto& [key, _] : j.items())
    if (!top.count(key)) throw std::invalid_argument("config: unknown key \"" + key + "\"");

  ExperimentConfig cfg;
  if (j.contains("problem")) cfg.problem = j.at("problem").get<std::string>();
  if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
  if (j.contains("record_every")) {
    cfg.record_every = j.at("record_every").get<int>();
    if (cfg.record_every < 1)
      throw std::invalid_argument("config: record_every must be at least 1");
  }
  if (j.contains("audits")) {
    for (const auto& a : j.at("audits")) {
      const std::string name = a.get<std::string>();
      if (!kKnownAudits.count(name))
        throw std::invalid_argument("config: unknown audit \"" + name + "\"");
      cfg.audits.push_back(name);
    }
  }
  if (j.contains("algorithms")) {
    static const std::set<std::string> keys = {"algorithm",     "eta",  "max_iterations",
                                               "stop_epsilon",  "seed", "initial_point",
                                               "label"};
    for (const auto& a : j.at("algorithms")) {
      if (!a.is_object())
        throw std::invalid_argument("config: algorithms entries must be objects");
      for (const auto& [key, _] : a.items())
        if (!keys.count(key))
          throw std::invalid_argument("config: unknown algorithm key \"" + key + "\"");
      AlgorithmRun run;
      run.config.algorithm = algorithm_from_name(a.at("algorithm").get<std::string>());
      if (a.contains("eta")) run.config.eta = a.at("eta").get<double>();
      if (a.contains("max_iterations"))
        run.config.max_iterations = a.at("max_iterations").get<int>();
      if (a.contains("stop_epsilon")) run.config.stop_epsilon = a.at("stop_epsilon").get<double>();
      if (a.contains("seed")) run.config.seed = a.at("seed").get<std::uint64_t>();
      if (a.contains("label")) run.label = a.at("label").get<std::string>();
      if (a.contains("initial_point")) {
        const auto& ip = a.at("initial_point");
        if (ip.is_string()) {
          run.initial = ip.get<std::string>();
          if (run.initial != "ones" && run.initial != "zeros")
            throw std::invalid_argument("config: initial_point fill must be ones or zeros, got \"" +
                                        run.initial + "\"");
        } else if (ip.is_array()) {
          run.initial = "custom";
          run.config.initial_point.resize(ip.size());
          for (std::size_t i = 0; i < ip.size(); ++i)
            run.config.initial_point[static_cast<Eigen::Index>(i)] = ip.at(i).get<double>();
        } else {
          throw std::invalid_argument("config: initial_point must be a string or number array");
        }
      }
      cfg.algorithms.push_back(std::move(run));
    }
  }
  return cfg;
}

std::string format_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json summary_to_json(const RunSummary& s) {
  nlohmann::json j;
  j["label"] = s.label;
  j["algorithm"] = s.algorithm;
  j["problem"] = s.problem;
  j["iterations_used"] = s.iterations_used;
  j["gradient_calls"] = s.gradient_calls;
  j["resolvent_calls"] = s.resolvent_calls;
  j["final_residual"] = s.final_residual;
  j["wall_time_seconds"] = s.wall_time_seconds;
  j["terminated_by"] = s.terminated_by;
  if (s.fitted_slope)
    j["fitted_slope"] = *s.fitted_slope;
  else
    j["fitted_slope"] = nullptr;
  j["warnings"] = s.warnings;
  nlohmann::json audits = nlohmann::json::array();
  for (const auto& a : s.audits) {
    nlohmann::json aj;
    aj["audit_name"] = a.audit_name;
    aj["passed"] = a.passed;
    aj["worst_violation"] = a.worst_violation;
    aj["worst_iteration"] = a.worst_iteration;
    aj["tolerance"] = a.tolerance;
    aj["constants"] = a.constants;
    audits.push_back(aj);
  }
  j["audits"] = audits;
  return j;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, int record_every,
                          bool with_potential) {
  if (record_every < 1) throw std::invalid_argument("write_trajectory_csv: record_every >= 1");
  const Algorithm alg = traj.config.algorithm;
  out << "t,residual_natural,residual_certified,residual_tangent,grad_calls,resolvent_calls,"
         "z_norm,potential\n";
  const int last = traj.records.back().t;
  for (const auto& rec : traj.records) {
    if (rec.t % record_every != 0 && rec.t != last) continue;
    out << rec.t << ',' << format_float(rec.residuals.natural) << ',';
    if (rec.residuals.certified) out << format_float(*rec.residuals.certified);
    out << ',';
    if (rec.residuals.tangent_exact) out << format_float(*rec.residuals.tangent_exact);
    out << ',' << rec.grad_calls << ',' << rec.resolvent_calls << ','
        << format_float(rec.z.norm()) << ',';
    if (with_potential && rec.t >= 1) {
      if (alg == Algorithm::RG)
        out << format_float(potential_P(traj, rec.t));
      else if (alg == Algorithm::ARG)
        out << format_float(potential_V(traj, rec.t));
    }
    out << '\n';
  }
}

void write_loglog_svg(std::ostream& out, const std::string& title,
                      const std::vector<SvgSeries>& series) {
  const double width = 760, height = 520;
  const double ml = 70, mr = 160, mt = 40, mb = 50;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (x <= 0.0 || y <= 0.0) continue;
      xmin = std::min(xmin, std::log10(x));
      xmax = std::max(xmax, std::log10(x));
      ymin = std::min(ymin, std::log10(y));
      ymax = std::max(ymax, std::log10(y));
    }
  if (xmin > xmax) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax - xmin < 1e-12) xmax = xmin + 1;
  if (ymax - ymin < 1e-12) ymax = ymin + 1;

  auto X = [&](double lx) { return ml + (lx - xmin) / (xmax - xmin) * pw; };
  auto Y = [&](double ly) { return mt + (ymax - ly) / (ymax - ymin) * ph; };
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };

  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b"};

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << ml << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">" << title
      << "</text>\n";

  // decade gridlines with labels
  for (int e = static_cast<int>(std::ceil(xmin)); e <= static_cast<int>(std::floor(xmax)); ++e) {
    const double x = X(e);
    out << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(x) << "\" y2=\""
        << fmt(mt + ph) << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(mt + ph + 18)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">1e" << e
        << "</text>\n";
  }
  for (int e = static_cast<int>(std::ceil(ymin)); e <= static_cast<int>(std::floor(ymax)); ++e) {
    const double y = Y(e);
    out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(ml + pw)
        << "\" y2=\"" << fmt(y) << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << fmt(ml - 8) << "\" y=\"" << fmt(y + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e" << e
        << "</text>\n";
  }
  out << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\"" << fmt(pw)
      << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(height - 10)
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">iteration"
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << fmt(mt + ph / 2)
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 16 "
      << fmt(mt + ph / 2) << ")\">residual</text>\n";

  int idx = 0;
  for (const auto& s : series) {
    const char* color = palette[idx % 6];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : s.points) {
      if (x <= 0.0 || y <= 0.0) continue;
      out << fmt(X(std::log10(x))) << ',' << fmt(Y(std::log10(y))) << ' ';
    }
    out << "\"/>\n";
    const double ly = mt + 16 + 18 * idx;
    out << "<line x1=\"" << fmt(ml + pw + 10) << "\" y1=\"" << fmt(ly) << "\" x2=\""
        << fmt(ml + pw + 34) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << fmt(ml + pw + 40) << "\" y=\"" << fmt(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
    ++idx;
  }
  out << "</svg>\n";
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream& log) {
  if (config.algorithms.empty())
    throw std::invalid_argument("config: no algorithms requested");
  if (config.record_every < 1)
    throw std::invalid_argument("config: record_every must be at least 1");
  for (const auto& name : config.audits)
    if (!kKnownAudits.count(name))
      throw std::invalid_argument("config: unknown audit \"" + name + "\"");

  const InclusionProblem problem = parse_problem_spec(config.problem);
  std::filesystem::create_directories(config.output_dir);

  ExperimentResult result;
  std::vector<SvgSeries> series;
  std::set<std::string> used_labels;

  for (const auto& spec : config.algorithms) {
    AlgorithmConfig cfg = spec.config;
    cfg.initial_point = resolve_initial(spec, problem.dim);
    const std::string label = unique_label(spec, used_labels);

    const auto t0 = std::chrono::steady_clock::now();
    Trajectory traj = run(problem, cfg);
    const double wall = wall_seconds(t0);
    if (traj.terminated_by == Termination::Divergence) result.diverged = true;

    RunSummary summary = summarize(label, config.problem, traj, wall);
    bool with_potential = false;
    for (const auto& name : config.audits) {
      if (!audit_applies(name, cfg.algorithm)) continue;
      summary.audits.push_back(run_audit(name, traj));
      if (name == "rg_potential" || name == "arg_potential") with_potential = true;
    }

    const auto csv_path = std::filesystem::path(config.output_dir) / (label + "_trajectory.csv");
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
    write_trajectory_csv(csv, traj, config.record_every, with_potential);

    const auto json_path = std::filesystem::path(config.output_dir) / (label + "_summary.json");
    std::ofstream js(json_path);
    if (!js) throw std::runtime_error("cannot write " + json_path.string());
    js << summary_to_json(summary).dump(2) << '\n';

    series.push_back(residual_series(label, traj));
    log << label << ": " << summary.terminated_by << " after " << summary.iterations_used
        << " iterations, " << summary.gradient_calls << " gradient calls, final residual "
        << summary.final_residual << '\n';
    for (const auto& w : traj.warnings) log << "  warning: " << w << '\n';
    for (const auto& a : summary.audits)
      log << "  audit " << a.audit_name << ": " << (a.passed ? "pass" : "FAIL")
          << " (worst violation " << a.worst_violation << ", tolerance " << a.tolerance << ")\n";

    result.summaries.push_back(std::move(summary));
  }

  const auto svg_path = std::filesystem::path(config.output_dir) / "residuals.svg";
  std::ofstream svg(svg_path);
  if (!svg) throw std::runtime_error("cannot write " + svg_path.string());
  write_loglog_svg(svg, "certified residual, " + config.problem, series);
  return result;
}

ComparisonResult run_reference_comparison(int n, const std::string& output_dir,
                                          std::ostream& log) {
  const std::string problem = "antidiagonal:n=" + std::to_string(n);
  std::filesystem::create_directories(output_dir);

  struct Entry {
    Algorithm alg;
    double eta;
    double eps;
    std::string label;
  };
  const std::vector<Entry> entries = {{Algorithm::EG, 0.4, 1e-3, "eg-0.4"},
                                      {Algorithm::RG, 0.4, 1e-3, "rg-0.4"},
                                      {Algorithm::EG, 0.7, 1e-3, "eg-0.7"},
                                      {Algorithm::ARG, 0.5, 1e-2, "arg-0.5"}};

  ComparisonResult result;
  std::vector<SvgSeries> race_series, anchored_series;
  const InclusionProblem p = parse_problem_spec(problem);

  log << "label      eta   iterations  grad_calls  resolvent_calls  final_residual  stop\n";
  for (const auto& e : entries) {
    AlgorithmConfig cfg;
    cfg.algorithm = e.alg;
    cfg.eta = e.eta;
    cfg.max_iterations = 100000;
    cfg.stop_epsilon = e.eps;
    cfg.initial_point = Vec::Constant(p.dim, 1.0);

    const auto t0 = std::chrono::steady_clock::now();
    Trajectory traj = run(p, cfg);
    const double wall = wall_seconds(t0);

    RunSummary s = summarize(e.label, problem, traj, wall);
    std::ofstream csv(std::filesystem::path(output_dir) / (e.label + "_trajectory.csv"));
    write_trajectory_csv(csv, traj, 1, false);
    std::ofstream js(std::filesystem::path(output_dir) / (e.label + "_summary.json"));
    js << summary_to_json(s).dump(2) << '\n';

    char line[160];
    std::snprintf(line, sizeof(line), "%-10s %-5g %-11d %-11ld %-16ld %-15.6g %s\n",
                  e.label.c_str(), e.eta, s.iterations_used, s.gradient_calls, s.resolvent_calls,
                  s.final_residual, s.terminated_by.c_str());
    log << line;

    if (e.alg == Algorithm::ARG)
      anchored_series.push_back(residual_series(e.label, traj));
    else
      race_series.push_back(residual_series(e.label, traj));
    result.summaries.push_back(std::move(s));
  }

  {
    std::ofstream svg(std::filesystem::path(output_dir) / "comparison.svg");
    write_loglog_svg(svg, "operator-norm residual, " + problem, race_series);
  }
  {
    std::ofstream svg(std::filesystem::path(output_dir) / "anchored.svg");
    write_loglog_svg(svg, "anchored run, " + problem, anchored_series);
  }

  const auto& eg4 = result.summaries[0];
  const auto& rg4 = result.summaries[1];
  result.comparison_ok = eg4.terminated_by == "epsilon" && rg4.terminated_by == "epsilon" &&
                         rg4.gradient_calls < eg4.gradient_calls;
  log << (result.comparison_ok ? "comparison ok" : "comparison FAILED") << ": rg-0.4 used "
      << rg4.gradient_calls << " gradient calls vs eg-0.4's " << eg4.gradient_calls << '\n';
  return result;
}

}  // namespace ipsolve
