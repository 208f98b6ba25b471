// Command-line front end: solve runs the incremental method from a config
// file, validate reports schedule admissibility, reference approximates the
// regularized minimizer, rate-fit extracts an empirical decay exponent from a
// metrics CSV, gen writes generated problems to disk, and bench sweeps a grid
// of (x0, gamma0/lambda0, r) cells.
//
// Exit codes: 0 success, 1 usage/config error, 2 validation failure,
// 3 runtime failure.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "irig/irig.hpp"

namespace {

using namespace irig;

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_validation = 2;
constexpr int exit_runtime = 3;

std::string describe(const power_schedule &s) {
  std::ostringstream out;
  out << "gamma0=" << format_sig17(s.gamma0) << " lambda0=" << format_sig17(s.lambda0)
      << " a=" << format_sig17(s.a) << " b=" << format_sig17(s.b)
      << " r=" << format_sig17(s.r);
  return out.str();
}

void print_report(const schedule_report &rep, std::ostream &out) {
  const schedule_check all[] = {
      schedule_check::gamma0_lambda0_bound, schedule_check::a_gt_b,
      schedule_check::a_gt_half,            schedule_check::a_plus_b_lt_one,
      schedule_check::ar_le_one,            schedule_check::r_lt_one,
  };
  for (const auto c : all)
    out << "check " << to_string(c) << ": "
        << (rep.violated(c) ? "violated" : "ok") << "\n";
  out << "schedule: " << (rep.ok ? "admissible" : "inadmissible") << "\n";
}

struct solve_outcome {
  dense_vector x_bar;
  trace tr;
  schedule_report report;
};

solve_outcome run_from_config(const run_config &rc, const problem_instance &p,
                              const power_schedule &s, std::ostream *log) {
  run_options opts;
  opts.record_stride = rc.record_stride;
  opts.measure_time = rc.timing;
  opts.override_schedule_check = rc.override_schedule_check;
  opts.log = log;
  if (rc.estimate_f_star && !p.known_f_star()) {
    const auto ref =
        solve_regularized_reference(p, rc.estimate_lambda, rc.estimate_iters);
    opts.estimated_f_star = p.lower_value(ref);
    if (log)
      *log << "estimated f_star = " << format_sig17(*opts.estimated_f_star)
           << " (reference run, lambda=" << format_sig17(rc.estimate_lambda)
           << ", iters=" << rc.estimate_iters << ")\n";
  }
  auto res = run_irig(p, s, rc.iterations, rc.x0.materialize(p.dimension()), opts);
  return {std::move(res.x_bar), std::move(res.tr), validate(s, p.m(), p.mu_h())};
}

int cmd_solve(const std::string &config_path, const std::string &output_override) {
  run_config rc = load_run_config(config_path);
  if (!output_override.empty()) rc.output = output_override;

  const problem_instance p = build_problem(rc, &std::cerr);
  const power_schedule s = build_schedule(rc, p.m(), p.mu_h());
  const auto out = run_from_config(rc, p, s, &std::cerr);

  std::cout << "problem: m=" << p.m() << " n=" << p.dimension()
            << " mu_h=" << format_sig17(p.mu_h()) << "\n";
  std::cout << "schedule: " << describe(s)
            << (out.report.ok ? " (admissible)" : " (inadmissible, overridden)")
            << "\n";
  const auto &last = out.tr.rows.back();
  std::cout << "iterations: " << rc.iterations << "\n";
  std::cout << "f_bar: " << format_sig17(last.f_bar) << "\n";
  if (last.f_gap) std::cout << "f_gap: " << format_sig17(*last.f_gap) << "\n";
  std::cout << "h_bar: " << format_sig17(last.h_bar) << "\n";
  if (last.dist_xstar)
    std::cout << "dist_xstar: " << format_sig17(*last.dist_xstar) << "\n";
  if (!rc.output.empty()) {
    emit_metrics_csv(out.tr, rc.output);
    std::cout << "trace: " << rc.output << " (" << out.tr.size() << " rows)\n";
  }
  return exit_ok;
}

int cmd_validate(const std::string &config_path, std::optional<double> gamma0,
                 std::optional<double> lambda0, std::optional<double> a,
                 std::optional<double> b, std::optional<double> epsilon,
                 std::optional<double> r, std::optional<std::uint64_t> m,
                 std::optional<double> mu_h) {
  std::uint64_t m_eff = 0;
  double mu_eff = 0.0;
  std::optional<power_schedule> sched;

  if (!config_path.empty()) {
    run_config rc = load_run_config(config_path);
    const problem_instance p = build_problem(rc, &std::cerr);
    m_eff = p.m();
    mu_eff = p.mu_h();
    sched = build_schedule(rc, m_eff, mu_eff);
  }
  if (m) m_eff = *m;
  if (mu_h) mu_eff = *mu_h;
  if (m_eff == 0 || !(mu_eff > 0.0))
    throw config_error("validate needs --config or both --m and --mu-h");

  if (gamma0 || lambda0 || a || b || epsilon || r || !sched) {
    const double g0 = gamma0.value_or(sched ? sched->gamma0 : 1.0);
    const double l0 = lambda0.value_or(sched ? sched->lambda0 : 1.0);
    const double rr = r.value_or(sched ? sched->r : 0.5);
    if (a || b) {
      if (!a || !b) throw config_error("--a and --b must be given together");
      sched = power_schedule(g0, l0, *a, *b, rr);
    } else if (epsilon) {
      sched = rate_schedule(*epsilon, g0, l0, rr);
    } else if (sched) {
      sched = power_schedule(g0, l0, sched->a, sched->b, rr);
    } else {
      sched = rate_schedule(0.1, g0, l0, rr);
    }
  }

  std::cout << "schedule: " << describe(*sched) << "\n";
  std::cout << "problem: m=" << m_eff << " mu_h=" << format_sig17(mu_eff) << "\n";
  const auto rep = validate(*sched, m_eff, mu_eff);
  print_report(rep, std::cout);
  return rep.ok ? exit_ok : exit_validation;
}

int cmd_reference(const std::string &config_path, double lambda,
                  std::uint64_t iters, double step_scale) {
  run_config rc = load_run_config(config_path);
  const problem_instance p = build_problem(rc, &std::cerr);
  const auto x = solve_regularized_reference(p, lambda, iters, step_scale);
  std::cout << "lambda: " << format_sig17(lambda) << "\n";
  std::cout << "x_lambda:";
  for (double v : x) std::cout << ' ' << format_sig17(v);
  std::cout << "\n";
  std::cout << "f: " << format_sig17(p.lower_value(x)) << "\n";
  std::cout << "h: " << format_sig17(p.upper_value(x)) << "\n";
  return exit_ok;
}

int cmd_rate_fit(const std::string &csv_path, double burn_in) {
  const trace tr = parse_metrics_csv(csv_path);
  const auto fit = fit_rate(tr, burn_in);
  std::cout << "rows_used: " << fit.used_rows << "\n";
  std::cout << "dropped_nonpositive: " << fit.dropped_nonpositive << "\n";
  std::cout << "slope: " << format_sig17(fit.slope) << "\n";
  std::cout << "intercept: " << format_sig17(fit.intercept) << "\n";
  return exit_ok;
}

std::string render_config_for_selection(const selection_spec &spec) {
  std::ostringstream out;
  out << "[problem]\nkind = selection\n";
  out << "dimension = " << spec.dimension << "\n";
  out << "components = " << spec.components << "\n";
  out << "box_halfwidth = " << format_sig17(spec.box_halfwidth) << "\n";
  if (spec.upper == upper_kind::quadratic) {
    out << "upper = quadratic\ncenter = ";
    for (std::size_t j = 0; j < spec.center.size(); ++j)
      out << (j ? "," : "") << format_sig17(spec.center[j]);
    out << "\n";
  } else {
    out << "upper = elastic_net\n";
  }
  out << "mu_h = " << format_sig17(spec.mu_h) << "\n";
  out << "\n[schedule]\nepsilon = 0.1\nr = 0.5\n";
  out << "\n[run]\niterations = 100000\nx0 = zero\nrecord_stride = 1\n"
         "output = trace.csv\nseed = 1\n";
  return out.str();
}

std::string render_config_for_constrained(const constrained_spec &spec) {
  std::ostringstream out;
  out << "[problem]\nkind = constrained\nconstraints = ";
  for (std::size_t i = 0; i < spec.constraints.size(); ++i) {
    if (i) out << ";";
    const auto &[c, d] = spec.constraints[i];
    for (std::size_t j = 0; j < c.size(); ++j)
      out << (j ? "," : "") << format_sig17(c[j]);
    out << ":" << format_sig17(d);
  }
  out << "\n";
  out << "box_halfwidth = " << format_sig17(spec.box_halfwidth) << "\n";
  out << "upper = " << (spec.upper == upper_kind::quadratic ? "quadratic" : "elastic_net")
      << "\n";
  out << "mu_h = " << format_sig17(spec.mu_h) << "\n";
  out << "\n[schedule]\nepsilon = 0.1\nr = 0.5\n";
  out << "\n[run]\niterations = 100000\nx0 = zero\nrecord_stride = 1\n"
         "output = trace.csv\nseed = 1\n";
  return out.str();
}

int cmd_gen(const std::string &kind, const std::string &out_path,
            std::uint64_t dimension, std::uint64_t components, double box_halfwidth,
            const std::string &upper, const std::string &center_text, double mu_h,
            const std::string &constraints_text, std::uint64_t samples,
            double sparsity, double flip_probability, std::uint64_t seed) {
  if (kind == "hinge_synthetic") {
    synthetic_spec spec;
    spec.dimension = dimension;
    spec.samples = samples;
    spec.sparsity = sparsity;
    spec.flip_probability = flip_probability;
    spec.seed = seed;
    save_svmlight(gen_synthetic_dataset(spec), out_path);
    std::cout << "wrote " << samples << " samples (dimension " << dimension
              << ") to " << out_path << "\n";
    std::cout << "use with: [problem] kind = hinge_dataset, data = " << out_path
              << "\n";
    return exit_ok;
  }

  const upper_kind uk = [&] {
    if (upper == "quadratic") return upper_kind::quadratic;
    if (upper == "elastic_net") return upper_kind::elastic;
    throw config_error("--upper must be quadratic or elastic_net");
  }();

  std::string text;
  if (kind == "selection") {
    selection_spec spec;
    spec.dimension = dimension;
    spec.components = components;
    spec.box_halfwidth = box_halfwidth;
    spec.upper = uk;
    spec.mu_h = mu_h;
    if (!center_text.empty())
      spec.center = detail::to_vector(center_text, "--center");
    else if (uk == upper_kind::quadratic && dimension != 2)
      throw config_error("--center is required for quadratic uppers when n != 2");
    gen_selection_problem(spec);  // validates
    text = render_config_for_selection(spec);
  } else if (kind == "constrained") {
    if (constraints_text.empty())
      throw config_error("--constraints is required for kind=constrained");
    constrained_spec spec;
    for (const auto &item : detail::split(constraints_text, ';')) {
      const auto colon = item.rfind(':');
      if (colon == std::string::npos)
        throw config_error("--constraints: expected 'c1,c2,...:d' items");
      spec.constraints.emplace_back(
          detail::to_vector(item.substr(0, colon), "--constraints"),
          detail::to_double(item.substr(colon + 1), "--constraints"));
    }
    spec.box_halfwidth = box_halfwidth;
    spec.upper = uk;
    spec.mu_h = mu_h;
    if (!center_text.empty())
      spec.center = detail::to_vector(center_text, "--center");
    gen_constrained_problem(spec);  // validates, runs the feasibility probe
    text = render_config_for_constrained(spec);
  } else {
    throw config_error("--kind must be selection, constrained or hinge_synthetic");
  }

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
  out << text;
  std::cout << "wrote problem config to " << out_path << "\n";
  return exit_ok;
}

struct bench_cell {
  double x0_const;
  double gamma0;
  double lambda0;
  double r;
  std::string name;
  std::string summary;
};

int cmd_bench(const std::string &config_path, const std::string &dir_override,
              std::uint64_t jobs_override) {
  run_config rc = load_run_config(config_path);
  if (!dir_override.empty()) rc.bench_output_dir = dir_override;
  if (jobs_override != 0) rc.bench_jobs = jobs_override;

  const problem_instance p = build_problem(rc, &std::cerr);
  std::filesystem::create_directories(rc.bench_output_dir);

  std::vector<bench_cell> cells;
  for (const double x0c : rc.bench_x0_consts)
    for (const auto &[g0, l0] : rc.bench_gamma_lambda)
      for (const double r : rc.bench_r_values) {
        bench_cell cell{x0c, g0, l0, r, "", ""};
        std::ostringstream name;
        name << "x0_" << x0c << "_g" << g0 << "_l" << l0 << "_r" << r << ".csv";
        cell.name = name.str();
        cells.push_back(std::move(cell));
      }

  const std::uint64_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::uint64_t jobs =
      std::min<std::uint64_t>(rc.bench_jobs == 0 ? hw : rc.bench_jobs, cells.size());

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      bench_cell &cell = cells[i];
      try {
        run_config cell_rc = rc;
        cell_rc.gamma0 = cell.gamma0;
        cell_rc.lambda0 = cell.lambda0;
        cell_rc.r = cell.r;
        cell_rc.x0 = x0_spec::parse("constant:" + format_sig17(cell.x0_const));
        cell_rc.override_schedule_check = true;
        cell_rc.output.clear();
        const power_schedule s = build_schedule(cell_rc, p.m(), p.mu_h());
        const auto out = run_from_config(cell_rc, p, s, nullptr);
        emit_metrics_csv(out.tr,
                         (std::filesystem::path(rc.bench_output_dir) / cell.name)
                             .string());
        std::ostringstream sum;
        sum << cell.name << ": f_bar=" << format_sig17(out.tr.rows.back().f_bar)
            << (out.report.ok ? " (admissible)" : " (inadmissible)");
        cell.summary = sum.str();
      } catch (const std::exception &e) {
        cell.summary = cell.name + ": failed: " + e.what();
        failed = true;
      }
    }
  };

  std::vector<std::thread> pool;
  for (std::uint64_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto &t : pool) t.join();

  for (const auto &cell : cells) std::cout << cell.summary << "\n";
  std::cout << "bench: " << cells.size() << " cells, output in "
            << rc.bench_output_dir << "\n";
  return failed ? exit_runtime : exit_ok;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Iteratively regularized incremental projected subgradient solver"};
  app.require_subcommand(1);

  std::string config_path, output_path, csv_path, out_path;
  double burn_in = 0.2;
  double lambda = 1e-3;
  std::uint64_t iters = 100000;
  double step_scale = 1.0;

  auto *solve = app.add_subcommand("solve", "run the solver from a config file");
  solve->add_option("--config", config_path, "run config file")->required();
  solve->add_option("--output", output_path, "override the trace CSV path");

  std::optional<double> v_gamma0, v_lambda0, v_a, v_b, v_eps, v_r, v_mu;
  std::optional<std::uint64_t> v_m;
  auto *vali = app.add_subcommand("validate", "report schedule admissibility");
  vali->add_option("--config", config_path, "run config file");
  vali->add_option("--gamma0", v_gamma0, "gamma0");
  vali->add_option("--lambda0", v_lambda0, "lambda0");
  vali->add_option("--a", v_a, "gamma exponent");
  vali->add_option("--b", v_b, "lambda exponent");
  vali->add_option("--epsilon", v_eps, "rate parameter in (0, 0.5)");
  vali->add_option("--r", v_r, "averaging exponent");
  vali->add_option("--m", v_m, "number of lower-level components");
  vali->add_option("--mu-h", v_mu, "upper-level strong convexity modulus");

  auto *ref = app.add_subcommand("reference",
                                 "approximate the lambda-regularized minimizer");
  ref->add_option("--config", config_path, "run config file")->required();
  ref->add_option("--lambda", lambda, "regularization weight")->required();
  ref->add_option("--iters", iters, "projected subgradient iterations");
  ref->add_option("--step-scale", step_scale, "step numerator c");

  auto *fit = app.add_subcommand("rate-fit", "fit a decay slope to a metrics CSV");
  fit->add_option("--csv", csv_path, "metrics CSV path")->required();
  fit->add_option("--burn-in", burn_in, "fraction of rows to discard");

  std::string gen_kind = "selection", gen_upper = "quadratic", gen_center,
              gen_constraints;
  std::uint64_t gen_dimension = 2, gen_components = 2, gen_samples = 2000,
                gen_seed = 1;
  double gen_halfwidth = 2.0, gen_mu = 1.0, gen_sparsity = 0.05, gen_flip = 0.02;
  auto *gen = app.add_subcommand("gen", "write a generated problem to disk");
  gen->add_option("--kind", gen_kind, "selection | constrained | hinge_synthetic");
  gen->add_option("--out", out_path, "output path")->required();
  gen->add_option("--dimension", gen_dimension, "problem dimension");
  gen->add_option("--components", gen_components, "lower-level multiplicity");
  gen->add_option("--box-halfwidth", gen_halfwidth, "feasible box halfwidth");
  gen->add_option("--upper", gen_upper, "quadratic | elastic_net");
  gen->add_option("--center", gen_center, "quadratic center, comma separated");
  gen->add_option("--mu-h", gen_mu, "upper-level modulus");
  gen->add_option("--constraints", gen_constraints, "items 'c1,c2,...:d' joined by ';'");
  gen->add_option("--samples", gen_samples, "synthetic sample count");
  gen->add_option("--sparsity", gen_sparsity, "nonzero feature fraction");
  gen->add_option("--flip-probability", gen_flip, "label noise");
  gen->add_option("--seed", gen_seed, "generator seed");

  std::string bench_dir;
  std::uint64_t bench_jobs = 0;
  auto *bench = app.add_subcommand("bench", "sweep a grid of schedule cells");
  bench->add_option("--config", config_path, "run config file")->required();
  bench->add_option("--output-dir", bench_dir, "directory for per-cell CSVs");
  bench->add_option("--jobs", bench_jobs, "worker count (0 = hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (solve->parsed()) return cmd_solve(config_path, output_path);
    if (vali->parsed())
      return cmd_validate(config_path, v_gamma0, v_lambda0, v_a, v_b, v_eps, v_r,
                          v_m, v_mu);
    if (ref->parsed()) return cmd_reference(config_path, lambda, iters, step_scale);
    if (fit->parsed()) return cmd_rate_fit(csv_path, burn_in);
    if (gen->parsed())
      return cmd_gen(gen_kind, out_path, gen_dimension, gen_components,
                     gen_halfwidth, gen_upper, gen_center, gen_mu, gen_constraints,
                     gen_samples, gen_sparsity, gen_flip, gen_seed);
    if (bench->parsed()) return cmd_bench(config_path, bench_dir, bench_jobs);
  } catch (const config_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const validation_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_validation;
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_runtime;
  }
  return exit_usage;
}
