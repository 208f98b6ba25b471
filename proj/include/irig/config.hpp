#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "irig/dataset.hpp"
#include "irig/format.hpp"
#include "irig/generators.hpp"
#include "irig/schedule.hpp"

namespace irig {

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string &s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

// Raw sectioned key-value file:
//   # full-line comments and blank lines are skipped
//   [section]
//   key = value
// Every (section, key) pair must be known to the consumer and may appear at
// most once.
class config_data {
 public:
  static config_data parse_text(const std::string &text) {
    config_data cfg;
    std::istringstream in(text);
    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string t = detail::trim(line);
      if (t.empty() || t[0] == '#') continue;
      if (t.front() == '[') {
        if (t.back() != ']')
          throw config_error("config line " + std::to_string(line_no) +
                             ": unterminated section header");
        section = detail::trim(t.substr(1, t.size() - 2));
        if (section.empty())
          throw config_error("config line " + std::to_string(line_no) +
                             ": empty section name");
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        throw config_error("config line " + std::to_string(line_no) +
                           ": expected 'key = value'");
      if (section.empty())
        throw config_error("config line " + std::to_string(line_no) +
                           ": key outside any [section]");
      const std::string key = detail::trim(t.substr(0, eq));
      const std::string value = detail::trim(t.substr(eq + 1));
      if (key.empty())
        throw config_error("config line " + std::to_string(line_no) + ": empty key");
      if (!cfg.entries_[section].emplace(key, value).second)
        throw config_error("config line " + std::to_string(line_no) +
                           ": duplicate key '" + section + "." + key + "'");
    }
    return cfg;
  }

  static config_data parse_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str());
  }

  bool has_section(const std::string &section) const {
    return entries_.count(section) != 0;
  }

  std::optional<std::string> take(const std::string &section, const std::string &key) {
    auto sec = entries_.find(section);
    if (sec == entries_.end()) return std::nullopt;
    auto it = sec->second.find(key);
    if (it == sec->second.end()) return std::nullopt;
    std::string v = it->second;
    sec->second.erase(it);
    return v;
  }

  // After resolution every key must have been consumed.
  void require_all_consumed() const {
    for (const auto &[section, kv] : entries_)
      for (const auto &[key, value] : kv)
        throw config_error("unknown config key '" + section + "." + key + "'");
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> entries_;
};

namespace detail {

inline double to_double(const std::string &v, const std::string &where) {
  try {
    return parse_finite_double(v, where.c_str());
  } catch (const std::exception &) {
    throw config_error("config key " + where + ": cannot parse number '" + v + "'");
  }
}

inline std::uint64_t to_uint(const std::string &v, const std::string &where) {
  // plain integers parse exactly; scientific forms like 1e6 go through double
  std::uint64_t u = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), u);
  if (res.ec == std::errc{} && res.ptr == v.data() + v.size()) return u;
  const double d = to_double(v, where);
  if (d < 0 || d != static_cast<double>(static_cast<std::uint64_t>(d)))
    throw config_error("config key " + where + ": expected a non-negative integer");
  return static_cast<std::uint64_t>(d);
}

inline bool to_bool(const std::string &v, const std::string &where) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw config_error("config key " + where + ": expected true/false");
}

inline dense_vector to_vector(const std::string &v, const std::string &where) {
  std::vector<double> out;
  for (const auto &tok : split(v, ',')) out.push_back(to_double(tok, where));
  return dense_vector(std::move(out));
}

}  // namespace detail

enum class problem_kind { selection, constrained, hinge_synthetic, hinge_dataset };

struct x0_spec {
  enum class kind { zero, constant, vector };
  kind k = kind::zero;
  double value = 0.0;
  dense_vector explicit_vector;

  static x0_spec parse(const std::string &text) {
    x0_spec spec;
    if (text == "zero") return spec;
    if (text.rfind("constant:", 0) == 0) {
      spec.k = kind::constant;
      spec.value = detail::to_double(text.substr(9), "run.x0");
      return spec;
    }
    if (text.rfind("vector:", 0) == 0) {
      spec.k = kind::vector;
      spec.explicit_vector = detail::to_vector(text.substr(7), "run.x0");
      return spec;
    }
    throw config_error("run.x0: expected zero | constant:<c> | vector:v1,v2,...");
  }

  dense_vector materialize(std::size_t n) const {
    switch (k) {
      case kind::zero: return dense_vector(n, 0.0);
      case kind::constant: return dense_vector(n, value);
      case kind::vector:
        if (explicit_vector.size() != n)
          throw config_error("run.x0: vector dimension does not match the problem");
        return explicit_vector;
    }
    throw config_error("run.x0: invalid spec");
  }
};

// Fully resolved run description: problem generator parameters, schedule
// parameters and run knobs, as read from a config file.
struct run_config {
  problem_kind kind = problem_kind::selection;

  selection_spec selection;
  constrained_spec constrained;

  synthetic_spec synthetic;
  std::string data_path;
  std::optional<std::size_t> data_dimension;
  std::size_t batches = 20;
  double hinge_mu_h = 0.1;
  double hinge_box_halfwidth = 1e3;

  std::optional<double> gamma0, lambda0;
  std::optional<double> exp_a, exp_b;
  double epsilon = 0.1;
  double r = 0.5;

  std::uint64_t iterations = 1000;
  x0_spec x0;
  std::uint64_t record_stride = 1;
  std::string output;
  std::uint64_t seed = 1;
  bool timing = false;
  bool override_schedule_check = false;
  bool estimate_f_star = false;
  double estimate_lambda = 1e-4;
  std::uint64_t estimate_iters = 1000000;

  std::vector<double> bench_x0_consts{-10.0, 0.0, 10.0};
  std::vector<std::pair<double, double>> bench_gamma_lambda{{10.0, 1.0},
                                                            {1.0, 10.0},
                                                            {0.1, 0.1}};
  std::vector<double> bench_r_values{0.5, 0.0, -1.0};
  std::string bench_output_dir = "bench_out";
  std::uint64_t bench_jobs = 0;  // 0 = hardware concurrency
};

inline run_config resolve_run_config(config_data cfg) {
  run_config rc;

  const auto kind = cfg.take("problem", "kind");
  if (!kind) throw config_error("missing required key problem.kind");
  if (*kind == "selection") rc.kind = problem_kind::selection;
  else if (*kind == "constrained") rc.kind = problem_kind::constrained;
  else if (*kind == "hinge_synthetic") rc.kind = problem_kind::hinge_synthetic;
  else if (*kind == "hinge_dataset") rc.kind = problem_kind::hinge_dataset;
  else
    throw config_error("problem.kind: expected selection | constrained | "
                       "hinge_synthetic | hinge_dataset");

  using detail::to_bool;
  using detail::to_double;
  using detail::to_uint;
  using detail::to_vector;

  switch (rc.kind) {
    case problem_kind::selection: {
      if (auto v = cfg.take("problem", "dimension"))
        rc.selection.dimension = to_uint(*v, "problem.dimension");
      if (auto v = cfg.take("problem", "components"))
        rc.selection.components = to_uint(*v, "problem.components");
      if (auto v = cfg.take("problem", "box_halfwidth"))
        rc.selection.box_halfwidth = to_double(*v, "problem.box_halfwidth");
      if (auto v = cfg.take("problem", "upper")) {
        if (*v == "quadratic") rc.selection.upper = upper_kind::quadratic;
        else if (*v == "elastic_net") rc.selection.upper = upper_kind::elastic;
        else throw config_error("problem.upper: expected quadratic | elastic_net");
      }
      if (auto v = cfg.take("problem", "center"))
        rc.selection.center = to_vector(*v, "problem.center");
      if (auto v = cfg.take("problem", "mu_h"))
        rc.selection.mu_h = to_double(*v, "problem.mu_h");
      if (rc.selection.upper == upper_kind::quadratic &&
          rc.selection.center.size() != rc.selection.dimension)
        throw config_error("problem.center: dimension mismatch");
      break;
    }
    case problem_kind::constrained: {
      const auto cons = cfg.take("problem", "constraints");
      if (!cons) throw config_error("missing required key problem.constraints");
      for (const auto &item : detail::split(*cons, ';')) {
        const auto colon = item.rfind(':');
        if (colon == std::string::npos)
          throw config_error("problem.constraints: expected 'c1,c2,...:d' items");
        rc.constrained.constraints.emplace_back(
            to_vector(item.substr(0, colon), "problem.constraints"),
            to_double(item.substr(colon + 1), "problem.constraints"));
      }
      if (auto v = cfg.take("problem", "box_halfwidth"))
        rc.constrained.box_halfwidth = to_double(*v, "problem.box_halfwidth");
      if (auto v = cfg.take("problem", "upper")) {
        if (*v == "quadratic") rc.constrained.upper = upper_kind::quadratic;
        else if (*v == "elastic_net") rc.constrained.upper = upper_kind::elastic;
        else throw config_error("problem.upper: expected quadratic | elastic_net");
      }
      if (auto v = cfg.take("problem", "center"))
        rc.constrained.center = to_vector(*v, "problem.center");
      if (auto v = cfg.take("problem", "mu_h"))
        rc.constrained.mu_h = to_double(*v, "problem.mu_h");
      if (auto v = cfg.take("problem", "probe_iters"))
        rc.constrained.probe_iters = to_uint(*v, "problem.probe_iters");
      if (auto v = cfg.take("problem", "probe_tol"))
        rc.constrained.probe_tol = to_double(*v, "problem.probe_tol");
      break;
    }
    case problem_kind::hinge_synthetic: {
      if (auto v = cfg.take("problem", "dimension"))
        rc.synthetic.dimension = to_uint(*v, "problem.dimension");
      if (auto v = cfg.take("problem", "samples"))
        rc.synthetic.samples = to_uint(*v, "problem.samples");
      if (auto v = cfg.take("problem", "sparsity"))
        rc.synthetic.sparsity = to_double(*v, "problem.sparsity");
      if (auto v = cfg.take("problem", "flip_probability"))
        rc.synthetic.flip_probability = to_double(*v, "problem.flip_probability");
      if (auto v = cfg.take("problem", "data_seed"))
        rc.synthetic.seed = to_uint(*v, "problem.data_seed");
      if (auto v = cfg.take("problem", "batches"))
        rc.batches = to_uint(*v, "problem.batches");
      if (auto v = cfg.take("problem", "mu_h"))
        rc.hinge_mu_h = to_double(*v, "problem.mu_h");
      if (auto v = cfg.take("problem", "box_halfwidth"))
        rc.hinge_box_halfwidth = to_double(*v, "problem.box_halfwidth");
      break;
    }
    case problem_kind::hinge_dataset: {
      const auto data = cfg.take("problem", "data");
      if (!data) throw config_error("missing required key problem.data");
      rc.data_path = *data;
      if (auto v = cfg.take("problem", "dimension"))
        rc.data_dimension = to_uint(*v, "problem.dimension");
      if (auto v = cfg.take("problem", "batches"))
        rc.batches = to_uint(*v, "problem.batches");
      if (auto v = cfg.take("problem", "mu_h"))
        rc.hinge_mu_h = to_double(*v, "problem.mu_h");
      if (auto v = cfg.take("problem", "box_halfwidth"))
        rc.hinge_box_halfwidth = to_double(*v, "problem.box_halfwidth");
      break;
    }
  }

  if (auto v = cfg.take("schedule", "gamma0"))
    rc.gamma0 = to_double(*v, "schedule.gamma0");
  if (auto v = cfg.take("schedule", "lambda0"))
    rc.lambda0 = to_double(*v, "schedule.lambda0");
  if (auto v = cfg.take("schedule", "a")) rc.exp_a = to_double(*v, "schedule.a");
  if (auto v = cfg.take("schedule", "b")) rc.exp_b = to_double(*v, "schedule.b");
  if (auto v = cfg.take("schedule", "epsilon"))
    rc.epsilon = to_double(*v, "schedule.epsilon");
  if (auto v = cfg.take("schedule", "r")) rc.r = to_double(*v, "schedule.r");
  if (rc.exp_a.has_value() != rc.exp_b.has_value())
    throw config_error("schedule: a and b must be given together");

  if (auto v = cfg.take("run", "iterations"))
    rc.iterations = to_uint(*v, "run.iterations");
  if (auto v = cfg.take("run", "x0")) rc.x0 = x0_spec::parse(*v);
  if (auto v = cfg.take("run", "record_stride")) {
    rc.record_stride = to_uint(*v, "run.record_stride");
    if (rc.record_stride == 0)
      throw config_error("run.record_stride: must be >= 1");
  }
  if (auto v = cfg.take("run", "output")) rc.output = *v;
  if (auto v = cfg.take("run", "seed")) rc.seed = to_uint(*v, "run.seed");
  if (auto v = cfg.take("run", "timing")) {
    if (*v == "none") rc.timing = false;
    else if (*v == "wall") rc.timing = true;
    else throw config_error("run.timing: expected none | wall");
  }
  if (auto v = cfg.take("run", "override_schedule_check"))
    rc.override_schedule_check = to_bool(*v, "run.override_schedule_check");
  if (auto v = cfg.take("run", "estimate_f_star"))
    rc.estimate_f_star = to_bool(*v, "run.estimate_f_star");
  if (auto v = cfg.take("run", "estimate_lambda"))
    rc.estimate_lambda = to_double(*v, "run.estimate_lambda");
  if (auto v = cfg.take("run", "estimate_iters"))
    rc.estimate_iters = to_uint(*v, "run.estimate_iters");

  if (auto v = cfg.take("bench", "x0_constants")) {
    rc.bench_x0_consts.clear();
    for (const auto &tok : detail::split(*v, ','))
      rc.bench_x0_consts.push_back(to_double(tok, "bench.x0_constants"));
  }
  if (auto v = cfg.take("bench", "gamma_lambda")) {
    rc.bench_gamma_lambda.clear();
    for (const auto &item : detail::split(*v, ';')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos)
        throw config_error("bench.gamma_lambda: expected 'g:l' items");
      rc.bench_gamma_lambda.emplace_back(
          to_double(item.substr(0, colon), "bench.gamma_lambda"),
          to_double(item.substr(colon + 1), "bench.gamma_lambda"));
    }
  }
  if (auto v = cfg.take("bench", "r_values")) {
    rc.bench_r_values.clear();
    for (const auto &tok : detail::split(*v, ','))
      rc.bench_r_values.push_back(to_double(tok, "bench.r_values"));
  }
  if (auto v = cfg.take("bench", "output_dir")) rc.bench_output_dir = *v;
  if (auto v = cfg.take("bench", "jobs")) rc.bench_jobs = to_uint(*v, "bench.jobs");

  cfg.require_all_consumed();
  return rc;
}

inline run_config load_run_config(const std::string &path) {
  return resolve_run_config(config_data::parse_file(path));
}

inline problem_instance build_problem(const run_config &rc,
                                      std::ostream *log = nullptr) {
  switch (rc.kind) {
    case problem_kind::selection:
      return gen_selection_problem(rc.selection);
    case problem_kind::constrained:
      return gen_constrained_problem(rc.constrained);
    case problem_kind::hinge_synthetic: {
      synthetic_spec spec = rc.synthetic;
      return make_hinge_problem(gen_synthetic_dataset(spec), rc.batches,
                                rc.hinge_mu_h, rc.hinge_box_halfwidth);
    }
    case problem_kind::hinge_dataset:
      return make_hinge_problem(load_svmlight(rc.data_path, rc.data_dimension, log),
                                rc.batches, rc.hinge_mu_h, rc.hinge_box_halfwidth);
  }
  throw config_error("unreachable problem kind");
}

// Schedule resolution: explicit (a, b) win over epsilon; absent gamma0/lambda0
// default so that gamma0*lambda0 = min(1, 2m/mu_h).
inline power_schedule build_schedule(const run_config &rc, std::size_t m,
                                     double mu_h) {
  double g0, l0;
  const double budget = std::min(1.0, 2.0 * static_cast<double>(m) / mu_h);
  if (rc.gamma0 && rc.lambda0) {
    g0 = *rc.gamma0;
    l0 = *rc.lambda0;
  } else if (rc.gamma0) {
    g0 = *rc.gamma0;
    l0 = budget / g0;
  } else if (rc.lambda0) {
    l0 = *rc.lambda0;
    g0 = budget / l0;
  } else {
    g0 = l0 = std::sqrt(budget);
  }
  if (rc.exp_a)
    return power_schedule(g0, l0, *rc.exp_a, *rc.exp_b, rc.r);
  return rate_schedule(rc.epsilon, g0, l0, rc.r);
}

}  // namespace irig
