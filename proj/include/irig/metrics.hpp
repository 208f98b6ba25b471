#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "irig/format.hpp"
#include "irig/solver.hpp"

namespace irig {

inline constexpr const char *metrics_csv_header =
    "k,f_bar,f_gap,h_bar,dist_xstar,gamma_k,lambda_k,elapsed_s";

// Serializes a trace with a fixed schema and deterministic formatting
// (17 significant digits, '.' decimal separator, '\n' line endings). Unknown
// quantities are written as empty fields, never as NaN text.
inline std::string render_metrics_csv(const trace &tr) {
  if (tr.empty())
    throw std::invalid_argument("render_metrics_csv: trace must be nonempty");
  std::string out;
  if (tr.f_star_estimated)
    out += "# f_gap uses an estimated f_star\n";
  out += metrics_csv_header;
  out += '\n';
  auto opt = [](const std::optional<double> &v) {
    return v ? format_sig17(*v) : std::string();
  };
  for (const auto &row : tr.rows) {
    out += std::to_string(row.k);
    out += ',';
    out += format_sig17(row.f_bar);
    out += ',';
    out += opt(row.f_gap);
    out += ',';
    out += format_sig17(row.h_bar);
    out += ',';
    out += opt(row.dist_xstar);
    out += ',';
    out += format_sig17(row.gamma_k);
    out += ',';
    out += format_sig17(row.lambda_k);
    out += ',';
    out += opt(row.elapsed_s);
    out += '\n';
  }
  return out;
}

inline void emit_metrics_csv(const trace &tr, const std::string &path) {
  const std::string body = render_metrics_csv(tr);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_metrics_csv: cannot write '" + path + "'");
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw std::runtime_error("emit_metrics_csv: write failed for '" + path + "'");
}

inline trace parse_metrics_csv_text(const std::string &text) {
  std::istringstream in(text);
  trace tr;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.find("estimated") != std::string::npos) tr.f_star_estimated = true;
      continue;
    }
    if (!header_seen) {
      if (line != metrics_csv_header)
        throw std::runtime_error("metrics csv: unexpected header at line " +
                                 std::to_string(line_no));
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 8)
      throw std::runtime_error("metrics csv: expected 8 fields at line " +
                               std::to_string(line_no));
    trace_row row;
    row.k = static_cast<std::uint64_t>(
        parse_finite_double(fields[0], "k"));
    row.f_bar = parse_finite_double(fields[1], "f_bar");
    if (!fields[2].empty()) row.f_gap = parse_finite_double(fields[2], "f_gap");
    row.h_bar = parse_finite_double(fields[3], "h_bar");
    if (!fields[4].empty())
      row.dist_xstar = parse_finite_double(fields[4], "dist_xstar");
    row.gamma_k = parse_finite_double(fields[5], "gamma_k");
    row.lambda_k = parse_finite_double(fields[6], "lambda_k");
    if (!fields[7].empty())
      row.elapsed_s = parse_finite_double(fields[7], "elapsed_s");
    tr.rows.push_back(row);
  }
  if (!header_seen) throw std::runtime_error("metrics csv: missing header");
  return tr;
}

inline trace parse_metrics_csv(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("parse_metrics_csv: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_metrics_csv_text(buf.str());
}

struct rate_fit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t used_rows = 0;
  std::size_t dropped_nonpositive = 0;  // rows with f_gap <= 0 after burn-in
};

// Least-squares line through (log k, log f_gap) over the post-burn-in rows;
// the slope is the empirical decay exponent of the gap. Rows with k = 0,
// missing f_gap, or non-positive f_gap are unusable; their count is reported
// and at least two usable rows are required.
inline rate_fit fit_rate(const trace &tr, double burn_in_fraction) {
  if (burn_in_fraction < 0.0 || burn_in_fraction >= 1.0)
    throw std::invalid_argument("fit_rate: burn-in fraction must be in [0, 1)");
  const std::size_t skip =
      static_cast<std::size_t>(burn_in_fraction * static_cast<double>(tr.size()));

  rate_fit fit;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = skip; i < tr.size(); ++i) {
    const auto &row = tr.rows[i];
    if (row.k == 0 || !row.f_gap) continue;
    if (!(*row.f_gap > 0.0)) {
      ++fit.dropped_nonpositive;
      continue;
    }
    const double x = std::log(static_cast<double>(row.k));
    const double y = std::log(*row.f_gap);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++fit.used_rows;
  }
  if (fit.used_rows < 2)
    throw std::runtime_error(
        "fit_rate: fewer than 2 usable rows after burn-in (" +
        std::to_string(fit.dropped_nonpositive) + " rows had non-positive f_gap)");
  const double n = static_cast<double>(fit.used_rows);
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0)
    throw std::runtime_error("fit_rate: degenerate abscissa (all k equal)");
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

}  // namespace irig
