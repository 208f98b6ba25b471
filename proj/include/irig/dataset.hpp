#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "irig/format.hpp"
#include "irig/oracles.hpp"
#include "irig/rng.hpp"
#include "irig/vectors.hpp"

namespace irig {

struct labeled_dataset {
  std::vector<hinge_batch::sample> samples;
  std::size_t dimension = 0;

  std::size_t size() const { return samples.size(); }
};

namespace detail {

inline double parse_double(const std::string &tok, std::size_t line_no,
                           const char *what) {
  double v = 0.0;
  const char *first = tok.data();
  const char *last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;  // from_chars rejects '+'
  auto res = std::from_chars(first, last, v);
  if (first == last || res.ec != std::errc{} || res.ptr != last)
    throw std::runtime_error("svmlight parse error at line " +
                             std::to_string(line_no) + ": bad " + what + " '" +
                             tok + "'");
  return v;
}

}  // namespace detail

// Reads "<label> <index>:<value> ..." lines with 1-based indices; labels may
// be +1, 1, -1 or 0 (0 is remapped to -1 and noted on the log stream).
// Dimension is 1 + max 0-based index unless overridden. Row order follows the
// file. Blank lines are skipped; anything else malformed reports its line.
inline labeled_dataset load_svmlight(const std::string &path,
                                     std::optional<std::size_t> dim_override =
                                         std::nullopt,
                                     std::ostream *log = nullptr) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_svmlight: cannot open '" + path + "'");

  labeled_dataset ds;
  std::size_t max_index = 0;  // 0-based, valid only when any feature seen
  bool any_feature = false;
  std::size_t zero_labels = 0;

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::pair<std::size_t, double>> items;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank line

    const double raw_label = detail::parse_double(tok, line_no, "label");
    int label = 0;
    if (raw_label == 1.0) label = 1;
    else if (raw_label == -1.0) label = -1;
    else if (raw_label == 0.0) { label = -1; ++zero_labels; }
    else
      throw std::runtime_error("svmlight parse error at line " +
                               std::to_string(line_no) + ": label must be +1, -1 or 0");

    items.clear();
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
        throw std::runtime_error("svmlight parse error at line " +
                                 std::to_string(line_no) +
                                 ": expected index:value, got '" + tok + "'");
      const double idx_raw =
          detail::parse_double(tok.substr(0, colon), line_no, "index");
      if (idx_raw < 1.0 || idx_raw != static_cast<double>(static_cast<std::size_t>(idx_raw)))
        throw std::runtime_error("svmlight parse error at line " +
                                 std::to_string(line_no) +
                                 ": indices are 1-based integers");
      const std::size_t idx = static_cast<std::size_t>(idx_raw) - 1;
      const double val = detail::parse_double(tok.substr(colon + 1), line_no, "value");
      items.emplace_back(idx, val);
      max_index = std::max(max_index, idx);
      any_feature = true;
    }
    // dimension is fixed up after the full pass
    ds.samples.push_back({sparse_vector(max_index + 1, items), label});
  }
  if (ds.samples.empty())
    throw std::runtime_error("load_svmlight: '" + path + "' has no data rows");

  ds.dimension = dim_override ? *dim_override
                              : (any_feature ? max_index + 1 : std::size_t{1});
  std::vector<hinge_batch::sample> rebuilt;
  rebuilt.reserve(ds.samples.size());
  for (auto &s : ds.samples) {
    std::vector<std::pair<std::size_t, double>> kept;
    kept.reserve(s.a.nnz());
    for (std::size_t t = 0; t < s.a.nnz(); ++t) {
      if (s.a.indices()[t] >= ds.dimension)
        throw std::runtime_error(
            "load_svmlight: feature index exceeds the requested dimension");
      kept.emplace_back(s.a.indices()[t], s.a.values()[t]);
    }
    rebuilt.push_back({sparse_vector(ds.dimension, std::move(kept)), s.label});
  }
  ds.samples = std::move(rebuilt);

  if (zero_labels > 0 && log)
    *log << "load_svmlight: remapped " << zero_labels << " zero labels to -1\n";
  return ds;
}

// Contiguous partition into m batches in dataset order; when m does not
// divide the sample count, the first (count mod m) batches take one extra row.
inline std::vector<hinge_batch> partition_batches(const labeled_dataset &d,
                                                  std::size_t m) {
  if (m == 0) throw std::invalid_argument("partition_batches: m must be >= 1");
  if (m > d.size())
    throw std::invalid_argument("partition_batches: m exceeds the sample count");
  const std::size_t base = d.size() / m;
  const std::size_t extra = d.size() % m;
  std::vector<hinge_batch> batches;
  batches.reserve(m);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t len = base + (i < extra ? 1 : 0);
    std::vector<hinge_batch::sample> rows(d.samples.begin() + pos,
                                          d.samples.begin() + pos + len);
    batches.emplace_back(d.dimension, std::move(rows));
    pos += len;
  }
  return batches;
}

// Synthetic linearly-separable-with-noise classification data. Features are
// binary token-presence indicators; labels follow the sign of a hidden weight
// vector, with a small flip probability.
struct synthetic_spec {
  std::size_t dimension = 200;
  std::size_t samples = 2000;
  double sparsity = 0.05;      // fraction of nonzero features per sample
  double flip_probability = 0.02;
  std::uint64_t seed = 1;
};

inline labeled_dataset gen_synthetic_dataset(const synthetic_spec &spec) {
  if (spec.dimension == 0 || spec.samples == 0)
    throw std::invalid_argument("gen_synthetic_dataset: empty spec");
  if (!(spec.sparsity > 0.0) || spec.sparsity > 1.0)
    throw std::invalid_argument("gen_synthetic_dataset: sparsity must be in (0, 1]");
  if (spec.flip_probability < 0.0 || spec.flip_probability >= 1.0)
    throw std::invalid_argument(
        "gen_synthetic_dataset: flip probability must be in [0, 1)");

  rng gen(spec.seed);
  std::vector<double> w(spec.dimension);
  for (auto &v : w) v = gen.uniform(-1.0, 1.0);

  const std::size_t nnz = std::max<std::size_t>(
      1, static_cast<std::size_t>(spec.sparsity * static_cast<double>(spec.dimension) + 0.5));

  labeled_dataset ds;
  ds.dimension = spec.dimension;
  ds.samples.reserve(spec.samples);
  std::vector<char> used(spec.dimension, 0);
  for (std::size_t i = 0; i < spec.samples; ++i) {
    std::vector<std::pair<std::size_t, double>> items;
    items.reserve(nnz);
    double margin = 0.0;
    for (std::size_t t = 0; t < nnz; ++t) {
      std::size_t j = gen.below(spec.dimension);
      while (used[j]) j = gen.below(spec.dimension);
      used[j] = 1;
      items.emplace_back(j, 1.0);
      margin += w[j];
    }
    for (const auto &[j, v] : items) used[j] = 0;
    int label = margin >= 0.0 ? 1 : -1;
    if (gen.uniform() < spec.flip_probability) label = -label;
    ds.samples.push_back({sparse_vector(spec.dimension, std::move(items)), label});
  }
  return ds;
}

// Writes a dataset in svmlight format (1-based indices); inverse of
// load_svmlight up to formatting.
inline void save_svmlight(const labeled_dataset &d, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_svmlight: cannot write '" + path + "'");
  for (const auto &s : d.samples) {
    out << (s.label > 0 ? "+1" : "-1");
    for (std::size_t t = 0; t < s.a.nnz(); ++t)
      out << ' ' << (s.a.indices()[t] + 1) << ':' << format_sig17(s.a.values()[t]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("save_svmlight: write failed for '" + path + "'");
}

}  // namespace irig
