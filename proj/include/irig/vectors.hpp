#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace irig {

// Dense vector of doubles with a fixed dimension. Entries are kept finite:
// constructors and every mutating operation reject NaN/Inf.
class dense_vector {
 public:
  dense_vector() = default;
  explicit dense_vector(std::size_t n, double fill = 0.0) : v_(n, fill) {
    check_finite(fill);
  }
  dense_vector(std::initializer_list<double> init) : v_(init) {
    for (double x : v_) check_finite(x);
  }
  explicit dense_vector(std::vector<double> entries) : v_(std::move(entries)) {
    for (double x : v_) check_finite(x);
  }

  std::size_t size() const { return v_.size(); }
  double operator[](std::size_t i) const { return v_[i]; }
  double &operator[](std::size_t i) { return v_[i]; }

  const std::vector<double> &entries() const { return v_; }

  auto begin() const { return v_.begin(); }
  auto end() const { return v_.end(); }

  bool operator==(const dense_vector &other) const = default;

 private:
  static void check_finite(double x) {
    if (!std::isfinite(x))
      throw std::invalid_argument("dense_vector: non-finite entry");
  }

  std::vector<double> v_;
};

// Sparse vector: strictly increasing indices < dim, no stored zeros.
// Construction canonicalizes arbitrary (index, value) input: sorts by index,
// merges duplicates by summation, drops zeros.
class sparse_vector {
 public:
  sparse_vector() = default;

  sparse_vector(std::size_t dim, std::vector<std::pair<std::size_t, double>> items)
      : dim_(dim) {
    for (const auto &[i, x] : items) {
      if (i >= dim)
        throw std::invalid_argument("sparse_vector: index " + std::to_string(i) +
                                    " out of range for dimension " +
                                    std::to_string(dim));
      if (!std::isfinite(x))
        throw std::invalid_argument("sparse_vector: non-finite value");
    }
    std::sort(items.begin(), items.end(),
              [](const auto &a, const auto &b) { return a.first < b.first; });
    for (const auto &[i, x] : items) {
      if (!idx_.empty() && idx_.back() == i) {
        val_.back() += x;
        if (!std::isfinite(val_.back()))
          throw std::invalid_argument("sparse_vector: non-finite merged value");
      } else {
        idx_.push_back(i);
        val_.push_back(x);
      }
    }
    // drop entries that are exactly zero after merging
    std::size_t w = 0;
    for (std::size_t r = 0; r < idx_.size(); ++r) {
      if (val_[r] != 0.0) {
        idx_[w] = idx_[r];
        val_[w] = val_[r];
        ++w;
      }
    }
    idx_.resize(w);
    val_.resize(w);
  }

  std::size_t dimension() const { return dim_; }
  std::size_t nnz() const { return idx_.size(); }
  const std::vector<std::size_t> &indices() const { return idx_; }
  const std::vector<double> &values() const { return val_; }

  bool operator==(const sparse_vector &other) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<std::size_t> idx_;
  std::vector<double> val_;
};

inline void require_same_dim(std::size_t a, std::size_t b, const char *op) {
  if (a != b)
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) +
                                ")");
}

// <a, x> accumulated in ascending index order.
inline double dot(const sparse_vector &a, const dense_vector &x) {
  require_same_dim(a.dimension(), x.size(), "dot");
  double s = 0.0;
  const auto &idx = a.indices();
  const auto &val = a.values();
  for (std::size_t t = 0; t < idx.size(); ++t) s += val[t] * x[idx[t]];
  return s;
}

inline double dot(const dense_vector &a, const dense_vector &x) {
  require_same_dim(a.size(), x.size(), "dot");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * x[j];
  return s;
}

// x + alpha * g
inline dense_vector axpy(double alpha, const dense_vector &g,
                         const dense_vector &x) {
  require_same_dim(g.size(), x.size(), "axpy");
  if (!std::isfinite(alpha)) throw std::invalid_argument("axpy: non-finite alpha");
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = x[j] + alpha * g[j];
  return dense_vector(std::move(out));
}

struct norm_pair {
  double l1 = 0.0;
  double l2 = 0.0;
};

inline norm_pair norms(const dense_vector &x) {
  double l1 = 0.0, sq = 0.0;
  for (double v : x) {
    l1 += std::abs(v);
    sq += v * v;
  }
  return {l1, std::sqrt(sq)};
}

inline double norm2(const dense_vector &x) { return norms(x).l2; }

inline double distance(const dense_vector &a, const dense_vector &b) {
  require_same_dim(a.size(), b.size(), "distance");
  double sq = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    sq += d * d;
  }
  return std::sqrt(sq);
}

}  // namespace irig
