#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "warpgh/core/error.hpp"
#include "warpgh/core/json_io.hpp"

namespace warpgh::gh {

/// Opaque point id with optional sampling coordinates.
struct PointLabel {
  std::string id;
  std::optional<double> r;
  std::vector<int> fiber;
};

inline json label_to_json(const PointLabel& l) {
  json j;
  j["id"] = l.id;
  if (l.r) j["r"] = *l.r;
  if (!l.fiber.empty()) j["fiber"] = l.fiber;
  return j;
}

inline PointLabel label_from_json(const json& j) {
  PointLabel l;
  l.id = j.at("id").get<std::string>();
  if (j.contains("r")) l.r = j.at("r").get<double>();
  if (j.contains("fiber")) l.fiber = j.at("fiber").get<std::vector<int>>();
  return l;
}

/// Finite metric space: labels plus a dense symmetric distance matrix.
class FiniteMetricSpace {
 public:
  FiniteMetricSpace() = default;

  /// Takes ownership of a row-major n x n matrix; checks shape, diagonal, symmetry and sign.
  FiniteMetricSpace(std::vector<PointLabel> labels, std::vector<double> dist) : labels_(std::move(labels)), d_(std::move(dist)) {
    const size_t n = labels_.size();
    if (d_.size() != n * n) fail(ErrorKind::Validation, "gh_lab", "FiniteMetricSpace", "matrix size does not match label count");
    for (size_t i = 0; i < n; ++i) {
      if (d_[i * n + i] != 0.0) fail(ErrorKind::Validation, "gh_lab", "FiniteMetricSpace", "nonzero diagonal at " + std::to_string(i));
      for (size_t j = i + 1; j < n; ++j) {
        const double a = d_[i * n + j], b = d_[j * n + i];
        if (!std::isfinite(a) || a < 0.0)
          fail(ErrorKind::Validation, "gh_lab", "FiniteMetricSpace", "negative or non-finite distance");
        if (a != b) fail(ErrorKind::Validation, "gh_lab", "FiniteMetricSpace", "asymmetric distance matrix");
      }
    }
  }

  /// Unlabeled space with ids "0".."n-1".
  static FiniteMetricSpace from_matrix(std::vector<double> dist) {
    const auto n = static_cast<size_t>(std::llround(std::sqrt(static_cast<double>(dist.size()))));
    std::vector<PointLabel> labels(n);
    for (size_t i = 0; i < n; ++i) labels[i].id = std::to_string(i);
    return FiniteMetricSpace(std::move(labels), std::move(dist));
  }

  size_t size() const { return labels_.size(); }
  double operator()(size_t i, size_t j) const { return d_[i * size() + j]; }
  const std::vector<PointLabel>& labels() const { return labels_; }
  const std::vector<double>& matrix() const { return d_; }

  double diameter() const {
    double m = 0.0;
    for (double v : d_) m = std::max(m, v);
    return m;
  }

  /// max_j d(i, j) for every i.
  std::vector<double> eccentricities() const {
    const size_t n = size();
    std::vector<double> e(n, 0.0);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) e[i] = std::max(e[i], d_[i * n + j]);
    return e;
  }

  FiniteMetricSpace scaled(double s) const {
    std::vector<double> d(d_);
    for (double& v : d) v *= s;
    return FiniteMetricSpace(labels_, std::move(d));
  }

  FiniteMetricSpace subspace(const std::vector<size_t>& idx) const {
    const size_t m = idx.size(), n = size();
    std::vector<PointLabel> labels;
    std::vector<double> d(m * m);
    for (size_t a = 0; a < m; ++a) {
      labels.push_back(labels_.at(idx[a]));
      for (size_t b = 0; b < m; ++b) d[a * m + b] = d_[idx[a] * n + idx[b]];
    }
    return FiniteMetricSpace(std::move(labels), std::move(d));
  }

 private:
  std::vector<PointLabel> labels_;
  std::vector<double> d_;
};

/// Worst triangle-inequality excess; exhaustive up to 300 points, 1e5 seeded random triples above.
inline double triangle_excess(const FiniteMetricSpace& X, uint64_t seed = 1) {
  const size_t n = X.size();
  double worst = 0.0;
  auto check = [&](size_t i, size_t j, size_t k) { worst = std::max(worst, X(i, k) - X(i, j) - X(j, k)); };
  if (n <= 300) {
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        for (size_t k = 0; k < n; ++k) check(i, j, k);
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<size_t> pick(0, n - 1);
    for (int t = 0; t < 100000; ++t) check(pick(rng), pick(rng), pick(rng));
  }
  return worst;
}

inline bool satisfies_triangle(const FiniteMetricSpace& X, double slack = 1e-9) { return triangle_excess(X) <= slack; }

/// Relation between two spaces given as index pairs.
struct Correspondence {
  std::vector<std::pair<size_t, size_t>> pairs;

  /// Every index of either side appears in at least one pair.
  bool valid_for(size_t na, size_t nb) const {
    std::vector<char> ca(na, 0), cb(nb, 0);
    for (const auto& [i, j] : pairs) {
      if (i >= na || j >= nb) return false;
      ca[i] = cb[j] = 1;
    }
    return std::all_of(ca.begin(), ca.end(), [](char c) { return c; }) &&
           std::all_of(cb.begin(), cb.end(), [](char c) { return c; });
  }

  static Correspondence identity(size_t n) {
    Correspondence c;
    for (size_t i = 0; i < n; ++i) c.pairs.emplace_back(i, i);
    return c;
  }

  /// Composition {(i,k) : (i,j) in this, (j,k) in next}.
  Correspondence then(const Correspondence& next, size_t mid_size) const {
    std::vector<std::vector<size_t>> fwd(mid_size);
    for (const auto& [j, k] : next.pairs) fwd.at(j).push_back(k);
    Correspondence c;
    for (const auto& [i, j] : pairs)
      for (size_t k : fwd.at(j)) c.pairs.emplace_back(i, k);
    std::sort(c.pairs.begin(), c.pairs.end());
    c.pairs.erase(std::unique(c.pairs.begin(), c.pairs.end()), c.pairs.end());
    return c;
  }
};

// ---- serialization -------------------------------------------------------

/// Row-major little-endian float64 matrix; the host is assumed little-endian.
inline void write_matrix_binary(const FiniteMetricSpace& X, const std::string& path) {
  static_assert(sizeof(double) == 8);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "gh_lab", "write_matrix_binary", "cannot open " + path);
  const auto& d = X.matrix();
  out.write(reinterpret_cast<const char*>(d.data()), static_cast<std::streamsize>(d.size() * sizeof(double)));
  if (!out) fail(ErrorKind::Io, "gh_lab", "write_matrix_binary", "write failed for " + path);
}

inline json sidecar_json(const FiniteMetricSpace& X, uint64_t seed, const json& generator) {
  json j;
  j["size"] = X.size();
  json labels = json::array();
  for (const auto& l : X.labels()) labels.push_back(label_to_json(l));
  j["labels"] = std::move(labels);
  j["seed"] = seed;
  j["generator"] = generator;
  return j;
}

/// Writes `<stem>.bin` and `<stem>.json`.
inline void save_space(const FiniteMetricSpace& X, const std::string& stem, uint64_t seed, const json& generator) {
  write_matrix_binary(X, stem + ".bin");
  write_text_file(stem + ".json", dump17(sidecar_json(X, seed, generator)) + "\n", "gh_lab", "save_space");
}

inline FiniteMetricSpace load_space(const std::string& stem) {
  const json side = parse_json(read_text_file(stem + ".json", "gh_lab", "load_space"), "gh_lab", "load_space");
  std::vector<PointLabel> labels;
  for (const auto& l : side.at("labels")) labels.push_back(label_from_json(l));
  const size_t n = labels.size();
  std::ifstream in(stem + ".bin", std::ios::binary);
  if (!in) fail(ErrorKind::Io, "gh_lab", "load_space", "cannot open " + stem + ".bin");
  std::vector<double> d(n * n);
  in.read(reinterpret_cast<char*>(d.data()), static_cast<std::streamsize>(d.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(d.size() * sizeof(double)))
    fail(ErrorKind::Parse, "gh_lab", "load_space", "matrix file shorter than sidecar size");
  return FiniteMetricSpace(std::move(labels), std::move(d));
}

/// CSV with a header of ids; one row per point.
inline std::string to_csv(const FiniteMetricSpace& X) {
  std::string s = "id";
  for (const auto& l : X.labels()) s += "," + l.id;
  s += "\n";
  for (size_t i = 0; i < X.size(); ++i) {
    s += X.labels()[i].id;
    for (size_t j = 0; j < X.size(); ++j) s += "," + fmt17(X(i, j));
    s += "\n";
  }
  return s;
}

}  // namespace warpgh::gh
