#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace emoclap {

// Dense row-major double matrix. Just enough for projections and logits.
struct Mat {
  std::size_t rows = 0, cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  bool operator==(const Mat&) const = default;
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double l2_norm(const std::vector<double>& a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return s == 0.0 ? 0.0 : std::sqrt(s);
}

}  // namespace emoclap
