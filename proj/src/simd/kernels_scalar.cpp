#include <algorithm>
#include <cmath>
#include <limits>

#include "kernel_tables.hpp"

namespace matchmix::simd::detail {
namespace {

void ell_multiply(const EllMatrix& m, const double* x, double* y) {
  const std::size_t n = m.rows;
  std::fill(y, y + n, 0.0);
  for (std::size_t s = 0; s < m.width; ++s) {
    const std::int32_t* c = m.cols.data() + s * n;
    const double* v = m.vals.data() + s * n;
    for (std::size_t r = 0; r < n; ++r) y[r] += v[r] * x[c[r]];
  }
}

void hadamard(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void average(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = (a[i] + b[i]) * 0.5;
}

void add_inplace(double* acc, const double* a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += a[i];
}

double l1_distance(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

double sum(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i];
  return s;
}

double max_value(const double* a, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, a[i]);
  return m;
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{ell_multiply, hadamard, average, add_inplace,
                                 l1_distance,  sum,      max_value, dot};
  return table;
}

}  // namespace matchmix::simd::detail
