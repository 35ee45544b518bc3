#include "fwbb/kernels.hpp"

#include <cassert>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fwbb::kernels {

namespace serial {

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void vertex_scores(const std::vector<std::vector<double>>& vertices,
                   std::span<const double> direction, std::span<double> out) {
  assert(out.size() == vertices.size());
  for (std::size_t k = 0; k < vertices.size(); ++k) out[k] = dot(vertices[k], direction);
}

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::size_t n) {
  assert(a.size() == n * n && b.size() == n * n && c.size() == n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += a[i + n * k] * b[k + n * j];
      c[i + n * j] = s;
    }
  }
}

void information_matrix(std::span<const double> a, std::span<const double> w,
                        std::size_t m, std::size_t n, std::span<double> x) {
  assert(a.size() == m * n && w.size() == m && x.size() == n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j; k < n; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += w[i] * a[i * n + j] * a[i * n + k];
      x[j * n + k] = s;
      x[k * n + j] = s;
    }
  }
}

}  // namespace serial

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  const std::size_t len = a.size();
  const int threads = max_threads();
  if (len < kParallelThreshold || threads == 1) return serial::dot(a, b);
  // One contiguous chunk per thread, partials combined in thread order.
  std::vector<double> partial(static_cast<std::size_t>(threads), 0.0);
#pragma omp parallel num_threads(threads)
  {
#ifdef _OPENMP
    const auto tid = static_cast<std::size_t>(omp_get_thread_num());
    const auto nt = static_cast<std::size_t>(omp_get_num_threads());
#else
    const std::size_t tid = 0, nt = 1;
#endif
    const std::size_t begin = len * tid / nt;
    const std::size_t end = len * (tid + 1) / nt;
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += a[i] * b[i];
    partial[tid] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  const auto len = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) if (x.size() >= kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < len; ++i) y[i] += alpha * x[i];
}

void vertex_scores(const std::vector<std::vector<double>>& vertices,
                   std::span<const double> direction, std::span<double> out) {
  assert(out.size() == vertices.size());
  const auto count = static_cast<std::ptrdiff_t>(vertices.size());
  const bool big = vertices.size() * direction.size() >= kParallelThreshold;
#pragma omp parallel for schedule(static) if (big)
  for (std::ptrdiff_t k = 0; k < count; ++k) out[k] = serial::dot(vertices[k], direction);
}

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::size_t n) {
  assert(a.size() == n * n && b.size() == n * n && c.size() == n * n);
  const auto cols = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (n * n * n >= kParallelThreshold)
  for (std::ptrdiff_t j = 0; j < cols; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += a[i + n * k] * b[k + n * jj];
      c[i + n * jj] = s;
    }
  }
}

void information_matrix(std::span<const double> a, std::span<const double> w, std::size_t m,
                        std::size_t n, std::span<double> x) {
  assert(a.size() == m * n && w.size() == m && x.size() == n * n);
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic) if (m * n * n >= kParallelThreshold)
  for (std::ptrdiff_t jj = 0; jj < rows; ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    for (std::size_t k = j; k < n; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += w[i] * a[i * n + j] * a[i * n + k];
      x[j * n + k] = s;
      x[k * n + j] = s;
    }
  }
}

double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double c = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      c += (sum - t) + v;
    else
      c += (v - t) + sum;
    sum = t;
  }
  return sum + c;
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

}  // namespace fwbb::kernels
