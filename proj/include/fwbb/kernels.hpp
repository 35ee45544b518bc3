#pragma once

// Dense inner kernels. Each kernel has a serial reference in `kernels::serial`
// and an OpenMP version in `kernels`. The parallel versions only split work
// when the problem is large enough to amortise the fork/join, and they keep a
// fixed reduction order so results are bitwise reproducible for a given
// thread count (the matmul/information-matrix/scoring kernels are bitwise
// identical to the serial reference for any thread count).

#include <cstddef>
#include <span>
#include <vector>

namespace fwbb::kernels {

/// Work (flops) below which the parallel kernels run serially.
inline constexpr std::size_t kParallelThreshold = std::size_t{1} << 15;

namespace serial {

double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// out[k] = <direction, vertices[k]>
void vertex_scores(const std::vector<std::vector<double>>& vertices,
                   std::span<const double> direction, std::span<double> out);

/// C = A * B for column-major n x n matrices.
void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::size_t n);

/// X = A^T diag(w) A for a row-major m x n matrix A; X is n x n (symmetric).
void information_matrix(std::span<const double> a, std::span<const double> w,
                        std::size_t m, std::size_t n, std::span<double> x);

}  // namespace serial

double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void vertex_scores(const std::vector<std::vector<double>>& vertices,
                   std::span<const double> direction, std::span<double> out);
void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::size_t n);
void information_matrix(std::span<const double> a, std::span<const double> w, std::size_t m,
                        std::size_t n, std::span<double> x);

/// Neumaier-compensated sum.
double compensated_sum(std::span<const double> values);

double squared_norm(std::span<const double> a);

int max_threads();

}  // namespace fwbb::kernels
