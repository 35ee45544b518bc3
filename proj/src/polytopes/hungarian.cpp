#include "fwbb/polytopes/hungarian.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fwbb/errors.hpp"

namespace fwbb {

Assignment hungarian(std::span<const double> cost, std::size_t n,
                     std::span<const unsigned char> forbidden) {
  if (n > kMaxAssignmentDim)
    throw SolverError(ErrorKind::DimensionTooLarge,
                      "assignment dimension " + std::to_string(n) + " exceeds " +
                          std::to_string(kMaxAssignmentDim));
  if (cost.size() != n * n || (!forbidden.empty() && forbidden.size() != n * n))
    throw SolverError(ErrorKind::InvalidArgument, "assignment matrix has wrong size");
  for (double c : cost)
    if (!std::isfinite(c)) throw SolverError(ErrorKind::InvalidArgument, "non-finite assignment cost");

  Assignment result;
  if (n == 0) return result;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  auto allowed = [&](std::size_t i, std::size_t j) {
    return forbidden.empty() || forbidden[i * n + j] == 0;
  };

  // 1-based rows/cols internally; column 0 is the virtual start column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> row_of_col(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    row_of_col[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = row_of_col[j0];
      double delta = kInf;
      std::size_t j1 = kNone;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        if (allowed(i0 - 1, j - 1)) {
          const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (j1 == kNone)
        throw SolverError(ErrorKind::AssignmentInfeasible,
                          "no perfect assignment avoids the forbidden entries");
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of_col[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      row_of_col[j0] = row_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  result.col_of_row.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) result.col_of_row[row_of_col[j] - 1] = j - 1;
  for (std::size_t i = 0; i < n; ++i) result.value += cost[i * n + result.col_of_row[i]];
  return result;
}

}  // namespace fwbb
