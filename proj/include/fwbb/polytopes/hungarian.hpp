#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fwbb {

/// Largest assignment dimension accepted by hungarian().
inline constexpr std::size_t kMaxAssignmentDim = 512;

struct Assignment {
  std::vector<std::size_t> col_of_row;
  double value = 0.0;
};

/// Minimum-cost perfect assignment for a row-major n x n cost matrix.
/// `forbidden` (row-major, optional) marks entries that may never be chosen.
/// O(n^3) shortest augmenting paths with potentials.
/// Throws AssignmentInfeasible when every perfect matching uses a forbidden
/// entry, DimensionTooLarge above kMaxAssignmentDim.
Assignment hungarian(std::span<const double> cost, std::size_t n,
                     std::span<const unsigned char> forbidden = {});

}  // namespace fwbb
