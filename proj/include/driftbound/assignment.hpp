#pragma once

#include <vector>

#include "driftbound/core.hpp"

namespace driftbound {

struct Assignment {
  // row i is matched to column col_of_row[i].
  std::vector<Eigen::Index> col_of_row;
  // Σ_i cost(i, col_of_row[i]), summed from the matrix in row order.
  double total_cost = 0.0;
};

/// Exact minimum-cost perfect matching on a square cost matrix by successive
/// shortest augmenting paths with dual potentials, O(n³). Costs must be finite.
Assignment solve_assignment(const Matrix& cost);

}  // namespace driftbound
