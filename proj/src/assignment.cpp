#include "driftbound/assignment.hpp"

#include <limits>

namespace driftbound {

Assignment solve_assignment(const Matrix& cost) {
  require(cost.rows() == cost.cols(), "solve_assignment: cost matrix must be square");
  require(cost.allFinite(), "solve_assignment: costs must be finite");
  const Eigen::Index n = cost.rows();
  Assignment out;
  if (n == 0) return out;

  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based arrays with a virtual column 0 that holds the row being inserted.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<Eigen::Index> row_of_col(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);

  for (Eigen::Index i = 1; i <= n; ++i) {
    row_of_col[0] = i;
    Eigen::Index j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const Eigen::Index i0 = row_of_col[j0];
      double delta = inf;
      Eigen::Index j1 = 0;
      for (Eigen::Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (reduced < minv[j]) {
          minv[j] = reduced;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Eigen::Index j = 0; j <= n; ++j) {
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
      const Eigen::Index j1 = way[j0];
      row_of_col[j0] = row_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  out.col_of_row.assign(n, -1);
  for (Eigen::Index j = 1; j <= n; ++j) out.col_of_row[row_of_col[j] - 1] = j - 1;
  // Recompute from the matrix: the dual sums accumulate rounding.
  for (Eigen::Index i = 0; i < n; ++i) out.total_cost += cost(i, out.col_of_row[i]);
  return out;
}

}  // namespace driftbound
