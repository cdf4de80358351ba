#pragma once

// Dense tableau simplex for tiny linear programs:
//   maximize c^T x  subject to  A x <= b,  x >= 0.
// Rows with negative b are handled by a phase-1 on artificial variables.
// Bland's rule on both phases, so the pivot sequence is reproducible.

#include <cstddef>
#include <vector>

#include "bdstab/vec.hpp"

namespace bdstab {

struct LinearProgram {
  std::vector<Vec> A;  // m rows of n coefficients
  Vec b;
  Vec c;
};

struct LpResult {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status = Status::Infeasible;
  Vec x;
  double objective = 0.0;
  std::size_t pivots = 0;
};

LpResult solve_lp(const LinearProgram& lp, double eps = 1e-11);

}  // namespace bdstab
