#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace abopt {

// Maximum dimension covered by the built-in direction-number table.
inline constexpr int kSobolMaxDim = 18;

// First n points of the d-dimensional Sobol sequence in natural order, index 0
// (the all-zero point) skipped. Rows are points. With scramble_seed == 0 the
// sequence is the plain unscrambled one; otherwise each dimension is digitally
// shifted by a seeded 32-bit XOR mask, which preserves the low-discrepancy
// structure while decorrelating runs.
//
// Throws std::invalid_argument for dim < 1 or n < 1, and for dim > kSobolMaxDim
// (no direction numbers available).
Eigen::MatrixXd sobol_points(int dim, int n, std::uint64_t scramble_seed = 0);

}  // namespace abopt
