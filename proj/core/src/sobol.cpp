#include "abopt/sobol.hpp"

#include <array>
#include <stdexcept>
#include <vector>

#include "abopt/rng.hpp"

namespace abopt {
namespace {

constexpr int kBits = 32;

// Primitive polynomial degree s, coefficient code a, and initial m values per
// dimension (Joe & Kuo ordering; dimension 1 is the van der Corput sequence).
struct DimInit {
  int s;
  unsigned a;
  std::array<unsigned, 6> m;
};

constexpr DimInit kDims[] = {
    {1, 0, {1}},                   // dim 2
    {2, 1, {1, 3}},                // dim 3
    {3, 1, {1, 3, 1}},             // dim 4
    {3, 2, {1, 1, 1}},             // dim 5
    {4, 1, {1, 1, 3, 3}},          // dim 6
    {4, 4, {1, 3, 5, 13}},         // dim 7
    {5, 2, {1, 1, 5, 5, 17}},      // dim 8
    {5, 4, {1, 1, 5, 5, 5}},       // dim 9
    {5, 7, {1, 1, 7, 11, 19}},     // dim 10
    {5, 11, {1, 1, 5, 1, 1}},      // dim 11
    {5, 13, {1, 1, 1, 3, 11}},     // dim 12
    {5, 14, {1, 3, 5, 5, 31}},     // dim 13
    {6, 1, {1, 3, 3, 9, 7, 49}},   // dim 14
    {6, 13, {1, 1, 1, 15, 21, 21}},// dim 15
    {6, 16, {1, 3, 1, 13, 27, 49}},// dim 16
    {6, 19, {1, 1, 1, 15, 7, 5}},  // dim 17
    {6, 22, {1, 3, 1, 3, 25, 59}}, // dim 18
};

// Direction integers V_k = m_k * 2^(32-k) for one dimension.
std::array<std::uint32_t, kBits> direction_numbers(int dim_index) {
  std::array<std::uint32_t, kBits> v{};
  std::array<std::uint64_t, kBits + 1> m{};  // 1-based
  if (dim_index == 0) {
    for (int k = 1; k <= kBits; ++k) m[k] = 1;
  } else {
    const DimInit& d = kDims[dim_index - 1];
    for (int k = 1; k <= d.s && k <= kBits; ++k) m[k] = d.m[k - 1];
    for (int k = d.s + 1; k <= kBits; ++k) {
      std::uint64_t val = m[k - d.s] ^ (m[k - d.s] << d.s);
      for (int i = 1; i < d.s; ++i) {
        if ((d.a >> (d.s - 1 - i)) & 1u) val ^= m[k - i] << i;
      }
      m[k] = val;
    }
  }
  for (int k = 1; k <= kBits; ++k) {
    v[k - 1] = static_cast<std::uint32_t>(m[k]) << (kBits - k);
  }
  return v;
}

}  // namespace

Eigen::MatrixXd sobol_points(int dim, int n, std::uint64_t scramble_seed) {
  if (dim < 1) throw std::invalid_argument("sobol_points: dim must be >= 1");
  if (n < 1) throw std::invalid_argument("sobol_points: n must be >= 1");
  if (dim > kSobolMaxDim) {
    throw std::invalid_argument("sobol_points: dimension " +
                                std::to_string(dim) +
                                " exceeds the direction-number table (max " +
                                std::to_string(kSobolMaxDim) + ")");
  }

  std::vector<std::array<std::uint32_t, kBits>> v(dim);
  for (int j = 0; j < dim; ++j) v[j] = direction_numbers(j);

  std::vector<std::uint32_t> mask(dim, 0);
  if (scramble_seed != 0) {
    for (int j = 0; j < dim; ++j) {
      Rng rng(derive_seed(scramble_seed, static_cast<std::uint64_t>(j)));
      mask[j] = static_cast<std::uint32_t>(rng.next_u64() >> 32);
    }
  }

  Eigen::MatrixXd points(n, dim);
  for (int i = 0; i < n; ++i) {
    const std::uint64_t index = static_cast<std::uint64_t>(i) + 1;  // skip 0
    for (int j = 0; j < dim; ++j) {
      std::uint32_t x = 0;
      std::uint64_t bits = index;
      int k = 0;
      while (bits != 0) {
        if (bits & 1u) x ^= v[j][k];
        bits >>= 1;
        ++k;
      }
      x ^= mask[j];
      points(i, j) = static_cast<double>(x) * 0x1.0p-32;
    }
  }
  return points;
}

}  // namespace abopt
