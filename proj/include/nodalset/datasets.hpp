#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nodalset/extension_solver.hpp"
#include "nodalset/homogeneous.hpp"

namespace nodalset {

/// Smooth pseudo-random Dirichlet data
///   offset + c1 x + amplitude sum_{m=1}^{4} (A_m cos(m pi (x+y)/2) + B_m sin(m pi (x-y)/2)) / m
/// with c1 = +-1 and A_m, B_m uniform on [-1, 1], all drawn from mt19937_64(seed).
/// The perturbation is bounded by 2 (1 + 1/2 + 1/3 + 1/4) amplitude.
BoundaryFunction random_boundary(std::uint64_t seed, double offset, double amplitude = 0.3);

/// Offset that keeps random_boundary sign-definite on [-1,1] x [0,1] at the default amplitude.
inline constexpr double kDefiniteOffset = 3.0;

/// sum_i c_i p_{k_i} for (k_i, c_i) in terms.
BoundaryFunction polynomial_boundary(double a, const std::vector<std::pair<int, double>>& terms);

BoundaryFunction homogeneous_boundary(const HomogeneousField& u);

}  // namespace nodalset
