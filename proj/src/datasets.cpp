#include "nodalset/datasets.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace nodalset {

BoundaryFunction random_boundary(std::uint64_t seed, double offset, double amplitude) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const double c1 = uni(gen) > 0.0 ? 1.0 : -1.0;
    std::array<double, 4> A{}, B{};
    for (int m = 0; m < 4; ++m) {
        A[m] = uni(gen);
        B[m] = uni(gen);
    }
    return [=](double x, double y) {
        double v = 0.0;
        for (int m = 0; m < 4; ++m) {
            const double w = (m + 1) * std::numbers::pi / 2.0;
            v += (A[m] * std::cos(w * (x + y)) + B[m] * std::sin(w * (x - y))) / (m + 1);
        }
        return offset + c1 * x + amplitude * v;
    };
}

BoundaryFunction polynomial_boundary(double a, const std::vector<std::pair<int, double>>& terms) {
    std::vector<std::pair<SymmetricPoly, double>> polys;
    for (const auto& [k, c] : terms) polys.push_back({sB_basis(a, k), c});
    return [polys](double x, double y) {
        double v = 0.0;
        for (const auto& [p, c] : polys) v += c * p(x, y);
        return v;
    };
}

BoundaryFunction homogeneous_boundary(const HomogeneousField& u) {
    return [u](double x, double y) { return u(x, y); };
}

}  // namespace nodalset
