#pragma once

#include <vector>

namespace kinchem {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule mapped to [a, b]. Supported point counts:
/// 16, 32, 64, 128.
QuadratureRule gauss_legendre(int points, double a, double b);

} // namespace kinchem
