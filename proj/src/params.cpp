#include "kinchem/params.hpp"

#include <cmath>
#include <stdexcept>

namespace kinchem {

ScalingFactors rescale(const PhysicalParams& p) {
    if (!p.valid())
        throw std::invalid_argument("all physical parameters must be strictly positive");
    const double root = std::sqrt(p.gamma / p.diffusivity);
    return {
        p.alpha,
        1.0 / (p.alpha * root),
        1.0 / root,
        p.alpha * p.gamma * p.gamma / (p.kappa * p.beta * p.diffusivity),
        root / p.kappa,
    };
}

} // namespace kinchem
