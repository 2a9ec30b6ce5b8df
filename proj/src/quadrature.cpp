#include "kinchem/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <stdexcept>

namespace kinchem {

namespace {

template <unsigned N>
QuadratureRule mapped(double a, double b) {
    using rule = boost::math::quadrature::gauss<double, N>;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    QuadratureRule out;
    out.nodes.reserve(N);
    out.weights.reserve(N);
    // boost stores only the nonnegative abscissas of the symmetric rule
    for (std::size_t i = rule::abscissa().size(); i-- > 0;) {
        const double t = rule::abscissa()[i];
        if (t == 0.0) continue;
        out.nodes.push_back(mid - half * t);
        out.weights.push_back(half * rule::weights()[i]);
    }
    for (std::size_t i = 0; i < rule::abscissa().size(); ++i) {
        out.nodes.push_back(mid + half * rule::abscissa()[i]);
        out.weights.push_back(half * rule::weights()[i]);
    }
    return out;
}

} // namespace

QuadratureRule gauss_legendre(int points, double a, double b) {
    switch (points) {
        case 16: return mapped<16>(a, b);
        case 32: return mapped<32>(a, b);
        case 64: return mapped<64>(a, b);
        case 128: return mapped<128>(a, b);
        default: throw std::invalid_argument("unsupported Gauss-Legendre point count");
    }
}

} // namespace kinchem
