#pragma once

// Reference implementations used to validate the library from the outside.
// Everything here is deliberately independent of the production code paths:
// closed forms where available, brute-force quadrature otherwise.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/erf.hpp>

namespace oracle {

/// Deterministic uniform draw independent of distribution implementations.
inline double urand(std::mt19937& gen, double a, double b) {
    return a + (b - a) * (static_cast<double>(gen()) / 4294967296.0);
}

/// Composite Gauss-Legendre quadrature, 30 points per panel.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        int panels = 24) {
    double total = 0.0;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p)
        total += boost::math::quadrature::gauss<double, 30>::integrate(f, a + p * h,
                                                                       a + (p + 1) * h);
    return total;
}

struct GaussianComponent {
    double mass;
    double center;
    double sigma;
};

using Mixture = std::vector<GaussianComponent>;

inline double mixture_density(const Mixture& mix, double x) {
    double total = 0.0;
    for (const auto& g : mix) {
        const double z = (x - g.center) / g.sigma;
        total += g.mass / (g.sigma * std::sqrt(2.0 * M_PI)) * std::exp(-0.5 * z * z);
    }
    return total;
}

/// Raw moment of a normal density via the recursion
/// mu_k = c mu_{k-1} + (k-1) sigma^2 mu_{k-2}.
inline double gaussian_raw_moment(int k, double center, double sigma) {
    double prev = 1.0, cur = center;
    if (k == 0) return prev;
    for (int j = 2; j <= k; ++j) {
        const double next = center * cur + (j - 1) * sigma * sigma * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

inline double mixture_moment(const Mixture& mix, int k) {
    double total = 0.0;
    for (const auto& g : mix) total += g.mass * gaussian_raw_moment(k, g.center, g.sigma);
    return total;
}

/// Closed form of 1/2 * integral e^{-|x-y|} g(y) dy for a normal component,
/// via the standard normal CDF. Both terms are positive, so there is no
/// cancellation.
inline double gaussian_signal(double x, double mass, double center, double sigma) {
    const auto Phi = [](double z) { return 0.5 * boost::math::erfc(-z / std::sqrt(2.0)); };
    const double d = x - center;
    const double s2 = sigma * sigma;
    const double left = std::exp(0.5 * s2 - d) * Phi((d - s2) / sigma);
    const double right = std::exp(0.5 * s2 + d) * Phi(-(d + s2) / sigma);
    return 0.5 * mass * (left + right);
}

inline double mixture_signal(const Mixture& mix, double x) {
    double total = 0.0;
    for (const auto& g : mix) total += gaussian_signal(x, g.mass, g.center, g.sigma);
    return total;
}

/// Quadrature moment of the signal, integral of w^k S(w) dw, over a band wide
/// enough that the e^{-|w|} tails are below the requested accuracy.
inline double mixture_signal_moment(const Mixture& mix, int k, double band = 60.0) {
    return integrate([&](double w) { return std::pow(w, k) * mixture_signal(mix, w); }, -band,
                     band, 48);
}

/// Direct double quadrature of integral x^{N-n} v^n S(x+v) rho(x) dv dx.
inline double mixture_cross_moment(const Mixture& mix, int n, int total_order,
                                   double band = 60.0) {
    const auto inner = [&](double x) {
        return integrate(
            [&](double w) { return std::pow(w - x, n) * mixture_signal(mix, w); }, -band, band,
            48);
    };
    return integrate(
        [&](double x) {
            return std::pow(x, total_order - n) * mixture_density(mix, x) * inner(x);
        },
        -20.0, 20.0, 32);
}

inline Mixture random_mixture(std::mt19937& gen) {
    const int parts = 2 + static_cast<int>(gen() % 2);
    Mixture mix;
    for (int p = 0; p < parts; ++p)
        mix.push_back({urand(gen, 0.3, 2.0), urand(gen, -3.0, 3.0), urand(gen, 0.6, 1.8)});
    return mix;
}

/// 2D tensor quadrature of integral x^m v^n f(x,v) over a rectangle.
inline double field_moment(const std::function<double(double, double)>& f, int m, int n,
                           double half_x, double half_v) {
    return integrate(
        [&](double x) {
            return std::pow(x, m) *
                   integrate([&](double v) { return std::pow(v, n) * f(x, v); }, -half_v,
                             half_v, 16);
        },
        -half_x, half_x, 16);
}

} // namespace oracle
