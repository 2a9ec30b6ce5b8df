#include "kinchem/signal.hpp"

#include <cmath>
#include <stdexcept>

namespace kinchem {

SignalProfile convolve_signal(const DensityProfile& rho) {
    const SpatialGrid& grid = rho.grid();
    const int n = grid.size();
    const double h = grid.spacing();
    const double E = std::exp(-h);
    // Exact integrals of e^{-s} against the linear interpolant on one cell:
    // weight of the near node (where we evaluate) and of the far node.
    const double near = 1.0 - (1.0 - E) / h;
    const double far = (1.0 - E) * (1.0 + 1.0 / h) - 1.0;

    std::vector<double> left(n, 0.0), right(n, 0.0);
    for (int i = 1; i < n; ++i)
        left[i] = E * left[i - 1] + far * rho[i - 1] + near * rho[i];
    for (int i = n - 2; i >= 0; --i)
        right[i] = E * right[i + 1] + far * rho[i + 1] + near * rho[i];

    SignalProfile S(grid);
    for (int i = 0; i < n; ++i) S[i] = 0.5 * (left[i] + right[i]);
    return S;
}

SignalMomentVector signal_moments(const std::vector<double>& raw_moments) {
    SignalMomentVector S;
    S.values.resize(raw_moments.size());
    for (std::size_t k = 0; k < raw_moments.size(); ++k) {
        S.values[k] = raw_moments[k];
        if (k >= 2) S.values[k] += static_cast<double>(k) * (k - 1) * S.values[k - 2];
    }
    return S;
}

double cross_moment(int n, int total_order, const SignalMomentVector& S,
                    const std::vector<double>& raw_moments) {
    if (n < 0 || total_order < n)
        throw std::out_of_range("cross_moment requires 0 <= n <= total order");
    if (S.order() < n || static_cast<int>(raw_moments.size()) <= total_order)
        throw std::out_of_range("moment vectors too short for requested order");
    double acc = 0.0;
    double binom = 1.0;
    for (int k = 0; k <= n; ++k) {
        const double sign = ((n - k) % 2 == 0) ? 1.0 : -1.0;
        acc += binom * sign * S[k] * raw_moments[total_order - k];
        binom = binom * (n - k) / (k + 1);
    }
    return acc;
}

} // namespace kinchem
