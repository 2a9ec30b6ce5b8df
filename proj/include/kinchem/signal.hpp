#pragma once

#include <vector>

#include "kinchem/profile.hpp"

namespace kinchem {

/// Moments S_k of the signal produced by a source with moments R_k.
struct SignalMomentVector {
    std::vector<double> values; // S_0 .. S_N

    int order() const { return static_cast<int>(values.size()) - 1; }
    double operator[](int k) const { return values[k]; }
};

/// Quasistationary signal S(x) = 1/2 * integral of e^{-|x-y|} rho(y) dy,
/// i.e. the decaying solution of -S'' + S = rho. Exact for the piecewise
/// linear interpolant of rho; O(n) via left/right exponential accumulators.
/// Contributions from outside the grid are dropped (error <= mass * e^{-(L-|x|)}).
SignalProfile convolve_signal(const DensityProfile& rho);

/// S_0 = R_0, S_1 = R_1, S_k = R_k + k(k-1) S_{k-2}. The input holds the raw
/// source moments R_0..R_N.
SignalMomentVector signal_moments(const std::vector<double>& raw_moments);

/// Integral of x^{N-n} v^n S(x+v) rho(x) over the plane, reduced to
/// sum_{k=0..n} C(n,k) (-1)^{n-k} S_k R_{N-k}. Requires S up to order n and
/// R up to order N.
double cross_moment(int n, int total_order, const SignalMomentVector& S,
                    const std::vector<double>& raw_moments);

} // namespace kinchem
