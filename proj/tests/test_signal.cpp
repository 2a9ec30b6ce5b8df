#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "kinchem/signal.hpp"
#include "oracles.hpp"

using namespace kinchem;

namespace {

DensityProfile mixture_profile(const oracle::Mixture& mix, const SpatialGrid& grid) {
    std::vector<double> vals(grid.size());
    for (int i = 0; i < grid.size(); ++i) vals[i] = oracle::mixture_density(mix, grid.node(i));
    return DensityProfile(grid, vals);
}

double signal_error(const oracle::Mixture& mix, int count) {
    const SpatialGrid grid(30.0, count);
    const SignalProfile S = convolve_signal(mixture_profile(mix, grid));
    double err = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        if (std::abs(grid.node(i)) > 10.0) continue; // keep domain truncation out
        err = std::max(err, std::abs(S[i] - oracle::mixture_signal(mix, grid.node(i))));
    }
    return err;
}

} // namespace

TEST_CASE("signal matches the closed form for a smooth source") {
    const oracle::Mixture mix{{1.7, -0.6, 0.9}, {1.1, 1.2, 1.3}};
    CHECK(signal_error(mix, 1201) < 2e-3);

    // second order in the spacing: halving the spacing quarters the error
    const double coarse = signal_error(mix, 601);
    const double fine = signal_error(mix, 1201);
    CHECK(fine < coarse);
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.3));
}

TEST_CASE("signal is positive, even for even sources, and bounded by half the mass") {
    const SpatialGrid grid(25.0, 801);
    const oracle::Mixture mix{{1.3, -2.0, 1.0}, {1.3, 2.0, 1.0}}; // even by construction
    const DensityProfile rho = mixture_profile(mix, grid);
    const SignalProfile S = convolve_signal(rho);
    const double M = rho.mass();
    for (int i = 0; i < grid.size(); ++i) {
        CHECK(S[i] > 0.0);
        CHECK(S[i] <= 0.5 * M * (1.0 + 1e-12));
        CHECK(S[i] == doctest::Approx(S[grid.size() - 1 - i]).epsilon(1e-12));
    }
    // the kernel has unit mass, so the signal carries the source mass
    // (up to the e^{-(L-|x|)} truncation tails)
    CHECK(S.mass() == doctest::Approx(M).epsilon(1e-6));
}

TEST_CASE("signal solves -S'' + S = rho in the interior") {
    const SpatialGrid grid(22.0, 881);
    const oracle::Mixture mix{{2.1, 0.4, 1.1}};
    const DensityProfile rho = mixture_profile(mix, grid);
    const SignalProfile S = convolve_signal(rho);
    const double h = grid.spacing();
    double worst = 0.0;
    for (int i = 40; i < grid.size() - 40; ++i) {
        const double second = (S[i - 1] - 2.0 * S[i] + S[i + 1]) / (h * h);
        worst = std::max(worst, std::abs(-second + S[i] - rho[i]));
    }
    CHECK(worst < 5e-3); // O(h^2) finite difference of an exact identity
}

TEST_CASE("signal moment recursion matches quadrature of the closed form") {
    std::mt19937 gen(2026);
    for (int trial = 0; trial < 5; ++trial) {
        const oracle::Mixture mix = oracle::random_mixture(gen);
        std::vector<double> raw(7);
        for (int k = 0; k <= 6; ++k) raw[k] = oracle::mixture_moment(mix, k);
        const SignalMomentVector S = signal_moments(raw);
        REQUIRE(S.order() == 6);
        for (int k = 0; k <= 6; ++k) {
            const double expected = oracle::mixture_signal_moment(mix, k);
            CHECK(S[k] == doctest::Approx(expected).epsilon(1e-9));
        }
    }
}

TEST_CASE("signal moment recursion in closed form") {
    const std::vector<double> raw{2.0, 0.5, 3.0, 1.0, 9.0};
    const SignalMomentVector S = signal_moments(raw);
    CHECK(S[0] == 2.0);
    CHECK(S[1] == 0.5);
    CHECK(S[2] == 3.0 + 2.0 * 2.0);        // R2 + 2 S0
    CHECK(S[3] == 1.0 + 6.0 * 0.5);        // R3 + 6 S1
    CHECK(S[4] == 9.0 + 12.0 * (3.0 + 4.0)); // R4 + 12 S2
    CHECK(signal_moments({}).values.empty());
    CHECK_THROWS_AS(cross_moment(3, 4, S, {1.0, 2.0}), std::out_of_range);
    CHECK_THROWS_AS(cross_moment(2, 1, S, raw), std::out_of_range);
}

TEST_CASE("cross moment reduction reproduces the hand example") {
    // n = 1, total order 2, S = (2, 0), R = (., 0, 3): -S0 R2 + S1 R1 = -6
    const SignalMomentVector S{{2.0, 0.0}};
    CHECK(cross_moment(1, 2, S, {1.0, 0.0, 3.0}) == -6.0);
}

TEST_CASE("cross moment reduction matches double quadrature") {
    std::mt19937 gen(7);
    for (int trial = 0; trial < 3; ++trial) {
        const oracle::Mixture mix = oracle::random_mixture(gen);
        std::vector<double> raw(5);
        for (int k = 0; k <= 4; ++k) raw[k] = oracle::mixture_moment(mix, k);
        const SignalMomentVector S = signal_moments(raw);
        for (int total = 1; total <= 4; ++total)
            for (int n = 0; n <= total; ++n) {
                const double expected = oracle::mixture_cross_moment(mix, n, total);
                const double got = cross_moment(n, total, S, raw);
                const double scale = std::max(std::abs(expected), 1.0);
                CHECK(std::abs(got - expected) / scale < 1e-6);
            }
    }
}

TEST_CASE("velocity averages of the shifted signal reduce to source moments") {
    // integral of v^n S(x+v) dv equals the n-th moment of S about x, which the
    // kernel identity turns into source moments:
    //   n = 0: R0, n = 1: R1 - x R0, n = 2: (R2 + 2 R0) - 2 x R1 + x^2 R0.
    std::mt19937 gen(99);
    const oracle::Mixture mix = oracle::random_mixture(gen);
    const double R0 = oracle::mixture_moment(mix, 0);
    const double R1 = oracle::mixture_moment(mix, 1);
    const double R2 = oracle::mixture_moment(mix, 2);
    for (double x : {-4.2, -1.0, 0.0, 0.7, 3.3}) {
        const auto shifted = [&](int n) {
            return oracle::integrate(
                [&](double v) { return std::pow(v, n) * oracle::mixture_signal(mix, x + v); },
                -70.0, 70.0, 56);
        };
        CHECK(shifted(0) == doctest::Approx(R0).epsilon(1e-8));
        CHECK(shifted(1) == doctest::Approx(R1 - x * R0).epsilon(1e-7));
        CHECK(shifted(2) ==
              doctest::Approx(R2 + 2.0 * R0 - 2.0 * x * R1 + x * x * R0).epsilon(1e-7));
    }
}
