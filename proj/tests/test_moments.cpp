#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include "kinchem/errors.hpp"
#include "kinchem/initial.hpp"
#include "kinchem/moments.hpp"
#include "oracles.hpp"

using namespace kinchem;

namespace {

// frozen output of the critical mass scan (step 1e-2, bisection tol 1e-10)
const std::vector<double> kCriticalMasses{
    2.51274532661833, 2.78529356340528, 3.21704786664011, 3.5534412584623,
    3.95412973063119, 4.31362722777438, 4.70082725552059, 5.06951841098689,
    5.45042304094539};

std::complex<double> eval_poly(const std::vector<double>& ascending, std::complex<double> z) {
    std::complex<double> acc = 0.0;
    for (int i = static_cast<int>(ascending.size()) - 1; i >= 0; --i)
        acc = acc * z + ascending[i];
    return acc;
}

MomentTable sample_table() {
    MomentTable t(2);
    t.at(0, 0) = 3.0;
    t.at(1, 0) = 0.4;
    t.at(0, 1) = -0.2;
    t.at(2, 0) = 1.1;
    t.at(1, 1) = 0.3;
    t.at(0, 2) = 2.7;
    return t;
}

} // namespace

TEST_CASE("moment table layout and round trip") {
    CHECK(MomentTable::state_size(3) == 10);
    MomentTable t = sample_table();
    CHECK(t.mass() == 3.0);
    CHECK(t.raw_spatial() == std::vector<double>{3.0, 0.4, 1.1});
    const std::vector<double> flat = t.flatten();
    CHECK(flat == std::vector<double>{3.0, 0.4, -0.2, 1.1, 0.3, 2.7});
    const MomentTable back = MomentTable::unflatten(2, flat);
    CHECK(back.at(1, 1) == 0.3);
    CHECK_THROWS_AS(t.at(2, 1), std::out_of_range);
    CHECK_THROWS_AS(t.at(-1, 0), std::out_of_range);
    CHECK_THROWS_AS(MomentTable(-1), std::invalid_argument);
    CHECK_THROWS_AS(MomentTable::unflatten(3, flat), std::invalid_argument);
}

TEST_CASE("computed moments agree with direct field quadrature") {
    const SpatialGrid xg(10.0, 101);
    const VelocityGrid vg(6.0, 61);
    InitialCondition ic;
    ic.mass = 2.5;
    ic.x_center = 0.7;
    const PhaseField f = build_initial(ic, xg, vg);
    const MomentTable t = compute_moments(f, 3);
    for (int d = 0; d <= 3; ++d)
        for (int n = 0; n <= d; ++n) CHECK(t.at(d - n, n) == f.moment(d - n, n));
}

TEST_CASE("moment derivative matches the hand-expanded order-2 formulas") {
    const MomentTable t = sample_table();
    const double M = 3.0, A10 = 0.4, A01 = -0.2, A20 = 1.1, A11 = 0.3, A02 = 2.7;
    const MomentTable rhs = moment_rhs_a(t);
    CHECK(rhs.at(0, 0) == doctest::Approx(0.0).epsilon(1e-14)); // gain balances loss
    CHECK(rhs.at(1, 0) == doctest::Approx(A01).epsilon(1e-14));
    CHECK(rhs.at(0, 1) == doctest::Approx(-M * A01).epsilon(1e-14));
    CHECK(rhs.at(2, 0) == doctest::Approx(2.0 * A11).epsilon(1e-14));
    CHECK(rhs.at(1, 1) ==
          doctest::Approx(A02 - M * A20 + A10 * A10 - M * A11).epsilon(1e-14));
    CHECK(rhs.at(0, 2) ==
          doctest::Approx(2.0 * M * A20 - 2.0 * A10 * A10 + 2.0 * M * M - M * A02)
              .epsilon(1e-14));
}

TEST_CASE("second order steady state and cascade equilibrium") {
    const auto s4 = second_order_steady_state(4.0);
    CHECK(s4[0] == 4.0);
    CHECK(s4[1] == 0.0);
    CHECK(s4[2] == 16.0);
    const auto s3 = second_order_steady_state(3.0);
    CHECK(s3[0] == 6.0);
    CHECK(s3[2] == 18.0);
    const auto s10 = second_order_steady_state(10.0);
    CHECK(s10[0] == 2.5);
    CHECK(s10[2] == 25.0);
    CHECK_THROWS_AS(second_order_steady_state(2.0), CriticalMassNotExceeded);
    CHECK_THROWS_AS(second_order_steady_state(1.5), CriticalMassNotExceeded);

    const MomentTable eq = cascade_equilibrium(4, 4.0);
    CHECK(eq.at(0, 0) == 4.0);
    CHECK(eq.at(1, 0) == 0.0);
    CHECK(eq.at(2, 0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(eq.at(1, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(eq.at(0, 2) == doctest::Approx(16.0).epsilon(1e-12));
    CHECK(eq.at(3, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(eq.at(4, 0) == doctest::Approx(36.0).epsilon(1e-10));
    CHECK(eq.at(2, 2) == doctest::Approx(48.0).epsilon(1e-10));
    CHECK(eq.at(0, 4) == doctest::Approx(288.0).epsilon(1e-10));

    // the equilibrium really is a fixed point of the full derivative
    const MomentTable r = moment_rhs_a(eq);
    for (double v : r.flatten()) CHECK(std::abs(v) < 1e-9);
}

TEST_CASE("cascade trajectories are consistent with the reported derivative") {
    MomentTable init(2);
    init.at(0, 0) = 4.0;
    init.at(2, 0) = 5.0;
    init.at(1, 1) = -0.5;
    init.at(0, 2) = 14.0;
    CascadeOptions opt;
    opt.t_end = 2.0;
    opt.sample_dt = 0.05;
    const CascadeResult res = integrate_cascade(init, opt);
    REQUIRE(res.times.size() > 10);
    CHECK_FALSE(res.diverged);
    // centered difference of the samples against the analytic rhs; the fast
    // modes decay like e^{-Mt}, so skip the initial layer where the h^2
    // difference error of those modes is still visible
    for (std::size_t k = 12; k + 2 < res.times.size(); k += 5) {
        const std::vector<double> lo = res.states[k - 1].flatten();
        const std::vector<double> hi = res.states[k + 1].flatten();
        const std::vector<double> rhs = moment_rhs_a(res.states[k]).flatten();
        const double h = res.times[k + 1] - res.times[k];
        for (std::size_t c = 0; c < rhs.size(); ++c) {
            const double fd = (hi[c] - lo[c]) / (2.0 * h);
            CHECK(fd == doctest::Approx(rhs[c]).epsilon(1e-2));
        }
    }
}

TEST_CASE("supercritical cascade settles, subcritical cascade blows up") {
    MomentTable init(2);
    init.at(0, 0) = 3.0;
    init.at(2, 0) = 6.3;
    init.at(1, 1) = 0.1;
    init.at(0, 2) = 17.5;
    CascadeOptions opt;
    opt.t_end = 60.0;
    const CascadeResult res = integrate_cascade(init, opt);
    REQUIRE_FALSE(res.diverged);
    const MomentTable& fin = res.final_state();
    CHECK(fin.at(2, 0) == doctest::Approx(6.0).epsilon(1e-8));
    CHECK(std::abs(fin.at(1, 1)) < 1e-8);
    CHECK(fin.at(0, 2) == doctest::Approx(18.0).epsilon(1e-8));

    MomentTable sub(2);
    sub.at(0, 0) = 1.5;
    sub.at(2, 0) = 1.0;
    sub.at(0, 2) = 1.0;
    CascadeOptions blow;
    blow.t_end = 400.0;
    blow.guard = 1e10;
    const CascadeResult div = integrate_cascade(sub, blow);
    CHECK(div.diverged);
    CHECK(div.divergence_time > 0.0);
    CHECK(div.times.size() < 400.0 / 0.1 + 2);
}

TEST_CASE("top-order coefficient blocks in closed form") {
    const double M = 3.7;
    const MomentSystem c2 = build_matrix(2, M);
    const Eigen::Matrix3d want2{{0.0, 2.0, 0.0}, {-M, -M, 1.0}, {2.0 * M, 0.0, -M}};
    CHECK((c2.matrix - want2).norm() == 0.0);
    const MomentSystem c1 = build_matrix(1, M);
    const Eigen::Matrix2d want1{{0.0, 1.0}, {0.0, -M}};
    CHECK((c1.matrix - want1).norm() == 0.0);
    // the order-1 block is singular: translations are neutral
    CHECK(std::abs(c1.matrix.determinant()) == 0.0);

    // centered lower moments force only the top row of the order-2 block
    MomentTable lower(1);
    lower.at(0, 0) = M;
    const Eigen::VectorXd lot = c2.forcing(lower);
    CHECK(lot(0) == 0.0);
    CHECK(lot(1) == 0.0);
    CHECK(lot(2) == doctest::Approx(2.0 * M * M).epsilon(1e-14));
    const Eigen::VectorXd eqv = c2.block_equilibrium(lower);
    const auto want = second_order_steady_state(M);
    CHECK(eqv(0) == doctest::Approx(want[0]).epsilon(1e-12));
    CHECK(std::abs(eqv(1)) < 1e-12);
    CHECK(eqv(2) == doctest::Approx(want[2]).epsilon(1e-12));

    CHECK_THROWS_AS(cascade_equilibrium(2, 1.9), CriticalMassNotExceeded);
    // 2.3 clears the order-2 threshold but not the order-4 one
    CHECK_THROWS_AS(cascade_equilibrium(4, 2.3), CriticalMassNotExceeded);
}

TEST_CASE("characteristic polynomial closed form against the determinant") {
    CHECK(char_poly_coefficients(2, 4.0) ==
          std::vector<double>{-16.0, -24.0, -8.0, -1.0});

    std::mt19937 gen(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int N = 2 + static_cast<int>(gen() % 7); // orders 2..8
        const double M = oracle::urand(gen, 0.2, 12.0);
        const double lam = oracle::urand(gen, -8.0, 8.0);
        const MomentSystem sys = build_matrix(N, M);
        const Eigen::MatrixXd shifted =
            sys.matrix - lam * Eigen::MatrixXd::Identity(N + 1, N + 1);
        const double det = shifted.determinant();
        const double p = char_poly_pN(N, M, lam);
        const double scale = std::max({std::abs(det), std::abs(p), 1.0});
        CHECK(std::abs(det - p) / scale < 1e-10);
        // coefficient expansion evaluates to the same polynomial
        const double via_coeff = eval_poly(char_poly_coefficients(N, M), lam).real();
        CHECK(std::abs(via_coeff - p) / scale < 1e-10);
    }
}

TEST_CASE("constant coefficient ties the polynomial to the mass threshold") {
    CHECK(qN(2, 2.0) == 0.0);
    CHECK(qN(3, 2.0) == 0.0);
    CHECK(qN(2, 2.6) == doctest::Approx(2.0 - 2.6).epsilon(1e-14));
    CHECK(qN(3, 2.6) == doctest::Approx(2.6 - 0.5 * 2.6 * 2.6).epsilon(1e-14));
    CHECK_THROWS_AS(qN(1, 3.0), std::invalid_argument);

    double factorial = 2.0;
    for (int N = 2; N <= 6; ++N) {
        const double M = 2.6;
        const double p0 = char_poly_pN(N, M, 0.0);
        const double sign = (N % 2 == 0) ? 1.0 : -1.0;
        CHECK(p0 == doctest::Approx(sign * M * factorial * qN(N, M)).epsilon(1e-12));
        factorial *= (N + 1);
    }
}

TEST_CASE("critical masses: the scan finds the polynomial roots") {
    const CriticalMassScan two = critical_mass_scan(2);
    REQUIRE(two.roots.size() == 1);
    CHECK(two.roots[0] == doctest::Approx(2.0).epsilon(1e-9));
    const CriticalMassScan three = critical_mass_scan(3);
    REQUIRE(three.roots.size() == 1);
    CHECK(three.roots[0] == doctest::Approx(2.0).epsilon(1e-9));

    const std::vector<CriticalMassScan> scans = critical_masses(12);
    REQUIRE(scans.size() == 11);
    double prev = 2.0;
    for (int N = 4; N <= 12; ++N) {
        const CriticalMassScan& scan = scans[N - 2];
        REQUIRE_FALSE(scan.roots.empty());
        const double root = scan.roots.front();
        CHECK(root == doctest::Approx(kCriticalMasses[N - 4]).epsilon(1e-8));
        CHECK(root > prev);
        // a root of the scan is a root of q_N
        CHECK(std::abs(qN(N, root)) < 1e-8);
        prev = root;
    }
    CHECK(scans[2].roots.front() > 2.0);
    CHECK(scans[2].roots.front() < 3.0);
}

TEST_CASE("stability verdicts flip at the mass threshold") {
    const StabilityReport stable = stability(2, 4.0);
    CHECK(stable.verdict == StabilityVerdict::Stable);
    CHECK(stable.max_real_part < 0.0);
    CHECK(stable.max_real_part == doctest::Approx(-0.9126).epsilon(2e-3));
    REQUIRE(stable.hurwitz_stable.has_value());
    CHECK(*stable.hurwitz_stable);

    // every reported eigenvalue is a root of the closed-form polynomial
    const std::vector<double> coeff = char_poly_coefficients(2, 4.0);
    for (const auto& ev : stable.eigenvalues)
        CHECK(std::abs(eval_poly(coeff, ev)) < 1e-8);

    const StabilityReport unstable = stability(2, 1.0);
    CHECK(unstable.verdict == StabilityVerdict::Unstable);
    CHECK(unstable.max_real_part > 0.0);
    REQUIRE(unstable.hurwitz_stable.has_value());
    CHECK_FALSE(*unstable.hurwitz_stable);

    const StabilityReport marginal = stability(2, 2.0);
    CHECK(marginal.verdict == StabilityVerdict::Marginal);

    const StabilityReport third = stability(3, 5.0);
    CHECK_FALSE(third.hurwitz_stable.has_value());
    CHECK(third.verdict == StabilityVerdict::Stable);
}

TEST_CASE("limit positions of the fast spectrum") {
    const auto roots = limit_root_positions(3);
    REQUIRE(roots.size() == 3);
    const double imag = std::sqrt(15.0) / 2.0;
    CHECK(std::abs(roots[0] - std::complex<double>(-1.5, -imag)) < 1e-9);
    CHECK(std::abs(roots[1] - std::complex<double>(-1.5, imag)) < 1e-9);
    CHECK(std::abs(roots[2]) < 1e-12);

    // each root u satisfies (-1)^N + sum_{n=0..N} u^n/n! = 0
    for (const auto& u : limit_root_positions(4)) {
        std::complex<double> acc = 2.0; // (-1)^4 plus the n = 0 term
        std::complex<double> term = 1.0;
        for (int n = 1; n <= 4; ++n) {
            term *= u / static_cast<double>(n);
            acc += term;
        }
        CHECK(std::abs(acc) < 1e-9);
    }
}

TEST_CASE("velocity-change closure: the determinant identity propagates growth") {
    const ModelBResult one = model_b_order2(1.0, {1.0, 0.0, 1.0}, 25.0);
    CHECK(one.max_identity_error < 1e-8);
    CHECK(one.reached_threshold);
    CHECK(one.threshold_time == doctest::Approx(15.43).epsilon(0.01));
    CHECK(one.steady_state[0] == -1.0);
    CHECK(one.steady_state[1] == 0.0);
    CHECK(one.steady_state[2] == -1.0);
    double max_real = -1e300;
    for (const auto& ev : one.jacobian_eigenvalues) max_real = std::max(max_real, ev.real());
    CHECK(max_real > 0.1);

    const ModelBResult four = model_b_order2(4.0, {1.0, 0.0, 1.0}, 25.0);
    CHECK(four.max_identity_error < 1e-8);
    CHECK(four.reached_threshold);
    CHECK(four.threshold_time == doctest::Approx(11.50).epsilon(0.01));
    CHECK(four.steady_state[2] == -16.0);

    // unbounded growth; A02 leads, so only the maximum is guaranteed large
    const auto& last = four.states.back();
    CHECK(std::max(last[0], last[2]) > 1e6);
}
