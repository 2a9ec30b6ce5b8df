#include "kinchem/verify.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>

#include <Eigen/Dense>

#include "kinchem/errors.hpp"
#include "kinchem/initial.hpp"
#include "kinchem/io.hpp"
#include "kinchem/kinetic.hpp"
#include "kinchem/moments.hpp"
#include "kinchem/params.hpp"
#include "kinchem/signal.hpp"
#include "kinchem/stationary.hpp"

namespace kinchem {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

struct Suite {
    std::vector<CheckResult> results;

    void check(const std::string& name, const std::function<std::string()>& body) {
        CheckResult r{name, false, ""};
        try {
            r.detail = body(); // throws on failure
            r.pass = true;
        } catch (const std::exception& e) {
            r.detail = e.what();
        }
        results.push_back(std::move(r));
    }
};

void require(bool ok, const std::string& what) {
    if (!ok) throw std::runtime_error(what);
}

DensityProfile gaussian_profile(const SpatialGrid& grid, double mass, double center,
                                double width) {
    DensityProfile rho(grid);
    for (int i = 0; i < grid.size(); ++i) {
        const double a = (grid.node(i) - center) / width;
        rho[i] = std::exp(-0.5 * a * a);
    }
    const double m = rho.mass();
    for (int i = 0; i < grid.size(); ++i) rho[i] *= mass / m;
    return rho;
}

std::string check_grid() {
    const UniformGrid g(7.5, 151);
    double worst = 0.0;
    for (int i = 0; i < g.size(); ++i)
        worst = std::max(worst, std::abs(g.node(i) + g.node(g.size() - 1 - i)));
    require(worst == 0.0, "node mirror symmetry broken");
    double wsum = 0.0;
    for (int i = 0; i < g.size(); ++i) wsum += g.weight(i);
    require(std::abs(wsum - 15.0) < 1e-13 * 15.0, "weights do not sum to the span");
    return "mirror exact, weight sum defect " + fmt(std::abs(wsum - 15.0));
}

std::string check_rescale() {
    const ScalingFactors s = rescale({2.0, 1.0, 4.0, 1.0, 1.0});
    require(s.space == 0.5 && s.signal == 2.0, "gamma=4, D=1 multipliers wrong");
    require(s.time == 2.0 && s.velocity == 0.25 && s.phase_density == 32.0,
            "remaining multipliers wrong");
    const ScalingFactors inv = s.inverse();
    require(s.time * inv.time == 1.0 && s.space * inv.space == 1.0 &&
                s.velocity * inv.velocity == 1.0 && s.signal * inv.signal == 1.0 &&
                s.phase_density * inv.phase_density == 1.0,
            "inverse does not cancel");
    return "x-multiplier 0.5, S-multiplier 2";
}

std::string check_signal_closed_form() {
    // Tent density of half-width a: the two-pass convolution is exact for
    // piecewise linear input, so closed-form values must match to rounding.
    const double a = 5.0;
    const SpatialGrid grid(20.0, 641);
    DensityProfile rho(grid);
    for (int i = 0; i < grid.size(); ++i)
        rho[i] = std::max(0.0, 1.0 - std::abs(grid.node(i)) / a);
    const SignalProfile S = convolve_signal(rho);
    const double at0 = 1.0 - (1.0 - std::exp(-a)) / a;
    const double at10 = std::exp(-10.0) * (std::cosh(a) - 1.0) / a;
    const int i0 = grid.center_index();
    const int i10 = i0 + static_cast<int>(std::lround(10.0 / grid.spacing()));
    const double e0 = std::abs(S[i0] - at0) / at0;
    const double e10 = std::abs(S[i10] - at10) / at10;
    require(e0 < 1e-10 && e10 < 1e-10, "closed-form mismatch " + fmt(e0) + ", " + fmt(e10));
    return "relative errors " + fmt(e0) + " (peak), " + fmt(e10) + " (tail)";
}

std::string check_signal_moments() {
    const SpatialGrid grid(30.0, 2401);
    const DensityProfile rho = gaussian_profile(grid, 2.0, 0.3, 1.1);
    std::vector<double> raw(5);
    for (int k = 0; k <= 4; ++k) raw[k] = rho.moment(k);
    const SignalMomentVector S = signal_moments(raw);
    const SignalProfile sig = convolve_signal(rho);
    double worst = 0.0;
    for (int k = 0; k <= 4; ++k)
        worst = std::max(worst, std::abs(S[k] - sig.moment(k)) / std::max(1.0, std::abs(S[k])));
    require(worst < 1e-4, "moment recursion vs profile moments: " + fmt(worst));
    require(S[0] == raw[0] && S[1] == raw[1], "orders 0 and 1 must pass through");
    return "recursion vs grid quadrature " + fmt(worst) + " (grid-limited)";
}

std::string check_cross_moment() {
    SignalMomentVector S{{2.0, 0.0}};
    const std::vector<double> raw{0.0, 0.0, 3.0};
    const double got = cross_moment(1, 2, S, raw);
    require(got == -6.0, "documented reduction gives " + fmt(got));

    // Consistency with the assembled gain field. The reduction is a
    // whole-plane identity, so the velocity band must cover the signal tails.
    const auto [xg, vg] = make_grids(30.0, 601, 30.0, 601);
    PhaseField f(xg, vg);
    for (int i = 0; i < xg.size(); ++i)
        for (int j = 0; j < vg.size(); ++j) {
            const double x = xg.node(i), v = vg.node(j);
            f(i, j) = std::exp(-0.5 * (x * x + v * v));
        }
    const PhaseField gain = collision_gain_a(f);
    const DensityProfile rho = f.density();
    std::vector<double> R(4);
    for (int k = 0; k <= 3; ++k) R[k] = rho.moment(k);
    const SignalMomentVector Sm = signal_moments(R);
    double worst = 0.0;
    for (int n = 0; n <= 2; ++n) {
        const double direct = gain.moment(2 - n, n);
        const double reduced = cross_moment(n, 2, Sm, R);
        worst = std::max(worst, std::abs(direct - reduced) / std::max(1.0, std::abs(reduced)));
    }
    require(worst < 5e-3, "gain-field cross check: " + fmt(worst));
    return "example exact, field consistency " + fmt(worst);
}

std::string check_cascade_fixed_point() {
    const auto ss = second_order_steady_state(4.0);
    require(ss[0] == 4.0 && ss[1] == 0.0 && ss[2] == 16.0, "M=4 steady state wrong");
    bool threw = false;
    try {
        second_order_steady_state(2.0);
    } catch (const CriticalMassNotExceeded&) {
        threw = true;
    }
    require(threw, "M=2 must be rejected");

    const MomentTable eq = cascade_equilibrium(4, 4.0);
    const MomentTable rhs = moment_rhs_a(eq);
    double worst = 0.0;
    for (int d = 0; d <= 4; ++d)
        for (int n = 0; n <= d; ++n) worst = std::max(worst, std::abs(rhs.at(d - n, n)));
    require(worst < 1e-9, "equilibrium residual " + fmt(worst));
    return "derivative at equilibrium " + fmt(worst);
}

std::string check_char_poly() {
    const double M = 3.7, lam = 0.9;
    const MomentSystem sys = build_matrix(2, M);
    const Eigen::MatrixXd A =
        sys.matrix - lam * Eigen::MatrixXd::Identity(sys.matrix.rows(), sys.matrix.cols());
    const double det = A.determinant();
    const double closed = char_poly_pN(2, M, lam);
    const double rel = std::abs(det - closed) / std::abs(det);
    require(rel < 1e-12, "determinant mismatch " + fmt(rel));

    double worst = 0.0;
    for (int N = 2; N <= 6; ++N) {
        double fact = 1.0;
        for (int n = 2; n <= N; ++n) fact *= n;
        const double sign = (N % 2 == 0) ? 1.0 : -1.0;
        const double expected = sign * 2.6 * fact * qN(N, 2.6);
        worst = std::max(worst,
                         std::abs(char_poly_pN(N, 2.6, 0.0) - expected) /
                             std::max(1.0, std::abs(expected)));
    }
    require(worst < 1e-12, "value at zero vs q_N " + fmt(worst));
    return "determinant and q_N identities to " + fmt(std::max(rel, worst));
}

std::string check_critical_masses() {
    const auto scans = critical_masses(3);
    require(scans.size() == 2, "expected orders 2 and 3");
    const double e2 = std::abs(scans[0].roots.at(0) - 2.0);
    const double e3 = std::abs(scans[1].roots.at(0) - 2.0);
    require(e2 < 1e-9 && e3 < 1e-9, "thresholds " + fmt(e2) + ", " + fmt(e3));
    return "orders 2 and 3 at mass 2 within " + fmt(std::max(e2, e3));
}

std::string check_dichotomy() {
    const StabilityReport low = stability(2, 1.5);
    const StabilityReport high = stability(2, 4.0);
    require(low.verdict == StabilityVerdict::Unstable && low.max_real_part > 0.0,
            "subcritical mass must be unstable");
    require(high.verdict == StabilityVerdict::Stable && high.max_real_part < 0.0,
            "supercritical mass must be stable");
    require(low.hurwitz_stable && !*low.hurwitz_stable, "inequality chain at M=1.5");
    require(high.hurwitz_stable && *high.hurwitz_stable, "inequality chain at M=4");
    return "verdicts and inequality chain agree";
}

std::string check_kinetic_conservation() {
    const auto [xg, vg] = make_grids(12.0, 129, 12.0, 129);
    InitialCondition ic;
    ic.mass = 4.0;
    PhaseField f = build_initial(ic, xg, vg);
    const double m0 = f.mass();
    for (int k = 0; k < 20; ++k) step(f, 0.01, ModelKind::A, InterpolationKind::Cubic);
    // The relaxation substep conserves mass exactly; the semi-Lagrangian
    // resampling contributes O(dx^4) per step.
    const double drift = std::abs(f.mass() - m0) / m0;
    require(drift < 1e-7, "mass drift " + fmt(drift));
    double asym = 0.0, neg = 0.0;
    for (int i = 0; i < f.nx(); ++i)
        for (int j = 0; j < f.nv(); ++j) {
            asym = std::max(asym, std::abs(f(i, j) - f(f.nx() - 1 - i, f.nv() - 1 - j)));
            neg = std::min(neg, f(i, j));
        }
    require(asym < 1e-12 * f.max_abs(), "evenness violation " + fmt(asym));
    require(neg >= 0.0, "negative value " + fmt(neg));
    return "drift " + fmt(drift) + ", evenness defect " + fmt(asym);
}

std::string check_picard() {
    const SpatialGrid xg(16.0, 257);
    const VelocityGrid vg(8.0, 129);
    const DensityProfile r1 = gaussian_profile(xg, 1.0, 0.0, 1.0);
    const DensityProfile r2 = gaussian_profile(xg, 1.0, 0.7, 1.2);
    const PicardResult pr = picard_contraction_test(r1, r2, vg, 1.0, 0.5);
    require(pr.ratio <= pr.bound + 0.02,
            "ratio " + fmt(pr.ratio) + " above bound " + fmt(pr.bound));
    return "ratio " + fmt(pr.ratio) + " <= bound " + fmt(pr.bound);
}

std::string check_monotone() {
    const auto [xg, vg] = make_grids(6.0, 65, 6.0, 65);
    InitialCondition ic;
    ic.mass = 1.5;
    const PhaseField f0 = build_initial(ic, xg, vg);
    const MonotoneDiagnostics diag = monotone_iterate_b(f0, 0.6, 4, 3);
    require(diag.max_monotonicity_violation <= 1e-10,
            "ordering violated by " + fmt(diag.max_monotonicity_violation));
    require(diag.max_mass <= 1.5 + 1e-8, "mass " + fmt(diag.max_mass) + " above the datum");
    return "max violation " + fmt(diag.max_monotonicity_violation) + ", max mass " +
           fmt(diag.max_mass);
}

std::string check_stationary_small() {
    const auto [xg, vg] = make_grids(12.0, 193, 12.0, 97);
    const StationaryResult res = solve_stationary(4.0, xg, vg);
    require(res.converged, "no convergence in " + fmt(res.sweeps) + " sweeps");
    const double e20 = std::abs(res.moments.at(2, 0) - 4.0) / 4.0;
    const double e02 = std::abs(res.moments.at(0, 2) - 16.0) / 16.0;
    require(e20 < 0.03 && e02 < 0.03,
            "moments off by " + fmt(e20) + ", " + fmt(e02));
    double neg = 0.0;
    for (double v : res.f.data()) neg = std::min(neg, v);
    require(neg >= 0.0, "negative density " + fmt(neg));
    require(res.max_velocity_weighted <= 16.0 * (1.0 + 1e-6),
            "|v| f reached " + fmt(res.max_velocity_weighted));
    return "moments within " + fmt(std::max(e20, e02)) + ", |v| f max " +
           fmt(res.max_velocity_weighted);
}

std::string check_round_trip() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "kinchem-verify";
    fs::create_directories(dir);
    const auto [xg, vg] = make_grids(3.0, 9, 2.0, 7);
    PhaseField f(xg, vg);
    double seed = 0.1234;
    for (double& v : f.data()) {
        seed = std::fmod(seed * 997.0 + 0.173, 1.0);
        v = seed;
    }
    const std::string path = (dir / "field.csv").string();
    write_field(path, f);
    const PhaseField back = read_field(path);
    require(back.data() == f.data() && back.xgrid().same_layout(xg) &&
                back.vgrid().same_layout(vg),
            "field snapshot altered by round trip");

    for (double v : {0.1, 1.0 / 3.0, 1e-300, -0.0, 4.0, 12345.678901234567}) {
        const double parsed = std::stod(format_double(v));
        require(parsed == v, "format_double not invertible at " + fmt(v));
    }
    fs::remove_all(dir);
    return "field bytes and shortest decimals invert exactly";
}

} // namespace

std::vector<CheckResult> run_invariant_suite() {
    Suite suite;
    suite.check("grid symmetry and quadrature weights", check_grid);
    suite.check("rescaling multipliers and inverse", check_rescale);
    suite.check("signal convolution closed form", check_signal_closed_form);
    suite.check("signal moment recursion", check_signal_moments);
    suite.check("cross moment reduction", check_cross_moment);
    suite.check("moment cascade fixed points", check_cascade_fixed_point);
    suite.check("characteristic polynomial identities", check_char_poly);
    suite.check("critical mass thresholds", check_critical_masses);
    suite.check("stability dichotomy", check_dichotomy);
    suite.check("kinetic conservation and symmetry", check_kinetic_conservation);
    suite.check("contraction bound", check_picard);
    suite.check("monotone iteration", check_monotone);
    suite.check("stationary solve, small grid", check_stationary_small);
    suite.check("snapshot round trips", check_round_trip);
    return suite.results;
}

bool print_invariant_suite(const std::vector<CheckResult>& results) {
    std::size_t passed = 0;
    for (const auto& r : results) {
        std::printf("[%s] %-42s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
        if (r.pass) ++passed;
    }
    std::printf("%zu/%zu checks passed\n", passed, results.size());
    return passed == results.size();
}

} // namespace kinchem
