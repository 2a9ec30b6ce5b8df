#include "kinchem/moments.hpp"

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <stdexcept>

#include "kinchem/errors.hpp"
#include "kinchem/signal.hpp"

namespace kinchem {

MomentTable::MomentTable(int order) : order_(order) {
    if (order < 0) throw std::invalid_argument("moment order must be nonnegative");
    values_.assign(state_size(order), 0.0);
}

int MomentTable::index(int m, int n) const {
    const int d = m + n;
    if (m < 0 || n < 0 || d > order_) throw std::out_of_range("moment index outside table");
    // degree-major: block of degree d starts at d(d+1)/2, entry n within it
    return d * (d + 1) / 2 + n;
}

std::vector<double> MomentTable::raw_spatial() const {
    std::vector<double> R(order_ + 1);
    for (int j = 0; j <= order_; ++j) R[j] = at(j, 0);
    return R;
}

std::vector<double> MomentTable::flatten() const { return values_; }

MomentTable MomentTable::unflatten(int order, const std::vector<double>& state) {
    MomentTable t(order);
    if (state.size() != t.values_.size())
        throw std::invalid_argument("state size does not match moment order");
    t.values_ = state;
    return t;
}

MomentTable compute_moments(const PhaseField& f, int order) {
    MomentTable t(order);
    for (int d = 0; d <= order; ++d)
        for (int n = 0; n <= d; ++n) t.at(d - n, n) = f.moment(d - n, n);
    return t;
}

MomentTable moment_rhs_a(const MomentTable& table) {
    const int N = table.order();
    const double M = table.mass();
    const std::vector<double> R = table.raw_spatial();
    const SignalMomentVector S = signal_moments(R);

    MomentTable rhs(N);
    for (int d = 0; d <= N; ++d) {
        for (int n = 0; n <= d; ++n) {
            const int m = d - n;
            double val = -M * table.at(m, n);
            if (m >= 1) val += m * table.at(m - 1, n + 1);
            val += cross_moment(n, d, S, R);
            rhs.at(m, n) = val;
        }
    }
    return rhs;
}

namespace {

using state_type = std::vector<double>;

struct CascadeRhs {
    int order;
    void operator()(const state_type& a, state_type& dadt, double) const {
        const MomentTable t = MomentTable::unflatten(order, a);
        dadt = moment_rhs_a(t).flatten();
    }
};

bool bad(const state_type& a, double guard) {
    for (double v : a)
        if (!std::isfinite(v) || std::abs(v) > guard) return true;
    return false;
}

} // namespace

CascadeResult integrate_cascade(const MomentTable& initial, const CascadeOptions& options) {
    namespace ode = boost::numeric::odeint;
    if (options.t_end < 0 || options.sample_dt <= 0)
        throw std::invalid_argument("cascade times must be positive");

    CascadeResult result;
    result.times.push_back(0.0);
    result.states.push_back(initial);

    const int order = initial.order();
    state_type state = initial.flatten();
    auto stepper = ode::make_controlled(options.abs_tol, options.rel_tol,
                                        ode::runge_kutta_dopri5<state_type>());
    CascadeRhs rhs{order};

    double t = 0.0;
    while (t < options.t_end - 1e-12) {
        const double t_next = std::min(t + options.sample_dt, options.t_end);
        try {
            ode::integrate_adaptive(stepper, rhs, state, t, t_next,
                                    std::min(options.sample_dt, 1e-2));
        } catch (...) {
            result.diverged = true;
            result.divergence_time = t_next;
            return result;
        }
        t = t_next;
        if (bad(state, options.guard)) {
            result.diverged = true;
            result.divergence_time = t;
            return result;
        }
        result.times.push_back(t);
        result.states.push_back(MomentTable::unflatten(order, state));
    }
    return result;
}

std::array<double, 3> second_order_steady_state(double mass) {
    if (mass <= 2.0)
        throw CriticalMassNotExceeded("second-order moments have no finite steady state for M <= 2");
    return {2.0 * mass / (mass - 2.0), 0.0, 2.0 * mass * mass / (mass - 2.0)};
}

MomentSystem build_matrix(int order, double mass) {
    if (order < 1) throw std::invalid_argument("moment system needs order >= 1");
    const int N = order;
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(N + 1, N + 1);
    for (int n = 0; n <= N; ++n) {
        C(n, n) = -mass;
        if (n < N) C(n, n + 1) = N - n;
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        C(n, 0) += (sign + (n == N ? 1.0 : 0.0)) * mass;
    }
    return {order, mass, std::move(C)};
}

Eigen::VectorXd MomentSystem::forcing(const MomentTable& lower) const {
    const int N = order;
    if (lower.order() < N - 1)
        throw std::invalid_argument("forcing needs lower moments up to order N-1");
    // R_N itself multiplies the matrix, not the forcing; pad it with zero
    std::vector<double> R(N + 1, 0.0);
    for (int j = 0; j <= N - 1; ++j) R[j] = lower.at(j, 0);
    const SignalMomentVector S = signal_moments(R);

    Eigen::VectorXd lot = Eigen::VectorXd::Zero(N + 1);
    for (int n = 0; n <= N; ++n) {
        double acc = 0.0;
        double binom = static_cast<double>(n); // C(n,1)
        for (int k = 1; k <= std::min(n, N - 1); ++k) {
            const double sign = ((n - k) % 2 == 0) ? 1.0 : -1.0;
            acc += binom * sign * S[k] * R[N - k];
            binom = binom * (n - k) / (k + 1);
        }
        if (n == N && N >= 2) acc += mass * N * (N - 1) * S[N - 2];
        lot(n) = acc;
    }
    return lot;
}

Eigen::VectorXd MomentSystem::block_equilibrium(const MomentTable& lower) const {
    return matrix.fullPivLu().solve(-forcing(lower));
}

MomentTable cascade_equilibrium(int order, double mass) {
    MomentTable t(order);
    t.at(0, 0) = mass;
    for (int N = 1; N <= order; ++N) {
        if (N == 1) {
            // C_1 is singular (translation mode); the centered equilibrium is 0
            t.at(1, 0) = 0.0;
            t.at(0, 1) = 0.0;
            continue;
        }
        const CriticalMassScan scan =
            critical_mass_scan(N, std::max(mass + 1.0, 50.0), 0.05, 1e-9);
        if (!scan.roots.empty() && mass <= scan.roots.back() + 1e-9)
            throw CriticalMassNotExceeded("mass at or below the order-" + std::to_string(N) +
                                          " threshold");
        const MomentSystem sys = build_matrix(N, mass);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(sys.matrix);
        if (!lu.isInvertible())
            throw CriticalMassNotExceeded("moment block is singular at this mass");
        const Eigen::VectorXd x = lu.solve(-sys.forcing(t));
        for (int n = 0; n <= N; ++n) t.at(N - n, n) = x(n);
    }
    return t;
}

double char_poly_pN(int order, double mass, double lambda) {
    const int N = order;
    const double y = -mass - lambda;
    double factorial = 1.0;
    for (int n = 2; n <= N; ++n) factorial *= n;

    double sum = 0.0;
    double term = 1.0; // y^n / n!
    for (int n = 0; n <= N - 1; ++n) {
        sum += term;
        term *= y / (n + 1);
    }
    const double sign = (N % 2 == 0) ? 1.0 : -1.0;
    return -lambda * std::pow(y, N) + mass * factorial * sum + sign * mass * factorial;
}

std::vector<double> char_poly_coefficients(int order, double mass) {
    const int N = order;
    // powers[j] = coefficients of (-M-lambda)^j, ascending in lambda
    std::vector<std::vector<double>> powers(N + 1);
    powers[0] = {1.0};
    for (int j = 1; j <= N; ++j) {
        powers[j].assign(j + 1, 0.0);
        for (int i = 0; i < j; ++i) {
            powers[j][i] += -mass * powers[j - 1][i];
            powers[j][i + 1] += -powers[j - 1][i];
        }
    }

    double factorial = 1.0;
    for (int n = 2; n <= N; ++n) factorial *= n;

    std::vector<double> coeff(N + 2, 0.0);
    // -lambda * (-M-lambda)^N
    for (int i = 0; i <= N; ++i) coeff[i + 1] -= powers[N][i];
    // M N! sum_{n<N} (-M-lambda)^n / n!
    double inv_fact = 1.0;
    for (int n = 0; n <= N - 1; ++n) {
        if (n >= 2) inv_fact /= n;
        const double scale = mass * factorial * (n < 2 ? 1.0 : inv_fact);
        for (int i = 0; i <= n; ++i) coeff[i] += scale * powers[n][i];
    }
    // (-1)^N M N!
    coeff[0] += ((N % 2 == 0) ? 1.0 : -1.0) * mass * factorial;
    return coeff;
}

double qN(int order, double mass) {
    const int N = order;
    if (N < 2) throw std::invalid_argument("q_N is defined for N >= 2");
    double sum = 1.0;
    double power = 1.0; // M^n / n!
    for (int n = 0; n <= N - 1; ++n) {
        const double sign = ((N - n) % 2 == 0) ? 1.0 : -1.0;
        sum += sign * power;
        power *= mass / (n + 1);
    }
    return sum;
}

CriticalMassScan critical_mass_scan(int order, double mass_limit, double step, double tol) {
    const int N = order;
    if (N < 2) throw std::invalid_argument("critical mass scan starts at order 2");
    CriticalMassScan scan{N, {}};
    double prev_m = step;
    double prev_q = qN(N, prev_m);
    for (double m = 2 * step; m <= mass_limit + 0.5 * step; m += step) {
        const double q = qN(N, m);
        if (prev_q == 0.0) {
            scan.roots.push_back(prev_m);
        } else if (q * prev_q < 0.0) {
            double lo = prev_m, hi = m, qlo = prev_q;
            while (hi - lo > tol) {
                const double mid = 0.5 * (lo + hi);
                const double qmid = qN(N, mid);
                if (qmid == 0.0) { lo = hi = mid; break; }
                if (qmid * qlo < 0.0) hi = mid;
                else { lo = mid; qlo = qmid; }
            }
            scan.roots.push_back(0.5 * (lo + hi));
        }
        prev_m = m;
        prev_q = q;
    }
    return scan;
}

std::vector<CriticalMassScan> critical_masses(int max_order, double mass_limit, double step,
                                              double tol) {
    if (max_order < 2) throw std::invalid_argument("critical mass scan starts at order 2");
    std::vector<CriticalMassScan> out;
    for (int N = 2; N <= max_order; ++N)
        out.push_back(critical_mass_scan(N, mass_limit, step, tol));
    return out;
}

StabilityReport stability(int order, double mass) {
    const MomentSystem sys = build_matrix(order, mass);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(sys.matrix);
    StabilityReport report;
    report.order = order;
    report.mass = mass;
    report.max_real_part = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= order; ++i) {
        const std::complex<double> ev = solver.eigenvalues()(i);
        report.eigenvalues.push_back(ev);
        report.max_real_part = std::max(report.max_real_part, ev.real());
    }
    constexpr double tol = 1e-9;
    if (report.max_real_part < -tol) report.verdict = StabilityVerdict::Stable;
    else if (report.max_real_part > tol) report.verdict = StabilityVerdict::Unstable;
    else report.verdict = StabilityVerdict::Marginal;

    if (order == 2) {
        // p_2 = -(l^3 + 2M l^2 + (M^2+2M) l + 2M(M-2)); Routh-Hurwitz on the
        // monic cubic l^3 + a2 l^2 + a1 l + a0: a2, a0 > 0 and a2 a1 > a0.
        const std::vector<double> c = char_poly_coefficients(2, mass);
        const double lead = c[3];
        const double a2 = c[2] / lead, a1 = c[1] / lead, a0 = c[0] / lead;
        report.hurwitz_stable = (a2 > 0.0) && (a0 > 0.0) && (a2 * a1 > a0);
    }
    return report;
}

std::vector<std::complex<double>> limit_root_positions(int order) {
    const int N = order;
    if (N < 1) throw std::invalid_argument("limit roots need order >= 1");
    std::vector<double> c(N + 1);
    c[0] = 1.0 + ((N % 2 == 0) ? 1.0 : -1.0);
    double inv_fact = 1.0;
    for (int n = 1; n <= N; ++n) {
        inv_fact /= n;
        c[n] = inv_fact;
    }
    // companion matrix of the monic version
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(N, N);
    for (int i = 1; i < N; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < N; ++i) comp(i, N - 1) = -c[i] / c[N];
    Eigen::EigenSolver<Eigen::MatrixXd> solver(comp);
    std::vector<std::complex<double>> roots(N);
    for (int i = 0; i < N; ++i) roots[i] = solver.eigenvalues()(i);
    std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return roots;
}

ModelBResult model_b_order2(double mass, std::array<double, 3> initial, double t_end,
                            double growth_threshold, double sample_dt) {
    namespace ode = boost::numeric::odeint;
    const double M = mass;
    ModelBResult result;
    result.growth_threshold = growth_threshold;
    result.steady_state = {-M, 0.0, -M * M};

    Eigen::Matrix3d jac;
    jac << 0, 2, 0, -M, 0, 1, 2 * M, -2 * M, 0;
    Eigen::EigenSolver<Eigen::Matrix3d> solver(jac);
    for (int i = 0; i < 3; ++i) result.jacobian_eigenvalues.push_back(solver.eigenvalues()(i));

    // state: (A20, A11, A02, D) with D integrated through the claimed identity
    state_type state = {initial[0], initial[1], initial[2],
                        initial[0] * initial[2] - initial[1] * initial[1]};
    auto rhs = [M](const state_type& a, state_type& dadt, double) {
        dadt.resize(4);
        dadt[0] = 2.0 * a[1];
        dadt[1] = a[2] - M * a[0];
        dadt[2] = 2.0 * M * (M + a[0] - a[1]);
        dadt[3] = 2.0 * M * a[0] * (M + a[0]);
    };
    auto stepper = ode::make_controlled(1e-10, 1e-10, ode::runge_kutta_dopri5<state_type>());

    auto record = [&](double t) {
        result.times.push_back(t);
        result.states.push_back({state[0], state[1], state[2]});
        const double direct = state[0] * state[2] - state[1] * state[1];
        result.max_identity_error =
            std::max(result.max_identity_error,
                     std::abs(state[3] - direct) / std::max(1.0, std::abs(direct)));
        if (!result.reached_threshold &&
            (state[0] > growth_threshold || state[2] > growth_threshold)) {
            result.reached_threshold = true;
            result.threshold_time = t;
        }
    };

    record(0.0);
    double t = 0.0;
    while (t < t_end - 1e-12) {
        const double t_next = std::min(t + sample_dt, t_end);
        try {
            ode::integrate_adaptive(stepper, rhs, state, t, t_next, sample_dt);
        } catch (...) {
            break;
        }
        t = t_next;
        if (bad(state, 1e12)) break;
        record(t);
    }
    return result;
}

} // namespace kinchem
