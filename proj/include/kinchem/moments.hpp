#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "kinchem/profile.hpp"

namespace kinchem {

/// Moments A_{m,n} = integral of x^m v^n f for all m+n <= order.
class MomentTable {
public:
    explicit MomentTable(int order);

    int order() const { return order_; }
    double at(int m, int n) const { return values_[index(m, n)]; }
    double& at(int m, int n) { return values_[index(m, n)]; }
    double mass() const { return at(0, 0); }

    /// Spatial moments R_0..R_order, R_j = A_{j,0}.
    std::vector<double> raw_spatial() const;

    /// Degree-major flattening (0,0),(1,0),(0,1),(2,0),(1,1),(0,2),...
    std::vector<double> flatten() const;
    static MomentTable unflatten(int order, const std::vector<double>& state);
    static int state_size(int order) { return (order + 1) * (order + 2) / 2; }

private:
    int index(int m, int n) const;
    int order_;
    std::vector<double> values_;
};

MomentTable compute_moments(const PhaseField& f, int order);

/// Time derivative of every entry under the gain/loss dynamics:
/// dA_{m,n}/dt = m A_{m-1,n+1} + sum_k C(n,k)(-1)^{n-k} S_k R_{m+n-k} - M A_{m,n}
/// with R_j = A_{j,0}, S_k from the signal moment recursion, M = A_{0,0}.
MomentTable moment_rhs_a(const MomentTable& table);

struct CascadeOptions {
    double t_end = 10.0;
    double sample_dt = 0.1;
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double guard = 1e12; // |A| beyond this declares divergence
};

struct CascadeResult {
    std::vector<double> times;
    std::vector<MomentTable> states;
    bool diverged = false;
    double divergence_time = -1.0;

    const MomentTable& final_state() const { return states.back(); }
};

/// Adaptive Runge-Kutta on the full closed polynomial system. Divergence
/// (guard exceeded or NaN) truncates the trajectory and sets the flag; it is
/// a valid outcome, not an error.
CascadeResult integrate_cascade(const MomentTable& initial, const CascadeOptions& options = {});

/// (2M/(M-2), 0, 2M^2/(M-2)); throws CriticalMassNotExceeded for M <= 2.
std::array<double, 3> second_order_steady_state(double mass);

/// Top-order block of the cascade: d/dt (A_{N,0},...,A_{0,N}) = C_N A + LOT,
/// rows indexed by n with state A_{N-n,n}.
struct MomentSystem {
    int order;
    double mass;
    Eigen::MatrixXd matrix;

    /// Inhomogeneity from moments of order < N (lower must have order >= N-1).
    Eigen::VectorXd forcing(const MomentTable& lower) const;
    /// Solve C_N x = -forcing(lower).
    Eigen::VectorXd block_equilibrium(const MomentTable& lower) const;
};

MomentSystem build_matrix(int order, double mass);

/// Equilibrium of all blocks up to the given order, solved order by order.
/// Throws CriticalMassNotExceeded when the mass is at or below the threshold
/// of any order involved.
MomentTable cascade_equilibrium(int order, double mass);

/// Characteristic polynomial of C_N in closed form:
/// p_N(l) = -l(-M-l)^N + M N! sum_{n=0}^{N-1} (-M-l)^n/n! + (-1)^N M N!.
double char_poly_pN(int order, double mass, double lambda);

/// Coefficients of p_N in ascending powers of lambda (degree N+1).
std::vector<double> char_poly_coefficients(int order, double mass);

/// q_N(M) = 1 + sum_{n=0}^{N-1} (-1)^{N-n} M^n/n!; p_N(0) = (-1)^N M N! q_N(M).
double qN(int order, double mass);

struct CriticalMassScan {
    int order;
    std::vector<double> roots; // zeros of q_N on (0, mass_limit], ascending
};

/// Scans q_N on (0, mass_limit] with the given step, refining each sign
/// change by bisection. An empty root list is reported, not an error.
CriticalMassScan critical_mass_scan(int order, double mass_limit = 50.0, double step = 0.01,
                                    double tol = 1e-10);

/// critical_mass_scan for every N = 2..max_order.
std::vector<CriticalMassScan> critical_masses(int max_order, double mass_limit = 50.0,
                                              double step = 0.01, double tol = 1e-10);

enum class StabilityVerdict { Stable, Unstable, Marginal };

struct StabilityReport {
    int order;
    double mass;
    std::vector<std::complex<double>> eigenvalues;
    double max_real_part;
    StabilityVerdict verdict;
    /// Routh-Hurwitz inequality chain on the cubic; only filled for order 2.
    std::optional<bool> hurwitz_stable;
};

/// Dense eigensolve of C_N; verdict with tolerance 1e-9 on real parts.
StabilityReport stability(int order, double mass);

/// Roots of r_N(u) = (-1)^N + sum_{n=0}^N u^n/n!. For large M the spectrum
/// of C_N approaches {-N} union {-M - u_j}.
std::vector<std::complex<double>> limit_root_positions(int order);

struct ModelBResult {
    std::vector<double> times;
    std::vector<std::array<double, 3>> states; // (A20, A11, A02)
    /// max over samples of |D_ode - (A20 A02 - A11^2)| / max(1, |.|) where
    /// D_ode integrates dD/dt = 2 M A20 (M + A20) alongside the moments.
    double max_identity_error = 0.0;
    std::vector<std::complex<double>> jacobian_eigenvalues;
    std::array<double, 3> steady_state; // (-M, 0, -M^2), not reachable from valid data
    bool reached_threshold = false;
    double threshold_time = -1.0;
    double growth_threshold = 1e6;
};

/// Second-order moment system for the velocity-change model:
/// dA20 = 2 A11, dA11 = A02 - M A20, dA02 = 2M(M + A20 - A11).
ModelBResult model_b_order2(double mass, std::array<double, 3> initial, double t_end,
                            double growth_threshold = 1e6, double sample_dt = 0.05);

} // namespace kinchem
