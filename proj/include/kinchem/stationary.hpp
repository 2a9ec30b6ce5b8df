#pragma once

#include <vector>

#include "kinchem/kinetic.hpp"
#include "kinchem/moments.hpp"
#include "kinchem/profile.hpp"

namespace kinchem {

/// Mild evaluation of the stationary balance along characteristics:
/// f(x,v) = int_0^infty rho(x-sv) S[rho](x+v(1-s)) e^{-Ms} ds,
/// computed with Gauss-Legendre quadrature after the substitution u = e^{-Ms}.
PhaseField mild_apply(const DensityProfile& rho, double mass, const VelocityGrid& vgrid,
                      int s_points = 64,
                      InterpolationKind sampling = InterpolationKind::Cubic);

struct StationaryOptions {
    int max_sweeps = 400;
    double tol = 1e-9;    // declare convergence when L1 update < tol * M
    double damping = 1.0; // mixing weight on the new iterate
    int s_points = 64;
    InterpolationKind sampling = InterpolationKind::Cubic;
    enum class Init { SignalKernel, Gaussian } init = Init::SignalKernel;
};

struct StationaryResult {
    DensityProfile rho;
    PhaseField f;
    double mass = 0.0;
    bool converged = false;
    int sweeps = 0;
    double last_update = 0.0;
    /// largest |quadrature mass - M| of a raw sweep output, before the
    /// per-sweep renormalization
    double max_mass_defect = 0.0;
    /// worst max_{ij} |v_j| f_ij seen over all sweeps (bounded by M^2)
    double max_velocity_weighted = 0.0;
    MomentTable moments{2};
    double residual_l1 = 0.0; // L1 of v df/dx - rho S[rho](x+v) + M f
    double confinement = 0.0; // integral of (1+x^2+v^2) f
};

/// Fixed-point iteration on the velocity average of the mild form, with
/// even-symmetrization and mass renormalization each sweep. Throws
/// CriticalMassNotExceeded for M <= 2. Non-convergence is reported in the
/// result, not thrown.
StationaryResult solve_stationary(double mass, const SpatialGrid& xgrid,
                                  const VelocityGrid& vgrid,
                                  const StationaryOptions& options = {});

/// Even real transform profile on the uniform band [0, xi_max]; the profile
/// represents rho_hat on the symmetric band via rho_hat(-xi) = rho_hat(xi).
struct SpectralProfile {
    double xi_max = 0.0;
    std::vector<double> values;

    int size() const { return static_cast<int>(values.size()); }
    double spacing() const { return xi_max / (size() - 1); }
    double node(int q) const { return q * spacing(); }
    /// Cubic sampling with even reflection; zero beyond xi_max.
    double operator()(double xi) const;
};

/// Transformed stationary fixed point:
/// F[rho_hat](xi) = int_0^infty e^{-Ms} rho_hat(xi(1-s)) rho_hat(xi s)
///                  / (1 + xi^2 s^2) ds,
/// evaluated with the u = e^{-Ms} substitution.
double fourier_rhs(const SpectralProfile& rho_hat, double mass, double xi, int s_points = 64);

struct SpectralOptions {
    int max_sweeps = 2000;
    double tol = 1e-9; // max-norm update threshold
    double damping = 0.5;
    int s_points = 64;
};

struct SpectralResult {
    SpectralProfile rho_hat;
    DensityProfile rho; // cosine reconstruction on the supplied spatial grid
    bool converged = false;
    int sweeps = 0;
    double last_update = 0.0;
    double max_abs_rho_hat = 0.0; // worst |rho_hat| over the whole iteration
    double min_reconstructed = 0.0;
};

/// Damped fixed-point iteration rho_hat <- (1-w) rho_hat + w F[rho_hat] with
/// rho_hat(0) pinned to M. Each sweep the iterate is filtered through the
/// spatial representation (reconstruct on [-L,L], clamp negatives, restore
/// mass, transform back): the fixed point of the raw map is unstable to
/// spreading perturbations that live outside the spatial domain, and the
/// filter removes exactly those. Throws CriticalMassNotExceeded for M <= 2.
SpectralResult solve_stationary_spectral(double mass, double xi_max, int n_xi,
                                         const SpatialGrid& xgrid,
                                         const SpectralOptions& options = {});

struct RegularityReport {
    double fhat_origin = 0.0; // equals the mass
    std::vector<double> shell_radii;
    std::vector<double> shell_maxima; // max |fhat| on each radial shell
    double fitted_exponent = 0.0;     // p in |fhat| ~ (1+r^2)^{-p} over the band
    int fitted_n = 0;                 // floor(p)
    std::vector<double> bound_constants; // sup |fhat| (1+r^2)^n for n = 1,2,3
    double asymmetry = 0.0;           // max |odd part| / mass, zero for even f
};

/// 2D cosine/sine transform of f with shell-wise decay fit; smoothness of f
/// shows up as superalgebraic decay of the transform.
RegularityReport regularity_diagnostic(const PhaseField& f, double xi_max = 8.0, int n_xi = 65,
                                       double k_max = 8.0, int n_k = 65);

inline RegularityReport regularity_diagnostic(const StationaryResult& result) {
    return regularity_diagnostic(result.f);
}

struct LargeMassReport {
    double marginal_l1 = 0.0;  // L1 distance of the normalized v-marginal
                               // from the concentration limit e^{-|v|}/2
    double rescaled_a20 = 0.0; // A_{2,0}/M, limit 2/(M-2)
    double rescaled_a02 = 0.0; // A_{0,2}/M, limit 2M/(M-2)
    double a20_target = 0.0;
    double a02_target = 0.0;
};

LargeMassReport large_mass_comparison(const StationaryResult& result);

} // namespace kinchem
