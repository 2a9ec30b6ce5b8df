#pragma once

#include <vector>

#include "kinchem/moments.hpp"
#include "kinchem/params.hpp"
#include "kinchem/profile.hpp"

namespace kinchem {

enum class InterpolationKind { Linear, Cubic };

struct SimulationConfig {
    ModelKind model = ModelKind::A;
    double dt = 0.01;
    double t_end = 5.0;
    int output_stride = 10; // record every this many steps
    int moment_order = 3;
    InterpolationKind transport_interpolation = InterpolationKind::Cubic;
    double guard = 1e12;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<MomentTable> moments;
    std::vector<double> masses;
    PhaseField final_state;
    double min_value = 0.0;        // most negative f value seen at sample times
    double max_mass_drift = 0.0;   // max |mass(t) - mass(0)|
    double boundary_outflow = 0.0; // cumulative mass restored at the open x ends
    bool diverged = false;
    double divergence_time = -1.0;
};

/// Gain of the collision operator; loss is always M f.
/// Post-turning scan: gain(x,v) = S[rho](x+v) rho(x).
PhaseField collision_gain_a(const PhaseField& f);
/// Velocity-change scan: gain(x,v) = integral of S[rho](x+v-v') f(x,v') dv'.
PhaseField collision_gain_b(const PhaseField& f);

/// Full collision term gain - mass(f) * f.
PhaseField apply_q(const PhaseField& f, ModelKind model);

/// Semi-Lagrangian shift x -> x - v dt along each velocity row; zero inflow.
/// Cubic sampling clamps undershoots, then rescales the row back to the
/// unclamped integral so the clamp cannot create mass. Mass carried across
/// the open x ends by fast particles is restored proportionally afterwards
/// (the whole-line dynamics conserves mass identically, so on a domain that
/// contains the aggregate the loss is pure truncation error); the restored
/// amount is returned. Defects above 0.1% of the mass are left in place and
/// 0 is returned: that much outflow means the domain is too small.
double transport(PhaseField& f, double dt, InterpolationKind interpolation);

/// Exact integrating-factor relaxation with the gain frozen over the step:
/// f <- e^{-M dt} f + (1 - e^{-M dt})/M * gain, with the gain rescaled so the
/// substep conserves the quadrature mass exactly.
void relax(PhaseField& f, const PhaseField& gain, double mass, double dt);

/// Strang splitting: half transport, full relaxation, half transport.
/// Returns the boundary outflow restored by the transport halves.
double step(PhaseField& f, double dt, ModelKind model, InterpolationKind interpolation);

Trajectory simulate(const SimulationConfig& config, const PhaseField& f_I);

/// One application of the gain part of the Duhamel map for a time-constant
/// density, evaluated at time t:
/// G(rho)(x,t) = int_0^t e^{-Ms} int S[rho](x+v(1-s)) rho(x-vs) dv ds.
DensityProfile duhamel_gain(const DensityProfile& rho, const VelocityGrid& vgrid,
                            double mass, double t, int s_points = 32);

struct PicardResult {
    double ratio;         // sup_t L1(G(rho1)-G(rho2)) / L1(rho1-rho2)
    double bound;         // 2(1 - e^{-MT})
    std::vector<double> sample_times;
};

/// Measures the contraction factor of the Duhamel map on two time-constant
/// densities of equal mass. Throws std::invalid_argument for T >= ln2/M.
PicardResult picard_contraction_test(const DensityProfile& rho1, const DensityProfile& rho2,
                                     const VelocityGrid& vgrid, double mass, double T);

struct MonotoneDiagnostics {
    std::vector<double> times;
    /// masses[j][k] = mass of iterate j at time k; iterate 0 is identically 0.
    std::vector<std::vector<double>> masses;
    double max_mass = 0.0;
    /// max over (j,x,v,t) of f_j - f_{j+1} (should be <= 0 up to roundoff)
    double max_monotonicity_violation = 0.0;
    PhaseField last_iterate_final; // f_{j_max}(t_end)
};

/// Builds the nondecreasing approximation sequence for the velocity-change
/// model: f_0 = 0 and
/// f_{j+1}(x,v,t) = e^{-Mt} f_I(x-vt,v)
///   + int_0^t e^{M(s-t)} int S[rho_j](x+v(s-t+1)-v',s) f_j(x+v(s-t),v',s) dv' ds.
/// Linear (order-preserving) interpolation throughout.
MonotoneDiagnostics monotone_iterate_b(const PhaseField& f_I, double t_end, int time_samples,
                                       int iterates, int s_points = 16);

} // namespace kinchem
