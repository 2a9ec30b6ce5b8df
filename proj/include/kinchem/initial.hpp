#pragma once

#include <string>

#include "kinchem/profile.hpp"

namespace kinchem {

enum class InitialFamily { GaussianProduct, ExponentialSignal, DoubleBump, File };

struct InitialCondition {
    InitialFamily family = InitialFamily::GaussianProduct;
    double mass = 4.0;
    double x_center = 0.0;
    double v_center = 0.0;
    double x_width = 1.0;
    double v_width = 1.0;
    double separation = 4.0; // distance between the two bumps
    std::string path;        // snapshot file for the File family
};

/// Evaluates the requested shape at the nodes and rescales it to the
/// requested mass. Nonnegative by construction; throws std::invalid_argument
/// on non-positive widths/mass or an empty shape.
PhaseField build_initial(const InitialCondition& ic, const SpatialGrid& xgrid,
                         const VelocityGrid& vgrid);

struct CenterFrameResult {
    PhaseField field;
    double shift;             // applied x-translation
    double momentum_residual; // A_{0,1}, unchanged by any translation
};

/// Translates x so the first spatial moment of the translated solution decays
/// to zero: the drift ODEs dA10 = A01, dA01 = -M A01 give
/// A10(inf) = A10(0) + A01(0)/M, so the shift is that limit divided by M.
CenterFrameResult center_frame(const PhaseField& f_I);

} // namespace kinchem
