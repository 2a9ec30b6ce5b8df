#pragma once

namespace kinchem {

/// Turning-kernel variant: A scans the signal in the direction of the
/// post-turning velocity, B in the direction of the velocity change.
enum class ModelKind { A, B };

/// Dimensional model parameters: tumbling modulation alpha, signal production
/// beta, signal decay gamma, turning sensitivity kappa, signal diffusivity.
struct PhysicalParams {
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    double kappa = 1.0;
    double diffusivity = 1.0;

    bool valid() const {
        return alpha > 0 && beta > 0 && gamma > 0 && kappa > 0 && diffusivity > 0;
    }
};

/// Multipliers taking dimensional quantities to the parameter-free form:
/// t -> time*t, v -> velocity*v, x -> space*x, f -> phase_density*f,
/// S -> signal*S.
struct ScalingFactors {
    double time;
    double velocity;
    double space;
    double phase_density;
    double signal;

    ScalingFactors inverse() const {
        return {1.0 / time, 1.0 / velocity, 1.0 / space, 1.0 / phase_density, 1.0 / signal};
    }
};

/// Throws std::invalid_argument if any parameter is non-positive.
ScalingFactors rescale(const PhysicalParams& params);

} // namespace kinchem
