#pragma once

#include <string>
#include <vector>

#include "kinchem/initial.hpp"
#include "kinchem/params.hpp"

namespace kinchem {

enum class CommandKind { Simulate, Moments, CriticalMass, Stationary, Verify };

struct ExperimentConfig {
    CommandKind command = CommandKind::Verify;
    ModelKind model = ModelKind::A;
    std::string model_name = "A";
    double mass = 4.0;

    // phase-space grids
    double space_half_width = 20.0;
    int space_count = 257;
    double velocity_half_width = 20.0;
    int velocity_count = 257;

    // simulate
    double dt = 0.01;
    double t_end = 5.0;
    int output_stride = 10;
    int moment_order = 3;
    std::string interpolation = "cubic";
    bool center = false;

    // moments
    int cascade_order = 2;
    double cascade_t_end = 40.0;
    double sample_dt = 0.1;

    // critical-mass
    int max_order = 12;
    double mass_limit = 50.0;
    double scan_step = 0.01;
    double bisection_tol = 1e-10;
    int jobs = 1;

    // stationary
    int max_sweeps = 400;
    double sweep_tol = 1e-9;
    int s_points = 64;
    double damping = 1.0;
    bool with_spectral = false;
    double xi_max = 40.0;
    int n_xi = 1025;

    std::string ic_family = "gaussian-product";
    InitialCondition initial;

    std::string out_dir = "out";
};

/// Raised for --help; carries the text to print.
struct HelpRequested {
    std::string text;
};

/// Parses command-line arguments (program name excluded). A --config file
/// supplies values first and explicit flags override them; the file is a
/// flat key-value format with one [section] per command plus top-level
/// `command` and `out` keys. Unknown keys or invalid values throw
/// std::invalid_argument naming the offending field.
ExperimentConfig parse_config(const std::vector<std::string>& args);

/// Dispatches a validated config, writing artifacts under config.out_dir.
/// Returns 0 on success, 3 when a time integration diverged (a reported
/// outcome; artifacts are still written) and 4 when a fixed-point iteration
/// failed to converge.
int run(const ExperimentConfig& config);

/// Parse + dispatch with exit-code mapping: 0 success, 2 validation,
/// 3 divergence, 4 non-convergence.
int cli_main(int argc, const char* const* argv);

} // namespace kinchem
