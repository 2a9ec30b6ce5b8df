#include "kinchem/cli.hpp"

#include <algorithm>
#include <cctype>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "kinchem/errors.hpp"
#include "kinchem/io.hpp"
#include "kinchem/kinetic.hpp"
#include "kinchem/moments.hpp"
#include "kinchem/stationary.hpp"
#include "kinchem/verify.hpp"

namespace kinchem {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::set<std::string> kCommands = {"simulate", "moments", "critical-mass", "stationary",
                                         "verify"};

[[noreturn]] void bad_field(const std::string& field, const std::string& reason) {
    throw std::invalid_argument(field + ": " + reason);
}

double parse_double(const std::string& field, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        bad_field(field, "not a number: '" + text + "'");
    }
}

int parse_int(const std::string& field, const std::string& text) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(text, &used);
        if (used != text.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        bad_field(field, "not an integer: '" + text + "'");
    }
}

bool parse_bool(const std::string& field, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    bad_field(field, "not a boolean: '" + text + "'");
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

/// Flat INI: top-level `command` and `out`, one [section] per command.
std::map<std::string, std::map<std::string, std::string>> read_config_file(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot read '" + path + "'");
    std::map<std::string, std::map<std::string, std::string>> sections;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                bad_field("config", "unterminated section at line " + std::to_string(lineno));
            section = trim(t.substr(1, t.size() - 2));
            if (!kCommands.count(section))
                bad_field("config", "unknown section '" + section + "'");
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            bad_field("config", "expected key = value at line " + std::to_string(lineno));
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) bad_field("config", "empty key at line " + std::to_string(lineno));
        if (!sections[section].emplace(key, value).second)
            bad_field("config", "duplicate key '" + key + "'");
    }
    return sections;
}

void apply_ic_key(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                  bool& known) {
    known = true;
    if (key == "ic-family") cfg.ic_family = value;
    else if (key == "ic-x-center") cfg.initial.x_center = parse_double(key, value);
    else if (key == "ic-v-center") cfg.initial.v_center = parse_double(key, value);
    else if (key == "ic-x-width") cfg.initial.x_width = parse_double(key, value);
    else if (key == "ic-v-width") cfg.initial.v_width = parse_double(key, value);
    else if (key == "ic-separation") cfg.initial.separation = parse_double(key, value);
    else if (key == "ic-file") cfg.initial.path = value;
    else known = false;
}

void apply_grid_key(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                    bool& known) {
    known = true;
    if (key == "L") cfg.space_half_width = parse_double(key, value);
    else if (key == "V") cfg.velocity_half_width = parse_double(key, value);
    else if (key == "n-x") cfg.space_count = parse_int(key, value);
    else if (key == "n-v") cfg.velocity_count = parse_int(key, value);
    else known = false;
}

void apply_file_values(
    ExperimentConfig& cfg,
    const std::map<std::string, std::map<std::string, std::string>>& sections,
    std::string& file_command) {
    for (const auto& [section, entries] : sections) {
        for (const auto& [key, value] : entries) {
            bool known = false;
            if (section.empty()) {
                known = true;
                if (key == "command") {
                    if (!kCommands.count(value)) bad_field("command", "unknown command '" + value + "'");
                    file_command = value;
                } else if (key == "out") {
                    cfg.out_dir = value;
                } else {
                    known = false;
                }
            } else if (section == "simulate") {
                apply_grid_key(cfg, key, value, known);
                if (!known) apply_ic_key(cfg, key, value, known);
                if (!known) {
                    known = true;
                    if (key == "model") cfg.model_name = value;
                    else if (key == "M") cfg.mass = parse_double(key, value);
                    else if (key == "dt") cfg.dt = parse_double(key, value);
                    else if (key == "t-end") cfg.t_end = parse_double(key, value);
                    else if (key == "stride") cfg.output_stride = parse_int(key, value);
                    else if (key == "order") cfg.moment_order = parse_int(key, value);
                    else if (key == "interp") cfg.interpolation = value;
                    else if (key == "center") cfg.center = parse_bool(key, value);
                    else known = false;
                }
            } else if (section == "moments") {
                apply_grid_key(cfg, key, value, known);
                if (!known) apply_ic_key(cfg, key, value, known);
                if (!known) {
                    known = true;
                    if (key == "model") cfg.model_name = value;
                    else if (key == "M") cfg.mass = parse_double(key, value);
                    else if (key == "order") cfg.cascade_order = parse_int(key, value);
                    else if (key == "t-end") cfg.cascade_t_end = parse_double(key, value);
                    else if (key == "sample-dt") cfg.sample_dt = parse_double(key, value);
                    else known = false;
                }
            } else if (section == "critical-mass") {
                known = true;
                if (key == "N-max") cfg.max_order = parse_int(key, value);
                else if (key == "M-max") cfg.mass_limit = parse_double(key, value);
                else if (key == "step") cfg.scan_step = parse_double(key, value);
                else if (key == "tol") cfg.bisection_tol = parse_double(key, value);
                else if (key == "jobs") cfg.jobs = parse_int(key, value);
                else known = false;
            } else if (section == "stationary") {
                apply_grid_key(cfg, key, value, known);
                if (!known) {
                    known = true;
                    if (key == "M") cfg.mass = parse_double(key, value);
                    else if (key == "sweeps") cfg.max_sweeps = parse_int(key, value);
                    else if (key == "tol") cfg.sweep_tol = parse_double(key, value);
                    else if (key == "s-points") cfg.s_points = parse_int(key, value);
                    else if (key == "damping") cfg.damping = parse_double(key, value);
                    else if (key == "spectral") cfg.with_spectral = parse_bool(key, value);
                    else if (key == "xi-max") cfg.xi_max = parse_double(key, value);
                    else if (key == "n-xi") cfg.n_xi = parse_int(key, value);
                    else known = false;
                }
            } else if (section == "verify") {
                known = false; // the command takes no settings
            }
            if (!known) {
                const std::string where = section.empty() ? key : section + "." + key;
                bad_field("config", "unknown key '" + where + "'");
            }
        }
    }
}

std::string prescan_config_path(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) bad_field("config", "missing file argument");
            return args[i + 1];
        }
        if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
    }
    return "";
}

void add_ic_options(CLI::App* sub, ExperimentConfig& cfg) {
    sub->add_option("--ic-family", cfg.ic_family,
                    "initial shape: gaussian-product, exponential-signal, double-bump, file");
    sub->add_option("--ic-x-center", cfg.initial.x_center, "spatial center of the shape");
    sub->add_option("--ic-v-center", cfg.initial.v_center, "velocity center of the shape");
    sub->add_option("--ic-x-width", cfg.initial.x_width, "spatial width");
    sub->add_option("--ic-v-width", cfg.initial.v_width, "velocity width");
    sub->add_option("--ic-separation", cfg.initial.separation, "bump separation (double-bump)");
    sub->add_option("--ic-file", cfg.initial.path, "field snapshot (file family)");
}

void add_grid_options(CLI::App* sub, ExperimentConfig& cfg) {
    sub->add_option("--L", cfg.space_half_width, "spatial half-width");
    sub->add_option("--V", cfg.velocity_half_width, "velocity half-width");
    sub->add_option("--n-x", cfg.space_count, "spatial node count (odd)");
    sub->add_option("--n-v", cfg.velocity_count, "velocity node count (odd)");
}

void validate(ExperimentConfig& cfg) {
    if (cfg.model_name == "A") cfg.model = ModelKind::A;
    else if (cfg.model_name == "B") cfg.model = ModelKind::B;
    else bad_field("model", "must be A or B");

    if (!(cfg.mass > 0.0)) bad_field("M", "must be positive");
    if (cfg.command == CommandKind::Stationary && !(cfg.mass > 2.0))
        bad_field("M", "the stationary profile exists only above the critical mass 2");

    if (!(cfg.space_half_width > 0.0)) bad_field("L", "must be positive");
    if (!(cfg.velocity_half_width > 0.0)) bad_field("V", "must be positive");
    if (cfg.space_count < 5 || cfg.space_count % 2 == 0)
        bad_field("n-x", "must be odd and at least 5");
    if (cfg.velocity_count < 5 || cfg.velocity_count % 2 == 0)
        bad_field("n-v", "must be odd and at least 5");

    if (!(cfg.dt > 0.0)) bad_field("dt", "must be positive");
    if (!(cfg.t_end > 0.0)) bad_field("t-end", "must be positive");
    if (cfg.output_stride < 1) bad_field("stride", "must be at least 1");
    if (cfg.moment_order < 2 || cfg.moment_order > 8)
        bad_field("order", "recorded moment order must lie in [2, 8]");
    if (cfg.interpolation != "linear" && cfg.interpolation != "cubic")
        bad_field("interp", "must be linear or cubic");

    if (cfg.command == CommandKind::Moments) {
        if (cfg.model == ModelKind::B && cfg.cascade_order != 2)
            bad_field("order", "the velocity-change model closes only at order 2");
        if (cfg.cascade_order < 2 || cfg.cascade_order > 12)
            bad_field("order", "cascade order must lie in [2, 12]");
        if (!(cfg.cascade_t_end > 0.0)) bad_field("t-end", "must be positive");
        if (!(cfg.sample_dt > 0.0)) bad_field("sample-dt", "must be positive");
    }

    if (cfg.max_order < 2 || cfg.max_order > 24) bad_field("N-max", "must lie in [2, 24]");
    if (!(cfg.mass_limit > 0.0)) bad_field("M-max", "must be positive");
    if (!(cfg.scan_step > 0.0)) bad_field("step", "must be positive");
    if (!(cfg.bisection_tol > 0.0)) bad_field("tol", "must be positive");
    if (cfg.jobs < 1) bad_field("jobs", "must be at least 1");

    if (cfg.max_sweeps < 1) bad_field("sweeps", "must be at least 1");
    if (!(cfg.sweep_tol > 0.0)) bad_field("tol", "must be positive");
    if (cfg.s_points != 16 && cfg.s_points != 32 && cfg.s_points != 64 && cfg.s_points != 128)
        bad_field("s-points", "supported rule sizes: 16, 32, 64, 128");
    if (!(cfg.damping > 0.0 && cfg.damping <= 1.0)) bad_field("damping", "must lie in (0, 1]");
    if (!(cfg.xi_max > 0.0)) bad_field("xi-max", "must be positive");
    if (cfg.n_xi < 9) bad_field("n-xi", "must be at least 9");

    if (cfg.ic_family == "gaussian-product") cfg.initial.family = InitialFamily::GaussianProduct;
    else if (cfg.ic_family == "exponential-signal")
        cfg.initial.family = InitialFamily::ExponentialSignal;
    else if (cfg.ic_family == "double-bump") cfg.initial.family = InitialFamily::DoubleBump;
    else if (cfg.ic_family == "file") cfg.initial.family = InitialFamily::File;
    else bad_field("ic-family", "unknown family '" + cfg.ic_family + "'");
    if (cfg.initial.family == InitialFamily::File && cfg.initial.path.empty())
        bad_field("ic-file", "required for the file family");
    if (!(cfg.initial.x_width > 0.0)) bad_field("ic-x-width", "must be positive");
    if (!(cfg.initial.v_width > 0.0)) bad_field("ic-v-width", "must be positive");
    if (cfg.initial.separation < 0.0) bad_field("ic-separation", "must be nonnegative");
    cfg.initial.mass = cfg.mass;

    if (cfg.out_dir.empty()) bad_field("out", "must not be empty");
}

// ---------------------------------------------------------------- dispatch

std::vector<std::string> moment_columns(int order) {
    std::vector<std::string> cols;
    for (int d = 2; d <= order; ++d)
        for (int n = 0; n <= d; ++n)
            cols.push_back("A_" + std::to_string(d - n) + "_" + std::to_string(n));
    cols.push_back("mass");
    return cols;
}

std::vector<double> moment_row(const MomentTable& table, int order, double mass) {
    std::vector<double> row;
    for (int d = 2; d <= order; ++d)
        for (int n = 0; n <= d; ++n) row.push_back(table.at(d - n, n));
    row.push_back(mass);
    return row;
}

json grids_json(const ExperimentConfig& cfg) {
    return {{"L", cfg.space_half_width},
            {"V", cfg.velocity_half_width},
            {"n_x", cfg.space_count},
            {"n_v", cfg.velocity_count}};
}

json initial_json(const ExperimentConfig& cfg) {
    json j{{"family", cfg.ic_family},
           {"x_center", cfg.initial.x_center},
           {"v_center", cfg.initial.v_center},
           {"x_width", cfg.initial.x_width},
           {"v_width", cfg.initial.v_width}};
    if (cfg.initial.family == InitialFamily::DoubleBump) j["separation"] = cfg.initial.separation;
    if (cfg.initial.family == InitialFamily::File) j["file"] = cfg.initial.path;
    return j;
}

json eigenvalues_json(std::vector<std::complex<double>> values) {
    std::sort(values.begin(), values.end(), [](const auto& a, const auto& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    json arr = json::array();
    for (const auto& z : values) arr.push_back({z.real(), z.imag()});
    return arr;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << j.dump(2) << "\n";
}

int run_simulate(const ExperimentConfig& cfg, const fs::path& out) {
    const auto [xg, vg] = make_grids(cfg.space_half_width, cfg.space_count,
                                     cfg.velocity_half_width, cfg.velocity_count);
    PhaseField f0 = build_initial(cfg.initial, xg, vg);
    json extra;
    if (cfg.center) {
        CenterFrameResult centered = center_frame(f0);
        f0 = std::move(centered.field);
        extra["frame_shift"] = centered.shift;
        extra["momentum_residual"] = centered.momentum_residual;
    }

    SimulationConfig sim;
    sim.model = cfg.model;
    sim.dt = cfg.dt;
    sim.t_end = cfg.t_end;
    sim.output_stride = cfg.output_stride;
    sim.moment_order = cfg.moment_order;
    sim.transport_interpolation = cfg.interpolation == "linear" ? InterpolationKind::Linear
                                                                : InterpolationKind::Cubic;
    const Trajectory tr = simulate(sim, f0);

    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < tr.times.size(); ++k)
        rows.push_back(moment_row(tr.moments[k], cfg.moment_order, tr.masses[k]));
    write_series_csv((out / "moments.csv").string(), moment_columns(cfg.moment_order), tr.times,
                     rows);
    write_field((out / "final_state.csv").string(), tr.final_state);

    json meta{{"command", "simulate"},
              {"model", cfg.model_name},
              {"M", cfg.mass},
              {"grids", grids_json(cfg)},
              {"dt", cfg.dt},
              {"t_end", cfg.t_end},
              {"stride", cfg.output_stride},
              {"order", cfg.moment_order},
              {"interp", cfg.interpolation},
              {"initial", initial_json(cfg)},
              {"results",
               {{"samples", tr.times.size()},
                {"mass_drift", tr.max_mass_drift},
                {"boundary_outflow", tr.boundary_outflow},
                {"min_value", tr.min_value},
                {"diverged", tr.diverged},
                {"divergence_time", tr.divergence_time}}}};
    if (!extra.is_null()) meta["results"].update(extra);
    write_json(out / "metadata.json", meta);
    return tr.diverged ? 3 : 0;
}

int run_moments(const ExperimentConfig& cfg, const fs::path& out) {
    const auto [xg, vg] = make_grids(cfg.space_half_width, cfg.space_count,
                                     cfg.velocity_half_width, cfg.velocity_count);
    const PhaseField f0 = build_initial(cfg.initial, xg, vg);

    if (cfg.model == ModelKind::B) {
        const std::array<double, 3> init{f0.moment(2, 0), f0.moment(1, 1), f0.moment(0, 2)};
        const ModelBResult res =
            model_b_order2(cfg.mass, init, cfg.cascade_t_end, 1e6, cfg.sample_dt);
        std::vector<std::vector<double>> rows;
        for (const auto& s : res.states)
            rows.push_back({s[0], s[1], s[2], s[0] * s[2] - s[1] * s[1], cfg.mass});
        write_series_csv((out / "cascade.csv").string(),
                         {"A_2_0", "A_1_1", "A_0_2", "D", "mass"}, res.times, rows);
        write_json(out / "stability.json",
                   {{"command", "moments"},
                    {"model", "B"},
                    {"M", cfg.mass},
                    {"order", 2},
                    {"jacobian_eigenvalues", eigenvalues_json(res.jacobian_eigenvalues)},
                    {"steady_state", res.steady_state},
                    {"identity_error", res.max_identity_error},
                    {"reached_threshold", res.reached_threshold},
                    {"threshold_time", res.threshold_time},
                    {"growth_threshold", res.growth_threshold},
                    {"initial", initial_json(cfg)}});
        return res.reached_threshold ? 3 : 0;
    }

    const MomentTable initial = compute_moments(f0, cfg.cascade_order);
    CascadeOptions opts;
    opts.t_end = cfg.cascade_t_end;
    opts.sample_dt = cfg.sample_dt;
    const CascadeResult res = integrate_cascade(initial, opts);

    std::vector<std::vector<double>> rows;
    for (const auto& table : res.states)
        rows.push_back(moment_row(table, cfg.cascade_order, table.mass()));
    write_series_csv((out / "cascade.csv").string(), moment_columns(cfg.cascade_order),
                     res.times, rows);

    const StabilityReport report = stability(cfg.cascade_order, cfg.mass);
    json stab{{"command", "moments"},
              {"model", "A"},
              {"M", cfg.mass},
              {"order", cfg.cascade_order},
              {"eigenvalues", eigenvalues_json(report.eigenvalues)},
              {"max_real_part", report.max_real_part},
              {"verdict", report.verdict == StabilityVerdict::Stable     ? "stable"
                          : report.verdict == StabilityVerdict::Unstable ? "unstable"
                                                                         : "marginal"},
              {"char_poly_ascending", char_poly_coefficients(cfg.cascade_order, cfg.mass)},
              {"diverged", res.diverged},
              {"divergence_time", res.divergence_time},
              {"initial", initial_json(cfg)}};
    if (report.hurwitz_stable) stab["hurwitz_stable"] = *report.hurwitz_stable;
    try {
        stab["equilibrium"] = cascade_equilibrium(cfg.cascade_order, cfg.mass).flatten();
    } catch (const std::exception&) {
        // below the relevant critical mass there is nothing to report
    }
    write_json(out / "stability.json", stab);
    return res.diverged ? 3 : 0;
}

int run_critical_mass(const ExperimentConfig& cfg, const fs::path& out) {
    const int count = cfg.max_order - 1;
    std::vector<CriticalMassScan> scans(count);
    const int jobs = std::min(cfg.jobs, count);
    std::vector<std::thread> workers;
    for (int t = 0; t < jobs; ++t)
        workers.emplace_back([&, t]() {
            for (int idx = t; idx < count; idx += jobs)
                scans[idx] = critical_mass_scan(idx + 2, cfg.mass_limit, cfg.scan_step,
                                                cfg.bisection_tol);
        });
    for (auto& w : workers) w.join();

    std::vector<double> orders, thresholds;
    json roots = json::array();
    for (const auto& scan : scans) {
        roots.push_back({{"order", scan.order}, {"roots", scan.roots}});
        if (!scan.roots.empty()) {
            orders.push_back(scan.order);
            // stability sets in above the largest root
            thresholds.push_back(scan.roots.back());
        }
    }
    write_table_csv((out / "critical_mass.csv").string(), "N", "M_N", orders, thresholds);
    write_json(out / "metadata.json", {{"command", "critical-mass"},
                                       {"N_max", cfg.max_order},
                                       {"M_max", cfg.mass_limit},
                                       {"step", cfg.scan_step},
                                       {"tol", cfg.bisection_tol},
                                       {"scans", roots}});
    return 0;
}

int run_stationary(const ExperimentConfig& cfg, const fs::path& out) {
    const auto [xg, vg] = make_grids(cfg.space_half_width, cfg.space_count,
                                     cfg.velocity_half_width, cfg.velocity_count);
    StationaryOptions opts;
    opts.max_sweeps = cfg.max_sweeps;
    opts.tol = cfg.sweep_tol;
    opts.damping = cfg.damping;
    opts.s_points = cfg.s_points;
    const StationaryResult res = solve_stationary(cfg.mass, xg, vg, opts);
    write_profile((out / "rho.csv").string(), res.rho);
    write_field((out / "f.csv").string(), res.f);

    const RegularityReport reg = regularity_diagnostic(res);
    const LargeMassReport lim = large_mass_comparison(res);
    json diag{{"command", "stationary"},
              {"M", cfg.mass},
              {"grids", grids_json(cfg)},
              {"sweeps_allowed", cfg.max_sweeps},
              {"tol", cfg.sweep_tol},
              {"s_points", cfg.s_points},
              {"damping", cfg.damping},
              {"converged", res.converged},
              {"sweeps", res.sweeps},
              {"last_update", res.last_update},
              {"max_mass_defect", res.max_mass_defect},
              {"max_velocity_weighted", res.max_velocity_weighted},
              {"moments",
               {{"A_2_0", res.moments.at(2, 0)},
                {"A_1_1", res.moments.at(1, 1)},
                {"A_0_2", res.moments.at(0, 2)}}},
              {"residual_l1", res.residual_l1},
              {"confinement", res.confinement},
              {"regularity",
               {{"fitted_exponent", reg.fitted_exponent},
                {"fitted_n", reg.fitted_n},
                {"bound_constants", reg.bound_constants},
                {"asymmetry", reg.asymmetry}}},
              {"large_mass",
               {{"marginal_l1", lim.marginal_l1},
                {"rescaled_A_2_0", lim.rescaled_a20},
                {"rescaled_A_0_2", lim.rescaled_a02},
                {"A_2_0_target", lim.a20_target},
                {"A_0_2_target", lim.a02_target}}}};

    int code = res.converged ? 0 : 4;
    if (cfg.with_spectral) {
        SpectralOptions sopts;
        sopts.s_points = cfg.s_points;
        const SpectralResult spec =
            solve_stationary_spectral(cfg.mass, cfg.xi_max, cfg.n_xi, xg, sopts);
        write_profile((out / "rho_spectral.csv").string(), spec.rho);
        diag["spectral"] = {{"xi_max", cfg.xi_max},
                            {"n_xi", cfg.n_xi},
                            {"converged", spec.converged},
                            {"sweeps", spec.sweeps},
                            {"last_update", spec.last_update},
                            {"min_reconstructed", spec.min_reconstructed},
                            {"l1_gap", res.rho.l1_distance(spec.rho)}};
        if (!spec.converged) code = 4;
    }
    write_json(out / "diagnostics.json", diag);
    return code;
}

} // namespace

ExperimentConfig parse_config(const std::vector<std::string>& args) {
    ExperimentConfig cfg;
    std::string file_command;
    const std::string config_path = prescan_config_path(args);
    if (!config_path.empty())
        apply_file_values(cfg, read_config_file(config_path), file_command);

    CLI::App app{"Numerical laboratory for a one-dimensional kinetic chemotaxis model"};
    app.require_subcommand(0, 1);
    std::string config_dummy;
    app.add_option("--config", config_dummy, "key-value settings file; flags override it");
    app.add_option("--out", cfg.out_dir, "output directory");

    CLI::App* sim = app.add_subcommand("simulate", "integrate the kinetic equation");
    sim->add_option("--model", cfg.model_name, "collision model, A or B");
    sim->add_option("--M", cfg.mass, "total mass");
    add_grid_options(sim, cfg);
    sim->add_option("--dt", cfg.dt, "time step");
    sim->add_option("--t-end", cfg.t_end, "final time");
    sim->add_option("--stride", cfg.output_stride, "record every this many steps");
    sim->add_option("--order", cfg.moment_order, "highest recorded moment order");
    sim->add_option("--interp", cfg.interpolation, "transport sampling: linear or cubic");
    sim->add_flag("--center", cfg.center, "translate to the frame with vanishing drift");
    add_ic_options(sim, cfg);

    CLI::App* mom = app.add_subcommand("moments", "integrate the closed moment system");
    mom->add_option("--model", cfg.model_name, "collision model, A or B");
    mom->add_option("--M", cfg.mass, "total mass");
    mom->add_option("--order", cfg.cascade_order, "cascade truncation order");
    mom->add_option("--t-end", cfg.cascade_t_end, "final time");
    mom->add_option("--sample-dt", cfg.sample_dt, "output sampling step");
    add_grid_options(mom, cfg);
    add_ic_options(mom, cfg);

    CLI::App* crit = app.add_subcommand("critical-mass", "tabulate stability thresholds");
    crit->add_option("--N-max", cfg.max_order, "largest moment order");
    crit->add_option("--M-max", cfg.mass_limit, "scan upper bound");
    crit->add_option("--step", cfg.scan_step, "scan step");
    crit->add_option("--tol", cfg.bisection_tol, "bisection width");
    crit->add_option("--jobs", cfg.jobs, "parallel workers across orders");

    CLI::App* stat = app.add_subcommand("stationary", "solve for the aggregated profile");
    stat->add_option("--M", cfg.mass, "total mass");
    add_grid_options(stat, cfg);
    stat->add_option("--sweeps", cfg.max_sweeps, "fixed-point sweep budget");
    stat->add_option("--tol", cfg.sweep_tol, "update threshold, scaled by M");
    stat->add_option("--s-points", cfg.s_points, "quadrature points along characteristics");
    stat->add_option("--damping", cfg.damping, "mixing weight on the new iterate");
    stat->add_flag("--spectral", cfg.with_spectral, "also solve the transformed fixed point");
    stat->add_option("--xi-max", cfg.xi_max, "transform band half-width");
    stat->add_option("--n-xi", cfg.n_xi, "transform band nodes");

    app.add_subcommand("verify", "run the invariant suite");

    for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        throw HelpRequested{app.help()};
    } catch (const CLI::ParseError& e) {
        throw std::invalid_argument(e.what());
    }

    std::string chosen = file_command;
    for (const std::string& name : kCommands)
        if (app.got_subcommand(name)) chosen = name;
    if (chosen.empty())
        bad_field("command", "choose one of simulate, moments, critical-mass, stationary, verify");
    if (chosen == "simulate") cfg.command = CommandKind::Simulate;
    else if (chosen == "moments") cfg.command = CommandKind::Moments;
    else if (chosen == "critical-mass") cfg.command = CommandKind::CriticalMass;
    else if (chosen == "stationary") cfg.command = CommandKind::Stationary;
    else cfg.command = CommandKind::Verify;

    validate(cfg);
    return cfg;
}

int run(const ExperimentConfig& cfg) {
    if (cfg.command == CommandKind::Verify)
        return print_invariant_suite(run_invariant_suite()) ? 0 : 1;

    const fs::path out(cfg.out_dir);
    fs::create_directories(out);
    switch (cfg.command) {
        case CommandKind::Simulate: return run_simulate(cfg, out);
        case CommandKind::Moments: return run_moments(cfg, out);
        case CommandKind::CriticalMass: return run_critical_mass(cfg, out);
        case CommandKind::Stationary: return run_stationary(cfg, out);
        default: return 0;
    }
}

int cli_main(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    ExperimentConfig cfg;
    try {
        cfg = parse_config(args);
    } catch (const HelpRequested& help) {
        std::fputs(help.text.c_str(), stdout);
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    try {
        return run(cfg);
    } catch (const NumericalDivergence& e) {
        std::fprintf(stderr, "diverged: %s\n", e.what());
        return 3;
    } catch (const CriticalMassNotExceeded& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

} // namespace kinchem
