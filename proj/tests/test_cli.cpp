#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kinchem/cli.hpp"
#include "kinchem/io.hpp"

using namespace kinchem;
namespace fs = std::filesystem;

namespace {

int call(std::vector<std::string> words) {
    words.insert(words.begin(), "kinchem");
    std::vector<const char*> argv;
    for (const auto& w : words) argv.push_back(w.c_str());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("kinchem_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void expect_field_error(const std::vector<std::string>& args, const std::string& field) {
    try {
        parse_config(args);
        FAIL("expected rejection of ", field);
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).rfind(field + ":", 0) == 0);
    }
}

} // namespace

TEST_CASE("defaults survive an empty simulate command line") {
    const ExperimentConfig cfg = parse_config({"simulate"});
    CHECK(cfg.command == CommandKind::Simulate);
    CHECK(cfg.model == ModelKind::A);
    CHECK(cfg.mass == 4.0);
    CHECK(cfg.space_half_width == 20.0);
    CHECK(cfg.velocity_half_width == 20.0);
    CHECK(cfg.space_count == 257);
    CHECK(cfg.velocity_count == 257);
    CHECK(cfg.dt == 0.01);
    CHECK(cfg.t_end == 5.0);
    CHECK(cfg.output_stride == 10);
    CHECK(cfg.moment_order == 3);
    CHECK(cfg.interpolation == "cubic");
    CHECK(cfg.ic_family == "gaussian-product");
    CHECK(cfg.initial.mass == cfg.mass);
    CHECK(cfg.out_dir == "out");
}

TEST_CASE("validation failures name the offending field") {
    expect_field_error({"simulate", "--M", "-1"}, "M");
    expect_field_error({"stationary", "--M", "2"}, "M");
    expect_field_error({"simulate", "--n-x", "512"}, "n-x");
    expect_field_error({"simulate", "--n-v", "3"}, "n-v");
    expect_field_error({"simulate", "--dt", "0"}, "dt");
    expect_field_error({"simulate", "--order", "9"}, "order");
    expect_field_error({"simulate", "--interp", "quintic"}, "interp");
    expect_field_error({"simulate", "--model", "C"}, "model");
    expect_field_error({"moments", "--model", "B", "--order", "3"}, "order");
    expect_field_error({"stationary", "--s-points", "48"}, "s-points");
    expect_field_error({"stationary", "--damping", "1.5"}, "damping");
    expect_field_error({"critical-mass", "--jobs", "0"}, "jobs");
    expect_field_error({"simulate", "--ic-family", "blob"}, "ic-family");
    expect_field_error({"simulate", "--ic-family", "file"}, "ic-file");
    CHECK_THROWS_AS(parse_config({}), std::invalid_argument);
    CHECK_THROWS_AS(parse_config({"simulate", "--no-such-flag"}), std::invalid_argument);
}

TEST_CASE("help is a successful outcome") {
    CHECK_THROWS_AS(parse_config({"--help"}), HelpRequested);
    try {
        parse_config({"--help"});
    } catch (const HelpRequested& h) {
        CHECK(h.text.find("simulate") != std::string::npos);
        CHECK(h.text.find("stationary") != std::string::npos);
    }
    CHECK(call({"--help"}) == 0);
}

TEST_CASE("config files feed values and flags override them") {
    const fs::path dir = fresh_dir("config");
    const fs::path file = dir / "run.ini";
    {
        std::ofstream out(file);
        out << "# experiment settings\n"
            << "command = stationary\n"
            << "out = " << (dir / "artifacts").string() << "\n"
            << "[stationary]\n"
            << "M = 3\n"
            << "n-x = 129\n"
            << "sweeps = 250\n"
            << "spectral = no\n";
    }

    const ExperimentConfig cfg = parse_config({"--config", file.string()});
    CHECK(cfg.command == CommandKind::Stationary);
    CHECK(cfg.mass == 3.0);
    CHECK(cfg.space_count == 129);
    CHECK(cfg.max_sweeps == 250);
    CHECK(cfg.with_spectral == false);
    CHECK(cfg.out_dir == (dir / "artifacts").string());

    // explicit flags win over the file
    const ExperimentConfig onto =
        parse_config({"--config", file.string(), "stationary", "--M", "5", "--sweeps", "9"});
    CHECK(onto.mass == 5.0);
    CHECK(onto.max_sweeps == 9);
    CHECK(onto.space_count == 129);

    const auto write_bad = [&](const std::string& body) {
        const fs::path bad = dir / "bad.ini";
        std::ofstream out(bad);
        out << body;
        out.close();
        return bad.string();
    };
    CHECK_THROWS_AS(parse_config({"--config", write_bad("[stationary]\nwidgets = 3\n")}),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config({"--config", write_bad("[stationary]\nM = 4\nM = 5\n")}),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config({"--config", write_bad("[warp]\nM = 4\n")}),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config({"--config", write_bad("[stationary\nM = 4\n")}),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config({"--config", write_bad("M 4\n")}), std::invalid_argument);
    CHECK_THROWS_AS(parse_config({"--config", write_bad("command = destroy\n")}),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config({"--config", (dir / "absent.ini").string()}),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config({"--config"}), std::invalid_argument);
    fs::remove_all(dir);
}

TEST_CASE("simulate runs are reproducible byte for byte") {
    const fs::path d1 = fresh_dir("sim1"), d2 = fresh_dir("sim2");
    const std::vector<std::string> base = {"simulate", "--M",   "4",    "--L",     "6",
                                           "--V",      "6",     "--n-x", "33",     "--n-v",
                                           "33",       "--dt",  "0.05", "--t-end", "0.2",
                                           "--stride", "2"};

    auto with_out = [&](const fs::path& d) {
        std::vector<std::string> args = base;
        args.push_back("--out");
        args.push_back(d.string());
        return args;
    };
    REQUIRE(call(with_out(d1)) == 0);
    REQUIRE(call(with_out(d2)) == 0);

    for (const char* name : {"moments.csv", "final_state.csv"}) {
        CHECK(fs::exists(d1 / name));
        CHECK(slurp(d1 / name) == slurp(d2 / name));
    }

    const SeriesData series = read_series_csv((d1 / "moments.csv").string());
    REQUIRE(series.columns.size() == 8); // A_2_0..A_0_3 and mass
    CHECK(series.columns.front() == "A_2_0");
    CHECK(series.columns.back() == "mass");
    REQUIRE(series.times.size() == 3); // t = 0, 0.1, 0.2
    CHECK(series.times.back() == 0.2);
    // the transport mass fixer keeps the total exact even on this coarse grid
    for (const auto& row : series.rows)
        CHECK(row.back() == doctest::Approx(4.0).epsilon(1e-9));

    const PhaseField final_state = read_field((d1 / "final_state.csv").string());
    CHECK(final_state.nx() == 33);
    CHECK(final_state.nv() == 33);
    CHECK(final_state.mass() == doctest::Approx(4.0).epsilon(1e-6));

    const std::string meta = slurp(d1 / "metadata.json");
    CHECK(meta.find("\"command\": \"simulate\"") != std::string::npos);
    CHECK(meta.find("\"diverged\": false") != std::string::npos);
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("critical mass artifacts do not depend on the worker count") {
    const fs::path d1 = fresh_dir("crit1"), d4 = fresh_dir("crit4");
    const std::vector<std::string> base = {"critical-mass", "--N-max", "5", "--M-max", "6",
                                           "--step", "0.05", "--tol", "1e-10"};
    auto with = [&](const fs::path& d, const char* jobs) {
        std::vector<std::string> args = base;
        args.insert(args.end(), {"--jobs", jobs, "--out", d.string()});
        return args;
    };
    REQUIRE(call(with(d1, "1")) == 0);
    REQUIRE(call(with(d4, "4")) == 0);
    CHECK(slurp(d1 / "critical_mass.csv") == slurp(d4 / "critical_mass.csv"));

    const TableData table = read_table_csv((d1 / "critical_mass.csv").string());
    CHECK(table.col_a == "N");
    CHECK(table.col_b == "M_N");
    REQUIRE(table.a.size() == 4); // orders 2..5
    // orders 2 and 3 share the threshold 2; above that the ladder climbs
    const double expected[] = {2.0, 2.0, 2.51274532661833, 2.78529356340528};
    for (std::size_t i = 0; i < table.b.size(); ++i)
        CHECK(table.b[i] == doctest::Approx(expected[i]).epsilon(1e-8));
    fs::remove_all(d1);
    fs::remove_all(d4);
}

TEST_CASE("stationary command writes the diagnostics bundle") {
    const fs::path dir = fresh_dir("stat");
    REQUIRE(call({"stationary", "--M", "4", "--L", "12", "--n-x", "129", "--V", "12", "--n-v",
                  "65", "--out", dir.string()}) == 0);
    CHECK(read_profile((dir / "rho.csv").string()).mass() == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(read_field((dir / "f.csv").string()).nx() == 129);
    const std::string diag = slurp(dir / "diagnostics.json");
    CHECK(diag.find("\"converged\": true") != std::string::npos);
    CHECK(diag.find("\"residual_l1\"") != std::string::npos);
    CHECK(diag.find("\"large_mass\"") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("exit codes separate the failure modes") {
    // 2: rejected before any work happens
    CHECK(call({"stationary", "--M", "1.5"}) == 2);
    CHECK(call({"simulate", "--n-x", "4"}) == 2);

    // 3: the moment cascade reports runaway growth
    const fs::path d3 = fresh_dir("exit3");
    CHECK(call({"moments", "--model", "B", "--M", "4", "--t-end", "30", "--out",
                d3.string()}) == 3);
    const std::string stab = slurp(d3 / "stability.json");
    CHECK(stab.find("\"reached_threshold\": true") != std::string::npos);
    fs::remove_all(d3);

    const fs::path d3a = fresh_dir("exit3a");
    CHECK(call({"moments", "--M", "1", "--t-end", "60", "--L", "10", "--V", "10", "--n-x",
                "65", "--n-v", "65", "--out", d3a.string()}) == 3);
    CHECK(slurp(d3a / "stability.json").find("\"verdict\": \"unstable\"") != std::string::npos);
    fs::remove_all(d3a);

    // 4: the sweep budget runs out before the update threshold is met
    const fs::path d4 = fresh_dir("exit4");
    CHECK(call({"stationary", "--M", "4", "--L", "12", "--n-x", "129", "--V", "12", "--n-v",
                "65", "--sweeps", "2", "--out", d4.string()}) == 4);
    CHECK(slurp(d4 / "diagnostics.json").find("\"converged\": false") != std::string::npos);
    fs::remove_all(d4);
}

TEST_CASE("the invariant suite is wired into the executable") {
    CHECK(call({"verify"}) == 0);
}
