// Command-line driver: forward simulations, van Leeuwen field construction,
// verification suites and the bundled figure-reproduction preset.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qchain/config.hpp"
#include "qchain/csvio.hpp"
#include "qchain/errors.hpp"
#include "qchain/observables.hpp"
#include "qchain/propagator.hpp"
#include "qchain/verify.hpp"
#include "qchain/version.hpp"
#include "qchain/vlmap.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qchain;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIncompatible = 4;
constexpr int kExitVerifyFailed = 5;

struct CommonOpts {
    std::string config;
    std::string out_dir;
    std::optional<double> dt_override;
    std::optional<int> steps_override;
};

void apply_overrides(ExperimentConfig& cfg, const CommonOpts& opts) {
    GridSpec& grid = cfg.experiment.grid;
    if (opts.steps_override) {
        if (*opts.steps_override < 1) throw ValidationError("--steps-override must be >= 1");
        grid.n_steps = *opts.steps_override;
    }
    if (opts.dt_override) {
        if (!(*opts.dt_override > 0.0)) throw ValidationError("--dt-override must be > 0");
        grid.n_steps = std::max(1, static_cast<int>(std::lround(grid.t_end / *opts.dt_override)));
    }
}

class ManifestWriter {
public:
    ManifestWriter(std::string command, const ExperimentConfig& cfg, const std::string& out_dir)
        : start_(std::chrono::steady_clock::now()), out_dir_(out_dir) {
        manifest_["command"] = std::move(command);
        manifest_["config_digest"] = config_digest(cfg);
        manifest_["grid"] = {{"t_end", cfg.experiment.grid.t_end},
                             {"n_steps", cfg.experiment.grid.n_steps},
                             {"dt", cfg.experiment.grid.dt()}};
        manifest_["version"] = kVersion;
        manifest_["outputs"] = json::array();
    }

    std::string path(const std::string& name) {
        manifest_["outputs"].push_back((fs::path(out_dir_) / name).string());
        return (fs::path(out_dir_) / name).string();
    }

    void finish() {
        const auto elapsed = std::chrono::duration<double>(
            std::chrono::steady_clock::now() - start_);
        manifest_["wall_time_seconds"] = elapsed.count();
        std::ofstream out(fs::path(out_dir_) / "manifest.json");
        out << manifest_.dump(2) << "\n";
    }

private:
    std::chrono::steady_clock::time_point start_;
    std::string out_dir_;
    json manifest_;
};

void ensure_out_dir(const std::string& out_dir) {
    if (out_dir.empty()) throw ValidationError("--out directory is required");
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw ValidationError("cannot create output directory " + out_dir);
}

int cmd_simulate(const CommonOpts& opts) {
    ExperimentConfig cfg = load_config(opts.config);
    apply_overrides(cfg, opts);
    ensure_out_dir(opts.out_dir);

    ManifestWriter manifest("simulate", cfg, opts.out_dir);
    const Trajectory traj = propagate(cfg.experiment);
    write_trajectory_csv(manifest.path("trajectory.csv"), traj);
    manifest.finish();
    return kExitOk;
}

json vl_summary(const VLResult& res, double tolerance) {
    std::vector<int> per_bond(res.aux_trajectory.n_bonds(), 0);
    for (const auto& ev : res.regularization_events) per_bond[ev.bond_index]++;
    return {{"max_sigma_deviation", res.max_sigma_deviation},
            {"max_current_deviation", res.max_current_deviation},
            {"max_kinetic_deviation", res.max_kinetic_deviation},
            {"max_state_coefficient_deviation", res.max_state_deviation},
            {"gauge_qubit", res.gauge_qubit},
            {"tolerance", tolerance},
            {"pass", res.max_sigma_deviation <= tolerance},
            {"regularization_counts", per_bond},
            {"regularization_total", res.regularization_events.size()}};
}

int cmd_vl_map(const CommonOpts& opts, std::optional<double> tol_override) {
    ExperimentConfig cfg = load_config(opts.config);
    if (!cfg.vl) throw ValidationError("config has no 'vl' block; nothing to construct");
    apply_overrides(cfg, opts);
    if (tol_override) cfg.vl->tolerance = *tol_override;
    ensure_out_dir(opts.out_dir);

    ManifestWriter manifest("vl-map", cfg, opts.out_dir);
    const VLResult res = vl_construct(cfg.experiment, *cfg.vl);
    write_trajectory_csv(manifest.path("reference.csv"), res.reference_trajectory);
    write_trajectory_csv(manifest.path("auxiliary.csv"), res.aux_trajectory);
    write_fields_csv(manifest.path("aux_fields.csv"), res.aux_trajectory);
    {
        std::ofstream out(manifest.path("deviation.json"));
        out << vl_summary(res, cfg.vl->tolerance).dump(2) << "\n";
    }
    manifest.finish();

    std::cout << "max_sigma_deviation " << format_double(res.max_sigma_deviation)
              << " (tolerance " << format_double(cfg.vl->tolerance) << "), "
              << res.regularization_events.size() << " regularization events\n";
    return res.max_sigma_deviation <= cfg.vl->tolerance ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// verification suites

ExperimentConfig verify_base_config(const std::string& config) {
    return load_config(config.empty() ? "paper_fig3" : config);
}

std::vector<VerificationReport> run_checks(const std::vector<std::string>& names,
                                           const ExperimentConfig& cfg, std::uint64_t seed) {
    const ExperimentSpec& spec = cfg.experiment;
    std::vector<VerificationReport> reports;
    for (const std::string& name : names) {
        if (name == "continuity") {
            reports.push_back(continuity_residual(propagate(spec), spec.model));
        } else if (name == "conservation") {
            reports.push_back(conservation_drift(propagate(spec)));
        } else if (name == "gauge-invariance") {
            reports.push_back(gauge_invariance_check(spec, GlobalFieldShift{ConstantTerm{0.3}}));
        } else if (name == "rg-probe") {
            const FieldSchedule zero(spec.model.n_qubits());
            reports.push_back(rg_divergence_probe(spec.model, spec.schedule, zero,
                                                  build_initial_state(spec), spec.grid));
        } else if (name == "loop-current") {
            reports.push_back(loop_current_identity());
        } else if (name == "operator-crosscheck") {
            std::mt19937_64 rng(seed);
            std::normal_distribution<double> gauss;
            VerificationReport worst;
            for (int trial = 0; trial < 20; ++trial) {
                StateVector psi(spec.model.n_qubits());
                for (auto& a : psi.amps) a = Complex(gauss(rng), gauss(rng));
                psi.normalize();
                std::vector<double> fields(spec.model.n_qubits(), 0.0);
                VerificationReport rep = operator_crosscheck(psi, spec.model, fields);
                if (trial == 0 || rep.max_residual > worst.max_residual) worst = rep;
            }
            reports.push_back(worst);
        } else {
            throw ValidationError("unknown check '" + name + "'");
        }
    }
    return reports;
}

int cmd_verify(const std::string& config, const std::string& suite, const std::string& check,
               const std::string& out_dir, std::uint64_t seed) {
    std::vector<std::string> names;
    if (!check.empty()) {
        names = {check};
    } else if (suite == "default") {
        names = {"continuity", "conservation", "gauge-invariance", "rg-probe", "loop-current"};
    } else if (suite == "full") {
        names = {"continuity", "conservation", "gauge-invariance", "rg-probe", "loop-current",
                 "operator-crosscheck"};
    } else {
        throw ValidationError("unknown suite '" + suite + "' (use 'default' or 'full')");
    }

    const ExperimentConfig cfg = verify_base_config(config);
    const auto reports = run_checks(names, cfg, seed);

    json out = json::array();
    std::string first_failure;
    for (const auto& r : reports) {
        json rj = {{"check", r.check},
                   {"residual", r.max_residual},
                   {"threshold", r.threshold},
                   {"pass", r.pass},
                   {"location", r.location}};
        if (!r.note.empty()) rj["note"] = r.note;
        if (r.advisory) rj["advisory"] = true;
        out.push_back(rj);
        std::cout << (r.pass ? "PASS " : (r.advisory ? "INFO " : "FAIL ")) << r.check
                  << "  residual " << format_double(r.max_residual) << "  threshold "
                  << format_double(r.threshold)
                  << (r.note.empty() ? "" : ("  [" + r.note + "]")) << "\n";
        if (!r.pass && !r.advisory && first_failure.empty()) first_failure = r.check;
    }
    if (!out_dir.empty()) {
        ensure_out_dir(out_dir);
        std::ofstream f(fs::path(out_dir) / "verify_report.json");
        f << out.dump(2) << "\n";
    }
    if (!first_failure.empty()) {
        std::cerr << "verification failed: " << first_failure << "\n";
        return kExitVerifyFailed;
    }
    return kExitOk;
}

void write_panel(const std::string& path, const Trajectory& traj, bool fields) {
    std::ofstream out(path);
    out << "# t";
    for (int q = 1; q <= traj.n_qubits; ++q)
        out << " " << (fields ? "h_" : "sigma_z_") << q;
    out << "\n";
    for (std::size_t m = 0; m < traj.n_points(); ++m) {
        out << format_double(traj.times[m]);
        for (int q = 1; q <= traj.n_qubits; ++q)
            out << " " << format_double(fields ? traj.field(m, q) : traj.sigma(m, q));
        out << "\n";
    }
}

int cmd_reproduce_paper(const std::string& out_dir) {
    ensure_out_dir(out_dir);
    ExperimentConfig cfg = load_config("paper_fig3_xy");

    ManifestWriter manifest("reproduce-paper", cfg, out_dir);
    const VLResult res = vl_construct(cfg.experiment, *cfg.vl);
    write_trajectory_csv(manifest.path("reference.csv"), res.reference_trajectory);
    write_trajectory_csv(manifest.path("auxiliary.csv"), res.aux_trajectory);
    write_fields_csv(manifest.path("aux_fields.csv"), res.aux_trajectory);
    {
        std::ofstream out(manifest.path("deviation.json"));
        out << vl_summary(res, cfg.vl->tolerance).dump(2) << "\n";
    }
    write_panel(manifest.path("panel_a.dat"), res.reference_trajectory, true);
    write_panel(manifest.path("panel_b.dat"), res.reference_trajectory, false);
    write_panel(manifest.path("panel_c.dat"), res.aux_trajectory, true);
    write_panel(manifest.path("panel_d.dat"), res.aux_trajectory, false);
    manifest.finish();

    std::cout << "panels (a)-(d) written to " << out_dir << "; max_sigma_deviation "
              << format_double(res.max_sigma_deviation) << "\n";
    return res.max_sigma_deviation <= cfg.vl->tolerance ? kExitOk : kExitFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact dynamics and inverse field engineering for 1D qubit chains"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonOpts sim_opts;
    auto* sim = app.add_subcommand("simulate", "Propagate a configuration and write CSV output");
    sim->add_option("--config", sim_opts.config, "Config file path or preset name")->required();
    sim->add_option("--out", sim_opts.out_dir, "Output directory")->required();
    sim->add_option("--dt-override", sim_opts.dt_override, "Override the step size");
    sim->add_option("--steps-override", sim_opts.steps_override, "Override the step count");

    CommonOpts vl_opts;
    std::optional<double> vl_tol;
    auto* vl = app.add_subcommand("vl-map", "Construct auxiliary fields for a vl config");
    vl->add_option("--config", vl_opts.config, "Config file path or preset name")->required();
    vl->add_option("--out", vl_opts.out_dir, "Output directory")->required();
    vl->add_option("--dt-override", vl_opts.dt_override, "Override the step size");
    vl->add_option("--steps-override", vl_opts.steps_override, "Override the step count");
    vl->add_option("--tolerance", vl_tol, "Override the reproduction tolerance");

    std::string ver_config, ver_suite = "default", ver_check, ver_out;
    std::uint64_t ver_seed = 12345;
    auto* ver = app.add_subcommand("verify", "Run verification checks");
    ver->add_option("--config", ver_config, "Config file path or preset name");
    ver->add_option("--suite", ver_suite, "Check suite: default or full");
    ver->add_option("--check", ver_check, "Run a single named check");
    ver->add_option("--out", ver_out, "Directory for the JSON report");
    ver->add_option("--seed", ver_seed, "Seed for randomized checks");

    std::string rep_out;
    auto* rep = app.add_subcommand("reproduce-paper",
                                   "Run the bundled reference + auxiliary construction");
    rep->add_option("--out", rep_out, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(sim_opts);
        if (vl->parsed()) return cmd_vl_map(vl_opts, vl_tol);
        if (ver->parsed()) return cmd_verify(ver_config, ver_suite, ver_check, ver_out, ver_seed);
        if (rep->parsed()) return cmd_reproduce_paper(rep_out);
    } catch (const IncompatibleStateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIncompatible;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitOk;
}
