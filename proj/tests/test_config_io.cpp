#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "qchain/config.hpp"
#include "qchain/csvio.hpp"
#include "qchain/errors.hpp"
#include "qchain/propagator.hpp"

using namespace qchain;

TEST_CASE("paper_fig3 preset parses to the published parameters") {
    const ExperimentConfig cfg = load_config("paper_fig3");
    const ExperimentSpec& spec = cfg.experiment;
    CHECK(spec.model.n_qubits() == 3);
    CHECK(spec.model.is_nearest_neighbor_chain());
    CHECK(spec.model.bond(1, 2).j_perp == 0.5);
    CHECK(spec.model.bond(1, 2).j_par == 0.5);
    CHECK(spec.model.bond(2, 3).j_perp == 0.5);
    CHECK(spec.grid.n_steps == 10000);
    CHECK(std::abs(spec.grid.dt() - 1.5e-4) < 1e-18);
    CHECK(spec.initial_state.size() == 3);
    CHECK_FALSE(cfg.vl.has_value());

    const ExperimentConfig xy = load_config("paper_fig3_xy");
    REQUIRE(xy.vl.has_value());
    CHECK(xy.vl->aux_model.bond(1, 2).j_perp == 1.2);
    CHECK(xy.vl->aux_model.bond(2, 3).j_perp == -1.0);
    CHECK(xy.vl->aux_model.bond(2, 3).j_par == 0.0);
    CHECK(xy.vl->gauge_qubit == 2);
    CHECK(xy.vl->epsilon == 1e-8);
    CHECK(xy.vl->tolerance == 1e-3);
}

TEST_CASE("parse -> serialize -> parse is the identity") {
    const ExperimentConfig cfg = load_config("paper_fig3_xy");
    const std::string text = serialize_config(cfg);
    const ExperimentConfig again = parse_config(text);

    CHECK(serialize_config(again) == text);
    CHECK(config_digest(again) == config_digest(cfg));
    CHECK(again.experiment.model.bonds().size() == cfg.experiment.model.bonds().size());
    CHECK(again.experiment.grid.n_steps == cfg.experiment.grid.n_steps);
    CHECK(again.vl->tolerance == cfg.vl->tolerance);
    for (int q = 1; q <= 3; ++q)
        for (double t : {0.0, 0.37, 1.2})
            CHECK(again.experiment.schedule.value(q, t) == cfg.experiment.schedule.value(q, t));
}

TEST_CASE("config validation errors") {
    SUBCASE("unknown preset") {
        CHECK_THROWS_AS(parse_config(R"({"model": {"n_qubits": 2, "preset": "ising", "j": 1.0},
            "initial_state": [{"label": "00", "amplitude": 1.0}],
            "grid": {"t_end": 1.0, "n_steps": 10}})"),
                        ValidationError);
    }

    SUBCASE("non-chain pair under open_chain topology") {
        CHECK_THROWS_AS(parse_config(R"({"model": {"n_qubits": 3, "topology": "open_chain",
            "pairs": [{"k": 1, "i": 3, "j_perp": 0.5, "j_par": 0.0}]},
            "initial_state": [{"label": "000", "amplitude": 1.0}],
            "grid": {"t_end": 1.0, "n_steps": 10}})"),
                        ValidationError);
    }

    SUBCASE("zero steps") {
        CHECK_THROWS_AS(parse_config(R"({"model": {"n_qubits": 2, "preset": "heisenberg", "j": 0.5},
            "initial_state": [{"label": "00", "amplitude": 1.0}],
            "grid": {"t_end": 1.0, "n_steps": 0}})"),
                        ValidationError);
    }

    SUBCASE("unknown keys are rejected") {
        CHECK_THROWS_AS(parse_config(R"({"model": {"n_qubits": 2, "preset": "heisenberg", "j": 0.5},
            "initial_state": [{"label": "00", "amplitude": 1.0}],
            "grid": {"t_end": 1.0, "n_steps": 10}, "oops": 1})"),
                        ValidationError);
    }

    SUBCASE("vl with general-graph reference") {
        CHECK_THROWS_AS(parse_config(R"({"model": {"n_qubits": 3, "topology": "general",
            "pairs": [{"k": 1, "i": 2, "j_perp": 0.5, "j_par": 0.5},
                      {"k": 2, "i": 3, "j_perp": 0.5, "j_par": 0.5},
                      {"k": 1, "i": 3, "j_perp": 0.5, "j_par": 0.5}]},
            "initial_state": [{"label": "000", "amplitude": 1.0}],
            "grid": {"t_end": 1.0, "n_steps": 10},
            "vl": {"aux_model": {"n_qubits": 3, "preset": "xy", "j_perp": 1.0}}})"),
                        ValidationError);
    }

    SUBCASE("unnormalized amplitudes are renormalized, not rejected") {
        const ExperimentSpec spec = parse_experiment(
            R"({"model": {"n_qubits": 2, "preset": "heisenberg", "j": 0.5},
                "initial_state": [{"label": "01", "amplitude": 1.0},
                                   {"label": "10", "amplitude": 1.0}],
                "grid": {"t_end": 1.0, "n_steps": 10}})");
        const StateVector psi = build_initial_state(spec);
        CHECK(std::abs(psi.amps[basis_index("01")].real() - 1.0 / std::sqrt(2.0)) < 1e-14);
    }

    SUBCASE("malformed JSON") {
        CHECK_THROWS_AS(parse_config("{not json"), ValidationError);
    }

    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_config("/nonexistent/path.json"), ValidationError);
    }
}

TEST_CASE("trajectory CSV round-trip is exact") {
    const ExperimentSpec spec = parse_experiment(embedded_config("paper_fig3"));
    ExperimentSpec small = spec;
    small.grid.n_steps = 200;
    const Trajectory traj = propagate(small);

    const std::string path = (std::filesystem::temp_directory_path() / "qchain_rt.csv").string();
    write_trajectory_csv(path, traj);
    const Trajectory back = read_trajectory_csv(path);

    CHECK(back.n_qubits == traj.n_qubits);
    CHECK(back.bond_pairs == traj.bond_pairs);
    REQUIRE(back.times.size() == traj.times.size());
    for (std::size_t m = 0; m < traj.times.size(); ++m) CHECK(back.times[m] == traj.times[m]);
    REQUIRE(back.sigma_z.size() == traj.sigma_z.size());
    for (std::size_t i = 0; i < traj.sigma_z.size(); ++i) CHECK(back.sigma_z[i] == traj.sigma_z[i]);
    for (std::size_t i = 0; i < traj.currents.size(); ++i)
        CHECK(back.currents[i] == traj.currents[i]);
    for (std::size_t i = 0; i < traj.kinetics.size(); ++i)
        CHECK(back.kinetics[i] == traj.kinetics[i]);
    for (std::size_t i = 0; i < traj.field_values.size(); ++i)
        CHECK(back.field_values[i] == traj.field_values[i]);
    std::remove(path.c_str());
}

TEST_CASE("byte-identical CSV output across repeated runs") {
    const ExperimentSpec spec = parse_experiment(embedded_config("paper_fig3"));
    ExperimentSpec small = spec;
    small.grid.n_steps = 300;

    const auto tmp = std::filesystem::temp_directory_path();
    const std::string p1 = (tmp / "qchain_det1.csv").string();
    const std::string p2 = (tmp / "qchain_det2.csv").string();
    write_trajectory_csv(p1, propagate(small));
    write_trajectory_csv(p2, propagate(small));

    std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
    const std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    const std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);
    CHECK(s1.size() > 1000);
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("format_double round-trips") {
    for (double v : {0.0, -0.0, 1.5e-4, -1.0 / 3.0, 2.0 / 3.0, 1e300, -7.213e-121}) {
        CHECK(parse_double(format_double(v)) == v);
    }
}
