#include <doctest.h>

#include <cmath>

#include "dense_oracle.hpp"
#include "qchain/errors.hpp"
#include "qchain/observables.hpp"
#include "qchain/propagator.hpp"
#include "qchain/spinops.hpp"
#include "qchain/verify.hpp"

using namespace qchain;

namespace {

ExperimentSpec fig3_spec(int n_steps) {
    ExperimentSpec spec{ChainModel::heisenberg_chain(3, 0.5), FieldSchedule(3),
                        {{"011", 1.0 / std::sqrt(3.0)},
                         {"101", 1.0 / std::sqrt(3.0)},
                         {"110", 1.0 / std::sqrt(3.0)}},
                        GridSpec{1.5, n_steps}, RecordFlags{}};
    spec.schedule.add_term(1, SineSumTerm{0.6, {1, -1, 1, -1}, {1, 3, 5, 7}});
    spec.schedule.add_term(3, SineSumTerm{0.6, {1, 1, 1, 1}, {2, 4, 6, 8}});
    return spec;
}

} // namespace

TEST_CASE("continuity residual") {
    SUBCASE("frozen state gives zero residual") {
        ExperimentSpec spec{ChainModel::heisenberg_chain(3, 0.5), FieldSchedule(3),
                            {{"000", 1.0}}, GridSpec{1.0, 100}, RecordFlags{}};
        const auto rep = continuity_residual(propagate(spec), spec.model);
        CHECK(rep.pass);
        CHECK(rep.max_residual <= 1e-9);
    }

    SUBCASE("paper trajectory passes at 100 dt^2") {
        const ExperimentSpec spec = fig3_spec(10000);
        const auto rep = continuity_residual(propagate(spec), spec.model);
        CHECK(rep.pass);
        CHECK(rep.threshold == doctest::Approx(100.0 * 1.5e-4 * 1.5e-4));
        CHECK(rep.max_residual < rep.threshold);
        CHECK(rep.max_residual > 0.0);
    }

    SUBCASE("zeroed currents are caught") {
        const ExperimentSpec spec = fig3_spec(2000);
        Trajectory traj = propagate(spec);
        std::fill(traj.currents.begin(), traj.currents.end(), 0.0);
        const auto rep = continuity_residual(traj, spec.model);
        CHECK_FALSE(rep.pass);
        CHECK(rep.max_residual > 0.1);
    }

    SUBCASE("missing records error") {
        ExperimentSpec spec = fig3_spec(100);
        spec.record.currents = false;
        Trajectory traj = propagate(spec);
        CHECK_THROWS_AS(continuity_residual(traj, spec.model), ValidationError);
    }
}

TEST_CASE("conservation drift") {
    SUBCASE("propagated trajectory passes") {
        const auto rep = conservation_drift(propagate(fig3_spec(10000)));
        CHECK(rep.pass);
        CHECK(rep.max_residual <= 1e-9);
        CHECK(rep.note.find("norm drift") != std::string::npos);
    }

    SUBCASE("injected bit-flip error fails") {
        Trajectory traj = propagate(fig3_spec(500));
        traj.sigma_z[traj.n_qubits * 100 + 1] += 0.05;
        const auto rep = conservation_drift(traj);
        CHECK_FALSE(rep.pass);
    }

    SUBCASE("frozen state drift stays at integrator roundoff") {
        ExperimentSpec spec{ChainModel::heisenberg_chain(2, 0.5), FieldSchedule(2),
                            {{"00", 1.0}}, GridSpec{1.0, 50}, RecordFlags{}};
        const auto rep = conservation_drift(propagate(spec));
        CHECK(rep.max_residual <= 1e-10);
        CHECK(rep.pass);
    }
}

TEST_CASE("gauge invariance") {
    SUBCASE("constant global shift changes nothing observable") {
        const auto rep = gauge_invariance_check(fig3_spec(2000), GlobalFieldShift{ConstantTerm{0.3}});
        CHECK(rep.pass);
        CHECK(rep.max_residual <= 1e-9);
    }

    SUBCASE("zero shift is bit-identical") {
        const auto rep = gauge_invariance_check(fig3_spec(500), GlobalFieldShift{ConstantTerm{0.0}});
        CHECK(rep.max_residual == 0.0);
    }

    SUBCASE("superpositions across excitation sectors are rejected") {
        ExperimentSpec spec{ChainModel::heisenberg_chain(2, 0.5), FieldSchedule(2),
                            {{"00", 1.0 / std::sqrt(2.0)}, {"10", 1.0 / std::sqrt(2.0)}},
                            GridSpec{1.0, 100}, RecordFlags{}};
        CHECK_THROWS_AS(gauge_invariance_check(spec, GlobalFieldShift{ConstantTerm{0.3}}),
                        ValidationError);
    }

    SUBCASE("companion probe: the shift moves sigma_x of a mixed-sector state") {
        // single qubit split across sectors; <sigma_x>(t) = cos(2 C t) under H = C Z
        const ChainModel pair(2, {{1, 2, 0.0, 0.0}}, Topology::OpenChainNearestNeighbor);
        StateVector psi(2);
        psi.amps[basis_index("00")] = 1.0 / std::sqrt(2.0);
        psi.amps[basis_index("10")] = 1.0 / std::sqrt(2.0);

        FieldSchedule none(2);
        FieldSchedule shifted = shifted_schedule(none, GlobalFieldShift{ConstantTerm{0.3}});
        StateVector a = psi, b = psi;
        Rk4Stepper stepper(pair);
        const double dt = 1.5e-3;
        for (int m = 0; m < 1000; ++m) {
            stepper.step(a, none, m * dt, dt);
            stepper.step(b, shifted, m * dt, dt);
        }
        const double sxa = expectation(a, apply_pauli(a, 1, PauliAxis::X)).real();
        const double sxb = expectation(b, apply_pauli(b, 1, PauliAxis::X)).real();
        CHECK(std::abs(sxa - sxb) > 0.1);
        CHECK(std::abs(sxb - std::cos(2.0 * 0.3 * 1.5)) < 1e-6);
    }
}

TEST_CASE("rg divergence probe") {
    const ExperimentSpec spec = fig3_spec(10000);
    const StateVector w = build_initial_state(spec);

    SUBCASE("global constant shift never diverges") {
        const FieldSchedule shifted =
            shifted_schedule(spec.schedule, GlobalFieldShift{ConstantTerm{0.7}});
        const auto rep = rg_divergence_probe(spec.model, spec.schedule, shifted, w,
                                             GridSpec{1.5, 2000});
        CHECK(rep.pass);
        CHECK(rep.max_residual <= 1e-6);
        CHECK(rep.note.find("more than a global shift: no") != std::string::npos);
    }

    SUBCASE("paper pulses against zero fields diverge within the first 5% of the grid") {
        const FieldSchedule zero(3);
        const auto rep = rg_divergence_probe(spec.model, spec.schedule, zero, w, spec.grid);
        CHECK(rep.pass);
        const auto pos = rep.note.find("diverge at t=");
        REQUIRE(pos != std::string::npos);
        const double t_div = std::stod(rep.note.substr(pos + 13));
        CHECK(t_div <= 0.05 * 1.5);
        CHECK(rep.note.find("more than a global shift: yes") != std::string::npos);
    }

    SUBCASE("frozen product state never distinguishes the schedules") {
        StateVector zeros(3);
        zeros.amps[0] = 1.0;
        const FieldSchedule zero(3);
        const auto rep =
            rg_divergence_probe(spec.model, spec.schedule, zero, zeros, GridSpec{1.5, 1000});
        CHECK(rep.pass);
        CHECK(rep.max_residual <= 1e-12);
        CHECK(rep.note.find("not distinguished") != std::string::npos);
        // the probe reports the vanishing initial kinetic expectations behind it
        CHECK(rep.note.find("initial kinetics: 0 0") != std::string::npos);
    }

    SUBCASE("sampled schedules are rejected") {
        FieldSchedule sampled(3);
        sampled.add_term(1, SamplesTerm{0.0, 0.5, {0.0, 0.1, 0.2, 0.1}});
        CHECK_THROWS_AS(
            rg_divergence_probe(spec.model, sampled, FieldSchedule(3), w, GridSpec{1.5, 100}),
            ValidationError);
    }
}

TEST_CASE("loop current identity") {
    const auto rep = loop_current_identity();
    CHECK(rep.pass);
    CHECK(rep.max_residual == 0.0);
    CHECK(rep.note.find("open 4-chain 0") != std::string::npos);
    CHECK(rep.note.find("+(1,3) bond 1") != std::string::npos);
}

TEST_CASE("operator crosscheck") {
    SUBCASE("zero couplings: both routes vanish") {
        const ChainModel m(3, {{1, 2, 0.0, 0.0}, {2, 3, 0.0, 0.0}},
                           Topology::OpenChainNearestNeighbor);
        std::mt19937_64 rng(67);
        const StateVector psi = oracle::random_state(rng, 3);
        const auto rep = operator_crosscheck(psi, m, std::vector<double>(3, 0.0));
        CHECK(rep.pass);
        CHECK(rep.max_residual == 0.0);
    }

    SUBCASE("the direct commutator matches the dense oracle; printed forms do not") {
        const ChainModel m = ChainModel::heisenberg_chain(3, 0.5);
        const oracle::Matrix h2 = oracle::two_qubit_dense(m);
        std::mt19937_64 rng(71);
        for (int trial = 0; trial < 10; ++trial) {
            const StateVector psi = oracle::random_state(rng, 3);
            const oracle::Vector v = oracle::to_eigen(psi);
            for (const auto& b : m.bonds()) {
                const double direct =
                    commutator_expectation(psi, m, {}, HamiltonianPart::TwoQubitOnly, b.k, b.i);
                const double dense = oracle::commutator_expectation(
                    v, h2, oracle::current_dense(3, b.k, b.i, b.j_perp));
                CHECK(std::abs(direct - dense) <= 1e-12);
            }
            const auto rep = operator_crosscheck(psi, m, std::vector<double>(3, 0.0));
            CHECK(rep.advisory);
            if (!rep.pass) CHECK(rep.note.find("transcription") != std::string::npos);
        }
    }

    SUBCASE("printed stress evaluation is a faithful transcription") {
        // dense matrix built from the published formula, term by term
        const ChainModel m = ChainModel::heisenberg_chain(3, 0.5);
        const int n = 3;
        auto dense_printed_stress = [&](int k, int i) {
            using oracle::op_on;
            const double pref = 4.0 * m.bond(k, i).j_perp;
            oracle::Matrix out = oracle::Matrix::Zero(8, 8);
            for (int mm = 1; mm <= n; ++mm) {
                if (mm != k && m.find_bond(mm, k)) {
                    const double c = pref * m.bond(mm, k).j_perp;
                    out += c * op_on(n, {{k, oracle::pauli_z()}, {mm, oracle::pauli_x()}}) *
                           op_on(n, {{i, oracle::pauli_x()}});
                    out += c * op_on(n, {{k, oracle::pauli_z()}, {mm, oracle::pauli_y()}}) *
                           op_on(n, {{i, oracle::pauli_y()}});
                }
                if (mm != i && m.find_bond(mm, i)) {
                    const double c = pref * m.bond(mm, i).j_perp;
                    out -= c * op_on(n, {{k, oracle::pauli_x()}}) *
                           op_on(n, {{mm, oracle::pauli_x()}}) * op_on(n, {{i, oracle::pauli_z()}});
                    out -= c * op_on(n, {{k, oracle::pauli_y()}}) *
                           op_on(n, {{mm, oracle::pauli_y()}}) * op_on(n, {{i, oracle::pauli_z()}});
                }
            }
            return out;
        };
        std::mt19937_64 rng(73);
        for (int trial = 0; trial < 5; ++trial) {
            const StateVector psi = oracle::random_state(rng, 3);
            const oracle::Vector v = oracle::to_eigen(psi);
            for (const auto& b : m.bonds()) {
                const StateVector img = apply_printed_stress(psi, m, b.k, b.i);
                const oracle::Vector dv = dense_printed_stress(b.k, b.i) * v;
                double worst = 0.0;
                for (std::size_t idx = 0; idx < img.dim(); ++idx)
                    worst = std::max(worst,
                                     std::abs(img.amps[idx] - dv(static_cast<Eigen::Index>(idx))));
                CHECK(worst < 1e-12);
            }
        }
    }

    SUBCASE("XY model: printed force vanishes identically, stress mismatch remains") {
        const ChainModel m = ChainModel::xy_chain(3, {0.8, -0.5});
        std::mt19937_64 rng(79);
        const StateVector psi = oracle::random_state(rng, 3);
        for (const auto& b : m.bonds()) {
            const StateVector f = apply_printed_force(psi, m, b.k, b.i);
            for (const auto& a : f.amps) CHECK(std::abs(a) == 0.0);
        }
        const auto rep = operator_crosscheck(psi, m, std::vector<double>(3, 0.0));
        CHECK(rep.advisory);
        CHECK_FALSE(rep.pass); // stress sign alone breaks agreement
    }
}
