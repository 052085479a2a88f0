#pragma once

#include <span>
#include <string>

#include "qchain/model.hpp"
#include "qchain/propagator.hpp"
#include "qchain/state.hpp"

namespace qchain {

struct VerificationReport {
    std::string check;
    double max_residual = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string location; // worst offender, e.g. "t=0.12 qubit 2"
    std::string note;     // free-form classification
    bool advisory = false; // informational check, not gating
};

/// Local conservation law on a recorded trajectory: centered-difference
/// d sigma_i/dt against the incident bond currents.  Threshold 100 dt^2.
VerificationReport continuity_residual(const Trajectory& traj, const ChainModel& model);

/// Global drifts of sum_i sigma_i^z and of the norm; threshold 1e-9.
VerificationReport conservation_drift(const Trajectory& traj);

/// Propagates the experiment with and without the uniform shift C(t) added to
/// every field; compares sigma^z, currents and all pairwise concurrences.
/// Requires the initial state to be a sigma^z_total eigenstate.
VerificationReport gauge_invariance_check(const ExperimentSpec& spec,
                                          const GlobalFieldShift& shift);

/// Propagates two analytic schedules from a shared initial state and reports
/// the first grid time at which the sigma^z sets separate by more than 1e-6,
/// whether the schedules differ by more than a global constant, and the
/// initial kinetic expectations.
VerificationReport rg_divergence_probe(const ChainModel& model, const FieldSchedule& schedule_a,
                                       const FieldSchedule& schedule_b, const StateVector& initial,
                                       const GridSpec& grid);

/// Transverse-current geometry dichotomy on 4 qubits: the stationary
/// current-difference system has an empty kernel on the open nearest-neighbor
/// chain and a loop solution once a second-neighbor bond is added.
VerificationReport loop_current_identity();

/// Evaluates the published explicit stress/force expressions literally and
/// compares their sum with the directly computed i<[H_2q, j_b]> per bond.
/// Advisory: a persistent mismatch is classified, not treated as a failure.
VerificationReport operator_crosscheck(const StateVector& state, const ChainModel& model,
                                       std::span<const double> fields);

/// The printed stress/force operator images themselves (exposed for tests).
StateVector apply_printed_stress(const StateVector& state, const ChainModel& model, int k, int i);
StateVector apply_printed_force(const StateVector& state, const ChainModel& model, int k, int i);

} // namespace qchain
