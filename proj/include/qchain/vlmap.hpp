#pragma once

#include <span>
#include <vector>

#include "qchain/model.hpp"
#include "qchain/propagator.hpp"
#include "qchain/state.hpp"

namespace qchain {

/// Auxiliary-system description for the van Leeuwen construction.
struct VLConfig {
    ChainModel aux_model;
    /// Empty means "same as the reference initial state".
    std::vector<AmplitudeEntry> aux_initial_state;
    /// Gauge rule h'_g(t) := h_g(t) for this qubit.
    int gauge_qubit = 1;
    /// Kinetic-denominator regularization, in units of J.
    double epsilon = 1e-8;
    /// Reproduction tolerance for max |sigma_ref - sigma_aux|.
    double tolerance = 1e-3;
};

struct RegularizationEvent {
    double t = 0.0;
    int bond_index = 0; // 0-based into the chain bonds (i, i+1)
};

struct CompatibilityReport {
    std::vector<double> sigma_mismatch;        // per qubit
    std::vector<double> current_mismatch;      // per aux bond
    std::vector<double> aux_initial_kinetics;  // <T'_b>' at t=0
    std::vector<int> small_kinetic_bonds;      // bonds with |4<T'>| < epsilon
    double max_sigma_mismatch = 0.0;
    double max_current_mismatch = 0.0;

    bool compatible(double tol) const {
        return max_sigma_mismatch <= tol && max_current_mismatch <= tol;
    }
};

/// Checks the VL initial-state matching conditions: equal initial sigma^z
/// profile and equal initial bond currents (each side with its own current
/// operator), and warns about vanishing initial kinetic denominators.
CompatibilityReport compatibility_check(const StateVector& reference_initial,
                                        const StateVector& aux_initial,
                                        const ChainModel& reference_model,
                                        const ChainModel& aux_model, double epsilon);

/// Solves the per-bond current equation of motion for the auxiliary fields at
/// one instant.  For chain bond b = (a, a+1):
///     target_dj[b] = A'_b + 4 <T'_b>' (h'_a - h'_{a+1}),
/// where A'_b = i<[H'_2q, j'_b]> is evaluated on the auxiliary state.  Small
/// denominators |4<T'>| < epsilon are replaced by sign * epsilon and recorded.
/// Fields are recovered from the N-1 differences by telescoping from the
/// gauge qubit, whose field is pinned to gauge_value.
std::vector<double> field_solve_step(const StateVector& aux_state, const ChainModel& aux_model,
                                     std::span<const double> target_dj, int gauge_qubit,
                                     double gauge_value, double epsilon, double t,
                                     std::vector<RegularizationEvent>* events);

struct VLResult {
    Trajectory reference_trajectory;
    Trajectory aux_trajectory; // field_values hold the constructed h'
    int gauge_qubit = 1;
    double max_sigma_deviation = 0.0;
    double max_current_deviation = 0.0;
    double max_kinetic_deviation = 0.0;
    double max_state_deviation = 0.0; // max |psi_ref,b - psi_aux,b| over the grid
    std::vector<RegularizationEvent> regularization_events;

    double aux_field(std::size_t m, int qubit) const { return aux_trajectory.field(m, qubit); }
};

/// Runs the full construction: co-propagates the reference system and the
/// auxiliary nonlinear system on the shared grid, solving for the auxiliary
/// fields at each step (held constant across the RK4 step) so the auxiliary
/// currents track the reference d<j>/dt targets, which are computed
/// analytically from the reference state via the full commutator.
VLResult vl_construct(const ExperimentSpec& reference, const VLConfig& config);

/// Same construction driven by stored reference snapshots instead of
/// co-propagation; the trajectory must have been recorded with snapshots.
VLResult vl_construct(const Trajectory& reference, const ChainModel& reference_model,
                      const FieldSchedule& reference_schedule, const VLConfig& config);

} // namespace qchain
