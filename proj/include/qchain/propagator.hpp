#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "qchain/model.hpp"
#include "qchain/state.hpp"

namespace qchain {

/// Uniform-grid record of a propagation.  Row-major layout: entry (m, j) of a
/// per-qubit array lives at m * N + j, of a per-bond array at m * B + j.
/// Bonds are listed in ascending (k, i) order; bond currents are expectations
/// of j_ki with k < i.
struct Trajectory {
    int n_qubits = 0;
    std::vector<std::pair<int, int>> bond_pairs;
    RecordFlags record;
    std::vector<double> times;
    std::vector<double> sigma_z;      // (M+1) x N when recorded
    std::vector<double> currents;     // (M+1) x B when recorded
    std::vector<double> kinetics;     // (M+1) x B when recorded
    std::vector<double> field_values; // (M+1) x N, always recorded
    std::vector<double> norms;        // M+1, always recorded
    std::vector<StateVector> snapshots;

    std::size_t n_points() const { return times.size(); }
    std::size_t n_bonds() const { return bond_pairs.size(); }
    double sigma(std::size_t m, int qubit) const { return sigma_z[m * n_qubits + qubit - 1]; }
    double current(std::size_t m, std::size_t bond) const { return currents[m * n_bonds() + bond]; }
    double kinetic(std::size_t m, std::size_t bond) const { return kinetics[m * n_bonds() + bond]; }
    double field(std::size_t m, int qubit) const { return field_values[m * n_qubits + qubit - 1]; }
};

/// Fixed-step RK4 for psi' = -i H(t) psi with reusable work buffers.
class Rk4Stepper {
public:
    explicit Rk4Stepper(const ChainModel& model);

    /// One step with fields evaluated from the schedule at t, t+dt/2, t+dt.
    void step(StateVector& state, const FieldSchedule& schedule, double t, double dt);

    /// One step with the field values held fixed across the step.
    void step_frozen(StateVector& state, std::span<const double> fields, double dt);

private:
    void stage(std::span<const double> fields, const std::vector<Complex>& in,
               std::vector<Complex>& deriv);
    void run(StateVector& state, double dt, std::span<const double> f0,
             std::span<const double> fhalf, std::span<const double> f1);

    HamiltonianApplier applier_;
    std::vector<Complex> k1_, k2_, k3_, k4_, tmp_;
    std::vector<double> f0_, fh_, f1_;
};

/// Classical RK4 update, returning the advanced state.
StateVector rk4_step(const ChainModel& model, const FieldSchedule& schedule,
                     const StateVector& state, double t, double dt);

/// Propagate the experiment on its uniform grid, recording the requested
/// observables from the exact state at every grid point.  Aborts with a
/// NumericalError if the norm drifts by more than 1e-6.
Trajectory propagate(const ExperimentSpec& spec);

} // namespace qchain
