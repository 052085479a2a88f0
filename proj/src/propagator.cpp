#include "qchain/propagator.hpp"

#include <cmath>
#include <cstdio>

#include "qchain/errors.hpp"
#include "qchain/spinops.hpp"

namespace qchain {

Rk4Stepper::Rk4Stepper(const ChainModel& model)
    : applier_(model),
      k1_(std::size_t{1} << model.n_qubits()),
      k2_(k1_.size()),
      k3_(k1_.size()),
      k4_(k1_.size()),
      tmp_(k1_.size()),
      f0_(model.n_qubits()),
      fh_(model.n_qubits()),
      f1_(model.n_qubits()) {}

void Rk4Stepper::stage(std::span<const double> fields, const std::vector<Complex>& in,
                       std::vector<Complex>& deriv) {
    applier_.apply(fields, in, deriv);
    const Complex minus_i(0.0, -1.0);
    for (auto& c : deriv) c *= minus_i;
}

void Rk4Stepper::run(StateVector& state, double dt, std::span<const double> f0,
                     std::span<const double> fhalf, std::span<const double> f1) {
    auto& psi = state.amps;
    stage(f0, psi, k1_);
    for (std::size_t b = 0; b < psi.size(); ++b) tmp_[b] = psi[b] + 0.5 * dt * k1_[b];
    stage(fhalf, tmp_, k2_);
    for (std::size_t b = 0; b < psi.size(); ++b) tmp_[b] = psi[b] + 0.5 * dt * k2_[b];
    stage(fhalf, tmp_, k3_);
    for (std::size_t b = 0; b < psi.size(); ++b) tmp_[b] = psi[b] + dt * k3_[b];
    stage(f1, tmp_, k4_);
    const double w = dt / 6.0;
    for (std::size_t b = 0; b < psi.size(); ++b)
        psi[b] += w * (k1_[b] + 2.0 * k2_[b] + 2.0 * k3_[b] + k4_[b]);
}

void Rk4Stepper::step(StateVector& state, const FieldSchedule& schedule, double t, double dt) {
    schedule.values_at(t, f0_);
    schedule.values_at(t + 0.5 * dt, fh_);
    schedule.values_at(t + dt, f1_);
    run(state, dt, f0_, fh_, f1_);
}

void Rk4Stepper::step_frozen(StateVector& state, std::span<const double> fields, double dt) {
    run(state, dt, fields, fields, fields);
}

StateVector rk4_step(const ChainModel& model, const FieldSchedule& schedule,
                     const StateVector& state, double t, double dt) {
    if (dt == 0.0) throw ValidationError("rk4_step needs dt != 0");
    if (state.n_qubits != model.n_qubits())
        throw ValidationError("rk4_step: state dimension does not match model");
    if (schedule.n_qubits() != model.n_qubits())
        throw ValidationError("rk4_step: schedule does not match model");
    StateVector out = state;
    Rk4Stepper(model).step(out, schedule, t, dt);
    return out;
}

namespace {

void record_point(Trajectory& traj, const StateVector& psi, const ChainModel& model,
                  std::span<const double> fields) {
    const int n = model.n_qubits();
    if (traj.record.sigma_z)
        for (int q = 1; q <= n; ++q) traj.sigma_z.push_back(sigma_z_expectation(psi, q));
    if (traj.record.currents)
        for (const auto& bd : model.bonds())
            traj.currents.push_back(current_expectation(psi, model, bd.k, bd.i));
    if (traj.record.kinetics)
        for (const auto& bd : model.bonds())
            traj.kinetics.push_back(kinetic_expectation(psi, model, bd.k, bd.i));
    traj.field_values.insert(traj.field_values.end(), fields.begin(), fields.end());
    traj.norms.push_back(psi.norm());
    if (traj.record.snapshots) traj.snapshots.push_back(psi);
}

} // namespace

Trajectory propagate(const ExperimentSpec& spec) {
    if (spec.grid.n_steps < 1) throw ValidationError("grid needs n_steps >= 1");
    if (!(spec.grid.t_end > 0.0)) throw ValidationError("grid needs t_end > 0");
    if (spec.schedule.n_qubits() != spec.model.n_qubits())
        throw ValidationError("schedule does not match model size");

    StateVector psi = build_initial_state(spec);
    const int n = spec.model.n_qubits();
    const int M = spec.grid.n_steps;
    const double dt = spec.grid.dt();

    Trajectory traj;
    traj.n_qubits = n;
    traj.record = spec.record;
    for (const auto& bd : spec.model.bonds()) traj.bond_pairs.emplace_back(bd.k, bd.i);
    traj.times.reserve(M + 1);

    Rk4Stepper stepper(spec.model);
    std::vector<double> fields(n);
    for (int m = 0; m <= M; ++m) {
        const double t = m * dt;
        traj.times.push_back(t);
        spec.schedule.values_at(t, fields);
        record_point(traj, psi, spec.model, fields);

        const double drift = std::abs(traj.norms.back() - 1.0);
        if (drift > 1e-6) {
            char msg[160];
            std::snprintf(msg, sizeof(msg),
                          "norm drift %.3e at t=%.6g (step %d of %d); dt=%.3e is too large, "
                          "increase n_steps",
                          drift, t, m, M, dt);
            throw NumericalError(msg);
        }
        if (m < M) stepper.step(psi, spec.schedule, t, dt);
    }
    return traj;
}

} // namespace qchain
