#include "qchain/vlmap.hpp"

#include <cmath>
#include <string>

#include "qchain/errors.hpp"
#include "qchain/observables.hpp"
#include "qchain/spinops.hpp"

namespace qchain {

namespace {

constexpr double kCompatibilityTol = 1e-9;

void validate_vl_config(const VLConfig& cfg, int n_qubits) {
    if (cfg.aux_model.n_qubits() != n_qubits)
        throw ValidationError("auxiliary model size differs from the reference");
    if (!cfg.aux_model.is_nearest_neighbor_chain())
        throw ValidationError("VL construction requires a nearest-neighbor chain auxiliary model");
    if (cfg.gauge_qubit < 1 || cfg.gauge_qubit > n_qubits)
        throw ValidationError("gauge qubit out of range");
    if (!(cfg.epsilon > 0.0)) throw ValidationError("epsilon must be positive");
}

} // namespace

CompatibilityReport compatibility_check(const StateVector& reference_initial,
                                        const StateVector& aux_initial,
                                        const ChainModel& reference_model,
                                        const ChainModel& aux_model, double epsilon) {
    if (reference_initial.n_qubits != aux_initial.n_qubits)
        throw ValidationError("compatibility_check: state sizes differ");

    CompatibilityReport rep;
    const int n = reference_initial.n_qubits;
    for (int q = 1; q <= n; ++q) {
        const double d = std::abs(sigma_z_expectation(reference_initial, q) -
                                  sigma_z_expectation(aux_initial, q));
        rep.sigma_mismatch.push_back(d);
        rep.max_sigma_mismatch = std::max(rep.max_sigma_mismatch, d);
    }
    // current condition: <psi'|j'_b|psi'> = <psi|j_b|psi>, each with its own couplings
    for (std::size_t b = 0; b < aux_model.bonds().size(); ++b) {
        const auto& ab = aux_model.bonds()[b];
        const double jaux = current_expectation(aux_initial, aux_model, ab.k, ab.i);
        const Bond* rb = reference_model.find_bond(ab.k, ab.i);
        const double jref =
            rb ? current_expectation(reference_initial, reference_model, ab.k, ab.i) : 0.0;
        const double d = std::abs(jaux - jref);
        rep.current_mismatch.push_back(d);
        rep.max_current_mismatch = std::max(rep.max_current_mismatch, d);

        const double kin = kinetic_expectation(aux_initial, aux_model, ab.k, ab.i);
        rep.aux_initial_kinetics.push_back(kin);
        if (std::abs(4.0 * kin) < epsilon) rep.small_kinetic_bonds.push_back(static_cast<int>(b));
    }
    return rep;
}

std::vector<double> field_solve_step(const StateVector& aux_state, const ChainModel& aux_model,
                                     std::span<const double> target_dj, int gauge_qubit,
                                     double gauge_value, double epsilon, double t,
                                     std::vector<RegularizationEvent>* events) {
    if (!aux_model.is_nearest_neighbor_chain())
        throw ValidationError("field_solve_step requires a nearest-neighbor chain");
    const int n = aux_model.n_qubits();
    if (static_cast<int>(target_dj.size()) != n - 1)
        throw ValidationError("field_solve_step: one target per chain bond expected");
    if (gauge_qubit < 1 || gauge_qubit > n) throw ValidationError("gauge qubit out of range");

    // diff[b] = h'_b - h'_{b+1} solved from target = A' + 4<T'> * diff
    std::vector<double> diff(n - 1);
    for (int b = 0; b < n - 1; ++b) {
        const auto& bd = aux_model.bonds()[b];
        const double a_term = commutator_expectation(aux_state, aux_model, {},
                                                     HamiltonianPart::TwoQubitOnly, bd.k, bd.i);
        double denom = 4.0 * kinetic_expectation(aux_state, aux_model, bd.k, bd.i);
        if (std::abs(denom) < epsilon) {
            denom = denom < 0.0 ? -epsilon : epsilon; // sign(0) := +1
            if (events) events->push_back({t, b});
        }
        diff[b] = (target_dj[b] - a_term) / denom;
    }

    std::vector<double> fields(n);
    fields[gauge_qubit - 1] = gauge_value;
    for (int a = gauge_qubit - 1; a >= 1; --a) fields[a - 1] = fields[a] + diff[a - 1];
    for (int a = gauge_qubit; a <= n - 1; ++a) fields[a] = fields[a - 1] - diff[a - 1];
    return fields;
}

namespace {

struct RowRecorder {
    Trajectory traj;

    explicit RowRecorder(const ChainModel& model, const RecordFlags& flags) {
        traj.n_qubits = model.n_qubits();
        traj.record = flags;
        for (const auto& bd : model.bonds()) traj.bond_pairs.emplace_back(bd.k, bd.i);
    }

    void add(double t, const StateVector& psi, const ChainModel& model,
             std::span<const double> fields) {
        traj.times.push_back(t);
        if (traj.record.sigma_z)
            for (int q = 1; q <= traj.n_qubits; ++q)
                traj.sigma_z.push_back(sigma_z_expectation(psi, q));
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
};

VLResult vl_core(const ChainModel& ref_model, const FieldSchedule& ref_schedule,
                 const StateVector& ref_initial, const GridSpec& grid, bool want_snapshots,
                 const VLConfig& cfg, const std::vector<StateVector>* ref_snapshots) {
    validate_vl_config(cfg, ref_model.n_qubits());
    if (!ref_model.is_nearest_neighbor_chain())
        throw ValidationError("VL construction requires a nearest-neighbor chain reference model");
    if (grid.n_steps < 1) throw ValidationError("VL construction needs n_steps >= 1");

    const int n = ref_model.n_qubits();
    const int M = grid.n_steps;
    const double dt = grid.dt();

    StateVector psi = ref_initial;
    StateVector phi = cfg.aux_initial_state.empty()
                          ? ref_initial
                          : build_initial_state(cfg.aux_initial_state, n);

    const CompatibilityReport compat =
        compatibility_check(psi, phi, ref_model, cfg.aux_model, cfg.epsilon);
    if (!compat.compatible(kCompatibilityTol)) {
        throw IncompatibleStateError(
            "auxiliary initial state violates the matching conditions: max sigma mismatch " +
            std::to_string(compat.max_sigma_mismatch) + ", max current mismatch " +
            std::to_string(compat.max_current_mismatch));
    }

    RecordFlags flags;
    flags.snapshots = want_snapshots;
    RowRecorder ref_rows(ref_model, flags);
    RowRecorder aux_rows(cfg.aux_model, flags);

    VLResult res;
    res.gauge_qubit = cfg.gauge_qubit;

    Rk4Stepper ref_stepper(ref_model);
    Rk4Stepper aux_stepper(cfg.aux_model);
    std::vector<double> ref_fields(n);

    for (int m = 0; m <= M; ++m) {
        const double t = m * dt;
        const StateVector& ref_state = ref_snapshots ? (*ref_snapshots)[m] : psi;
        ref_schedule.values_at(t, ref_fields);

        const std::vector<double> targets =
            current_time_derivative(ref_state, ref_model, ref_fields);
        const double gauge_value = ref_schedule.value(cfg.gauge_qubit, t);
        const std::vector<double> aux_fields =
            field_solve_step(phi, cfg.aux_model, targets, cfg.gauge_qubit, gauge_value,
                             cfg.epsilon, t, &res.regularization_events);

        ref_rows.add(t, ref_state, ref_model, ref_fields);
        aux_rows.add(t, phi, cfg.aux_model, aux_fields);

        const std::size_t row = ref_rows.traj.n_points() - 1;
        for (int q = 1; q <= n; ++q)
            res.max_sigma_deviation =
                std::max(res.max_sigma_deviation,
                         std::abs(ref_rows.traj.sigma(row, q) - aux_rows.traj.sigma(row, q)));
        for (std::size_t b = 0; b < aux_rows.traj.n_bonds(); ++b) {
            res.max_current_deviation =
                std::max(res.max_current_deviation,
                         std::abs(ref_rows.traj.current(row, b) - aux_rows.traj.current(row, b)));
            res.max_kinetic_deviation =
                std::max(res.max_kinetic_deviation,
                         std::abs(ref_rows.traj.kinetic(row, b) - aux_rows.traj.kinetic(row, b)));
        }
        for (std::size_t b = 0; b < ref_state.dim(); ++b)
            res.max_state_deviation =
                std::max(res.max_state_deviation, std::abs(ref_state.amps[b] - phi.amps[b]));

        if (m < M) {
            if (!ref_snapshots) ref_stepper.step(psi, ref_schedule, t, dt);
            aux_stepper.step_frozen(phi, aux_fields, dt);
        }
    }

    res.reference_trajectory = std::move(ref_rows.traj);
    res.aux_trajectory = std::move(aux_rows.traj);
    return res;
}

} // namespace

VLResult vl_construct(const ExperimentSpec& reference, const VLConfig& config) {
    const StateVector psi0 = build_initial_state(reference);
    return vl_core(reference.model, reference.schedule, psi0, reference.grid,
                   reference.record.snapshots, config, nullptr);
}

VLResult vl_construct(const Trajectory& reference, const ChainModel& reference_model,
                      const FieldSchedule& reference_schedule, const VLConfig& config) {
    if (!reference.record.snapshots || reference.snapshots.size() != reference.n_points())
        throw ValidationError("snapshot-driven VL construction needs recorded state snapshots");
    if (reference.n_points() < 2) throw ValidationError("reference trajectory too short");
    GridSpec grid;
    grid.n_steps = static_cast<int>(reference.n_points()) - 1;
    grid.t_end = reference.times.back();
    return vl_core(reference_model, reference_schedule, reference.snapshots.front(), grid,
                   false, config, &reference.snapshots);
}

} // namespace qchain
