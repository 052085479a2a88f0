#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qchain/state.hpp"

namespace qchain {

enum class Topology { OpenChainNearestNeighbor, GeneralGraph };

/// Unordered coupled pair; stored with k < i.
struct Bond {
    int k = 0;
    int i = 0;
    double j_perp = 0.0;
    double j_par = 0.0;
};

/// Chain topology and two-qubit couplings of the 2-local Hamiltonian
///   H(t) = sum_b Jperp_b (XX+YY) + sum_b Jpar_b ZZ + sum_i h_i(t) Z_i.
class ChainModel {
public:
    ChainModel(int n_qubits, std::vector<Bond> bonds, Topology topology);

    /// Uniform nearest-neighbor presets.
    static ChainModel heisenberg_chain(int n_qubits, double j);
    static ChainModel xy_chain(int n_qubits, std::vector<double> j_perp);
    static ChainModel xxz_chain(int n_qubits, double j_perp, double j_par);

    int n_qubits() const { return n_qubits_; }
    const std::vector<Bond>& bonds() const { return bonds_; }
    Topology topology() const { return topology_; }

    /// True iff bonds are exactly {(i, i+1) : i = 1..N-1}.
    bool is_nearest_neighbor_chain() const;

    const Bond* find_bond(int k, int i) const;
    const Bond& bond(int k, int i) const; // throws ValidationError if uncoupled

private:
    int n_qubits_ = 0;
    std::vector<Bond> bonds_; // sorted by (k, i), k < i, unique
    Topology topology_ = Topology::OpenChainNearestNeighbor;
};

// ---------------------------------------------------------------------------
// Time-dependent local fields h_i(t)

struct ConstantTerm {
    double value = 0.0;
};

/// amplitude * sum_n sign_n * sin(omega_n t)
struct SineSumTerm {
    double amplitude = 0.0;
    std::vector<double> signs;
    std::vector<double> omegas;
};

/// Uniform-grid samples with linear interpolation; no extrapolation.
struct SamplesTerm {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> values;
};

using FieldTerm = std::variant<ConstantTerm, SineSumTerm, SamplesTerm>;

double evaluate_term(const FieldTerm& term, double t);

/// True for terms that are analytic in t (everything except samples).
bool term_is_analytic(const FieldTerm& term);

class FieldSchedule {
public:
    FieldSchedule() = default;
    explicit FieldSchedule(int n_qubits) : terms_(n_qubits) {}

    int n_qubits() const { return static_cast<int>(terms_.size()); }
    void add_term(int qubit, FieldTerm term);
    const std::vector<std::vector<FieldTerm>>& terms() const { return terms_; }

    bool analytic() const;
    double value(int qubit, double t) const;
    void values_at(double t, std::span<double> out) const;

private:
    std::vector<std::vector<FieldTerm>> terms_;
};

/// Sum of all terms for the given qubit at time t.
double evaluate_field(const FieldSchedule& schedule, int qubit, double t);

/// One parametric term applied identically to all qubits (gauge field C(t)).
struct GlobalFieldShift {
    FieldTerm term = ConstantTerm{0.0};
};

/// Copy of `schedule` with the shift term appended to every qubit.
FieldSchedule shifted_schedule(const FieldSchedule& schedule, const GlobalFieldShift& shift);

// ---------------------------------------------------------------------------
// Experiment description

struct GridSpec {
    double t_end = 0.0;
    int n_steps = 0;
    double dt() const { return t_end / n_steps; }
};

struct RecordFlags {
    bool sigma_z = true;
    bool currents = true;
    bool kinetics = true;
    bool snapshots = false;
};

struct AmplitudeEntry {
    std::string label;
    Complex amplitude;
};

struct ExperimentSpec {
    ChainModel model;
    FieldSchedule schedule;
    std::vector<AmplitudeEntry> initial_state;
    GridSpec grid;
    RecordFlags record;
};

/// H(t)|state> with the field values supplied for each qubit.
StateVector apply_hamiltonian(const ChainModel& model, std::span<const double> fields,
                              const StateVector& state);

/// Reusable H-application kernel with a precomputed ZZ diagonal.
class HamiltonianApplier {
public:
    explicit HamiltonianApplier(const ChainModel& model);
    int n_qubits() const { return n_; }
    /// out = H(fields) in.  Spans must have length 2^N; fields length N.
    void apply(std::span<const double> fields, std::span<const Complex> in,
               std::span<Complex> out) const;

private:
    int n_ = 0;
    std::vector<Bond> bonds_;
    std::vector<double> zz_diag_;
};

/// State from label/amplitude pairs; renormalizes with a warning on stderr
/// when the norm deviates from 1 by more than 1e-12.
StateVector build_initial_state(const std::vector<AmplitudeEntry>& entries, int n_qubits);
StateVector build_initial_state(const ExperimentSpec& spec);

} // namespace qchain
