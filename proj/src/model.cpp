#include "qchain/model.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "qchain/errors.hpp"

namespace qchain {

ChainModel::ChainModel(int n_qubits, std::vector<Bond> bonds, Topology topology)
    : n_qubits_(n_qubits), bonds_(std::move(bonds)), topology_(topology) {
    if (n_qubits_ < 2) throw ValidationError("model requires n_qubits >= 2");
    if (n_qubits_ > 24)
        throw ValidationError("state-vector kernels support at most 24 qubits");
    for (auto& b : bonds_) {
        if (b.k == b.i) throw ValidationError("bond with equal qubit indices");
        if (b.k > b.i) std::swap(b.k, b.i);
        if (b.k < 1 || b.i > n_qubits_)
            throw ValidationError("bond (" + std::to_string(b.k) + "," + std::to_string(b.i) +
                                  ") outside 1.." + std::to_string(n_qubits_));
    }
    std::sort(bonds_.begin(), bonds_.end(), [](const Bond& a, const Bond& b) {
        return std::pair(a.k, a.i) < std::pair(b.k, b.i);
    });
    for (std::size_t j = 1; j < bonds_.size(); ++j)
        if (bonds_[j - 1].k == bonds_[j].k && bonds_[j - 1].i == bonds_[j].i)
            throw ValidationError("duplicate bond (" + std::to_string(bonds_[j].k) + "," +
                                  std::to_string(bonds_[j].i) + ")");
    if (topology_ == Topology::OpenChainNearestNeighbor && !is_nearest_neighbor_chain())
        throw ValidationError("open_chain topology requires bonds exactly {(i,i+1)}");
}

ChainModel ChainModel::heisenberg_chain(int n, double j) {
    std::vector<Bond> bonds;
    for (int i = 1; i < n; ++i) bonds.push_back({i, i + 1, j, j});
    return ChainModel(n, std::move(bonds), Topology::OpenChainNearestNeighbor);
}

ChainModel ChainModel::xy_chain(int n, std::vector<double> j_perp) {
    if (static_cast<int>(j_perp.size()) != n - 1)
        throw ValidationError("xy_chain needs N-1 couplings");
    std::vector<Bond> bonds;
    for (int i = 1; i < n; ++i) bonds.push_back({i, i + 1, j_perp[i - 1], 0.0});
    return ChainModel(n, std::move(bonds), Topology::OpenChainNearestNeighbor);
}

ChainModel ChainModel::xxz_chain(int n, double j_perp, double j_par) {
    std::vector<Bond> bonds;
    for (int i = 1; i < n; ++i) bonds.push_back({i, i + 1, j_perp, j_par});
    return ChainModel(n, std::move(bonds), Topology::OpenChainNearestNeighbor);
}

bool ChainModel::is_nearest_neighbor_chain() const {
    if (static_cast<int>(bonds_.size()) != n_qubits_ - 1) return false;
    for (int i = 1; i < n_qubits_; ++i)
        if (bonds_[i - 1].k != i || bonds_[i - 1].i != i + 1) return false;
    return true;
}

const Bond* ChainModel::find_bond(int k, int i) const {
    if (k > i) std::swap(k, i);
    for (const auto& b : bonds_)
        if (b.k == k && b.i == i) return &b;
    return nullptr;
}

const Bond& ChainModel::bond(int k, int i) const {
    const Bond* b = find_bond(k, i);
    if (!b)
        throw ValidationError("pair (" + std::to_string(k) + "," + std::to_string(i) +
                              ") is not coupled in the model");
    return *b;
}

// ---------------------------------------------------------------------------

double evaluate_term(const FieldTerm& term, double t) {
    return std::visit(
        [t](const auto& tm) -> double {
            using T = std::decay_t<decltype(tm)>;
            if constexpr (std::is_same_v<T, ConstantTerm>) {
                return tm.value;
            } else if constexpr (std::is_same_v<T, SineSumTerm>) {
                double s = 0.0;
                for (std::size_t n = 0; n < tm.omegas.size(); ++n)
                    s += tm.signs[n] * std::sin(tm.omegas[n] * t);
                return tm.amplitude * s;
            } else {
                const double t_max = tm.t0 + tm.dt * static_cast<double>(tm.values.size() - 1);
                constexpr double slack = 1e-12;
                if (t < tm.t0 - slack || t > t_max + slack)
                    throw ValidationError("sample term evaluated outside its range (no extrapolation)");
                const double x = std::clamp((t - tm.t0) / tm.dt, 0.0,
                                            static_cast<double>(tm.values.size() - 1));
                const auto j = static_cast<std::size_t>(
                    std::min(x, static_cast<double>(tm.values.size() - 2)));
                const double w = x - static_cast<double>(j);
                return (1.0 - w) * tm.values[j] + w * tm.values[j + 1];
            }
        },
        term);
}

bool term_is_analytic(const FieldTerm& term) {
    return !std::holds_alternative<SamplesTerm>(term);
}

void FieldSchedule::add_term(int qubit, FieldTerm term) {
    if (qubit < 1 || qubit > n_qubits()) throw ValidationError("field term qubit out of range");
    if (const auto* s = std::get_if<SamplesTerm>(&term)) {
        if (s->values.size() < 2 || !(s->dt > 0.0))
            throw ValidationError("sample term needs dt > 0 and at least two values");
    }
    if (const auto* s = std::get_if<SineSumTerm>(&term)) {
        if (s->signs.size() != s->omegas.size())
            throw ValidationError("sine_sum term needs matching signs/omegas lengths");
    }
    terms_[qubit - 1].push_back(std::move(term));
}

bool FieldSchedule::analytic() const {
    for (const auto& qt : terms_)
        for (const auto& t : qt)
            if (!term_is_analytic(t)) return false;
    return true;
}

double FieldSchedule::value(int qubit, double t) const {
    if (qubit < 1 || qubit > n_qubits()) throw ValidationError("field qubit out of range");
    double s = 0.0;
    for (const auto& term : terms_[qubit - 1]) s += evaluate_term(term, t);
    return s;
}

void FieldSchedule::values_at(double t, std::span<double> out) const {
    for (int q = 1; q <= n_qubits(); ++q) out[q - 1] = value(q, t);
}

double evaluate_field(const FieldSchedule& schedule, int qubit, double t) {
    return schedule.value(qubit, t);
}

FieldSchedule shifted_schedule(const FieldSchedule& schedule, const GlobalFieldShift& shift) {
    FieldSchedule out = schedule;
    for (int q = 1; q <= out.n_qubits(); ++q) out.add_term(q, shift.term);
    return out;
}

// ---------------------------------------------------------------------------

HamiltonianApplier::HamiltonianApplier(const ChainModel& model)
    : n_(model.n_qubits()), bonds_(model.bonds()), zz_diag_(std::size_t{1} << model.n_qubits()) {
    for (std::size_t b = 0; b < zz_diag_.size(); ++b) {
        double d = 0.0;
        for (const auto& bd : bonds_)
            d += bd.j_par * static_cast<double>(z_sign(b, bd.k) * z_sign(b, bd.i));
        zz_diag_[b] = d;
    }
}

void HamiltonianApplier::apply(std::span<const double> fields, std::span<const Complex> in,
                               std::span<Complex> out) const {
    const std::size_t dim = zz_diag_.size();
    for (std::size_t b = 0; b < dim; ++b) {
        double d = zz_diag_[b];
        for (int q = 1; q <= n_; ++q) d += fields[q - 1] * static_cast<double>(z_sign(b, q));
        out[b] = d * in[b];
    }
    for (const auto& bd : bonds_) {
        const std::size_t mk = std::size_t{1} << (bd.k - 1);
        const std::size_t mi = std::size_t{1} << (bd.i - 1);
        const std::size_t mask = mk | mi;
        const double hop = 2.0 * bd.j_perp;
        for (std::size_t b = 0; b < dim; ++b) {
            const bool bk = b & mk, bi = b & mi;
            if (bk != bi) out[b] += hop * in[b ^ mask];
        }
    }
}

StateVector apply_hamiltonian(const ChainModel& model, std::span<const double> fields,
                              const StateVector& state) {
    if (static_cast<int>(fields.size()) != model.n_qubits())
        throw ValidationError("fields array length must equal n_qubits");
    if (state.n_qubits != model.n_qubits())
        throw ValidationError("state dimension does not match model");
    StateVector out(state.n_qubits);
    HamiltonianApplier(model).apply(fields, state.amps, out.amps);
    return out;
}

StateVector build_initial_state(const std::vector<AmplitudeEntry>& entries, int n_qubits) {
    if (entries.empty()) throw ValidationError("initial state needs at least one amplitude");
    StateVector psi(n_qubits);
    std::vector<bool> seen(psi.dim(), false);
    for (const auto& e : entries) {
        if (static_cast<int>(e.label.size()) != n_qubits)
            throw ValidationError("initial-state label \"" + e.label + "\" must have " +
                                  std::to_string(n_qubits) + " bits");
        const std::size_t b = basis_index(e.label);
        if (seen[b]) throw ValidationError("duplicate initial-state label \"" + e.label + "\"");
        seen[b] = true;
        psi.amps[b] = e.amplitude;
    }
    const double n = psi.norm();
    if (!(n > 0.0) || !std::isfinite(n))
        throw ValidationError("initial state has zero or non-finite norm");
    if (std::abs(n - 1.0) > 1e-12) {
        std::cerr << "warning: initial state norm " << n << " deviates from 1; renormalizing\n";
        psi.normalize();
    }
    return psi;
}

StateVector build_initial_state(const ExperimentSpec& spec) {
    return build_initial_state(spec.initial_state, spec.model.n_qubits());
}

} // namespace qchain
