#include "qchain/spinops.hpp"

#include <cmath>

#include "qchain/errors.hpp"

namespace qchain {

namespace {

void check_qubit(const StateVector& state, int qubit) {
    if (qubit < 1 || qubit > state.n_qubits)
        throw ValidationError("qubit index " + std::to_string(qubit) + " outside 1.." +
                              std::to_string(state.n_qubits));
}

} // namespace

StateVector apply_pauli(const StateVector& state, int qubit, PauliAxis axis) {
    check_qubit(state, qubit);
    const std::size_t mask = std::size_t{1} << (qubit - 1);
    StateVector out(state.n_qubits);
    switch (axis) {
    case PauliAxis::X:
        for (std::size_t b = 0; b < state.dim(); ++b) out.amps[b] = state.amps[b ^ mask];
        break;
    case PauliAxis::Y:
        // sigma_y |0> = i|1>,  sigma_y |1> = -i|0>
        for (std::size_t b = 0; b < state.dim(); ++b)
            out.amps[b] = ((b & mask) ? Complex(0, 1) : Complex(0, -1)) * state.amps[b ^ mask];
        break;
    case PauliAxis::Z:
        for (std::size_t b = 0; b < state.dim(); ++b)
            out.amps[b] = ((b & mask) ? -1.0 : 1.0) * state.amps[b];
        break;
    }
    return out;
}

StateVector apply_bond_operator(const StateVector& state, const ChainModel& model, int k, int i,
                                BondOperatorKind kind) {
    check_qubit(state, k);
    check_qubit(state, i);
    if (k == i) throw ValidationError("bond operator needs two distinct qubits");
    const Bond& bd = model.bond(k, i);
    const std::size_t mk = std::size_t{1} << (k - 1);
    const std::size_t mi = std::size_t{1} << (i - 1);
    const std::size_t mask = mk | mi;
    StateVector out(state.n_qubits);
    switch (kind) {
    case BondOperatorKind::Current: {
        // j_ki |0_k 1_i> = +4i Jperp |1_k 0_i>,  j_ki |1_k 0_i> = -4i Jperp |0_k 1_i>
        const Complex up(0.0, 4.0 * bd.j_perp);
        for (std::size_t b = 0; b < state.dim(); ++b) {
            const bool bk = b & mk, bi = b & mi;
            if (bk == bi) continue;
            out.amps[b] = (bk ? up : -up) * state.amps[b ^ mask];
        }
        break;
    }
    case BondOperatorKind::Kinetic:
    case BondOperatorKind::XXplusYY: {
        const double hop = kind == BondOperatorKind::Kinetic ? 2.0 * bd.j_perp : 2.0;
        for (std::size_t b = 0; b < state.dim(); ++b) {
            const bool bk = b & mk, bi = b & mi;
            if (bk != bi) out.amps[b] = hop * state.amps[b ^ mask];
        }
        break;
    }
    case BondOperatorKind::ZZ:
        for (std::size_t b = 0; b < state.dim(); ++b)
            out.amps[b] = static_cast<double>(z_sign(b, k) * z_sign(b, i)) * state.amps[b];
        break;
    }
    return out;
}

Complex expectation(const StateVector& state, const StateVector& op_image) {
    if (state.dim() != op_image.dim())
        throw ValidationError("expectation: dimension mismatch");
    Complex acc(0.0, 0.0);
    for (std::size_t b = 0; b < state.dim(); ++b)
        acc += std::conj(state.amps[b]) * op_image.amps[b];
    return acc;
}

double sigma_z_expectation(const StateVector& state, int qubit) {
    check_qubit(state, qubit);
    const std::size_t mask = std::size_t{1} << (qubit - 1);
    double acc = 0.0;
    for (std::size_t b = 0; b < state.dim(); ++b) {
        const double p = std::norm(state.amps[b]);
        acc += (b & mask) ? -p : p;
    }
    return acc;
}

double kinetic_expectation(const StateVector& state, const ChainModel& model, int k, int i) {
    const Bond& bd = model.bond(k, i);
    const std::size_t mk = std::size_t{1} << (k - 1);
    const std::size_t mi = std::size_t{1} << (i - 1);
    const std::size_t mask = mk | mi;
    double acc = 0.0;
    for (std::size_t b = 0; b < state.dim(); ++b) {
        if ((b & mk) && !(b & mi))
            acc += (std::conj(state.amps[b]) * state.amps[b ^ mask]).real();
    }
    return 4.0 * bd.j_perp * acc;
}

double current_expectation(const StateVector& state, const ChainModel& model, int k, int i) {
    // <j_ki> = -8 Jperp sum_{b: k set, i clear} Im(conj(a_b) a_{b^mask})
    const Bond& bd = model.bond(k, i);
    const std::size_t mk = std::size_t{1} << (k - 1);
    const std::size_t mi = std::size_t{1} << (i - 1);
    const std::size_t mask = mk | mi;
    double acc = 0.0;
    for (std::size_t b = 0; b < state.dim(); ++b) {
        if ((b & mk) && !(b & mi))
            acc += (std::conj(state.amps[b]) * state.amps[b ^ mask]).imag();
    }
    return -8.0 * bd.j_perp * acc;
}

double commutator_expectation(const StateVector& state, const ChainModel& model,
                              std::span<const double> fields, HamiltonianPart part, int k, int i) {
    const bool want_fields = part != HamiltonianPart::TwoQubitOnly;
    if (want_fields && static_cast<int>(fields.size()) != model.n_qubits())
        throw ValidationError("commutator_expectation: fields length must equal n_qubits");

    // u = H_part |state>
    StateVector u(state.n_qubits);
    if (want_fields) {
        for (std::size_t b = 0; b < state.dim(); ++b) {
            double d = 0.0;
            for (int q = 1; q <= model.n_qubits(); ++q)
                d += fields[q - 1] * static_cast<double>(z_sign(b, q));
            u.amps[b] = d * state.amps[b];
        }
    }
    if (part != HamiltonianPart::LocalFieldsOnly) {
        for (const auto& bd : model.bonds()) {
            const std::size_t mk = std::size_t{1} << (bd.k - 1);
            const std::size_t mi = std::size_t{1} << (bd.i - 1);
            const std::size_t mask = mk | mi;
            const double hop = 2.0 * bd.j_perp;
            for (std::size_t b = 0; b < state.dim(); ++b) {
                const bool bk = b & mk, bi = b & mi;
                if (bk != bi) {
                    u.amps[b] += hop * state.amps[b ^ mask];
                    u.amps[b] -= bd.j_par * state.amps[b];
                } else {
                    u.amps[b] += bd.j_par * state.amps[b];
                }
            }
        }
    }

    const StateVector v = apply_bond_operator(state, model, k, i, BondOperatorKind::Current);
    // i<[H, j]> = i(<u|v> - conj(<u|v>)) = -2 Im<u|v>
    return -2.0 * expectation(u, v).imag();
}

} // namespace qchain
