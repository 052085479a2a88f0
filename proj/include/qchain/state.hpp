#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace qchain {

using Complex = std::complex<double>;

/// Pure state of an N-qubit register in the computational basis.
///
/// Basis convention: bit (i-1) of the basis index is qubit i (1-based);
/// bit value 1 means the qubit is in |1>.  sigma_z is +1 on |0> and -1 on |1>.
/// Labels such as "011" read left to right as |q1 q2 q3>.
struct StateVector {
    int n_qubits = 0;
    std::vector<Complex> amps;

    StateVector() = default;
    explicit StateVector(int n) : n_qubits(n), amps(std::size_t{1} << n) {}

    std::size_t dim() const { return amps.size(); }
    double norm() const;
    void normalize();
};

/// Basis index of a bit-string label ("011" -> |q1=0,q2=1,q3=1>).
std::size_t basis_index(std::string_view label);

/// Inverse of basis_index.
std::string basis_label(std::size_t index, int n_qubits);

/// sigma_z eigenvalue (+1 / -1) of the given qubit in basis state b.
inline int z_sign(std::size_t b, int qubit) {
    return ((b >> (qubit - 1)) & 1u) ? -1 : +1;
}

} // namespace qchain
