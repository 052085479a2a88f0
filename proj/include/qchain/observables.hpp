#pragma once

#include <array>
#include <span>
#include <vector>

#include "qchain/model.hpp"
#include "qchain/spinops.hpp"
#include "qchain/state.hpp"

namespace qchain {

struct BondObservables {
    std::vector<double> currents;
    std::vector<double> kinetics;
};

/// Two-qubit reduced density matrix of qubits (k, l), basis {|00>,|01>,|10>,|11>}
/// with the first digit belonging to qubit k.  Row-major 4x4.
struct TwoQubitRDM {
    int k = 0;
    int l = 0;
    std::array<Complex, 16> matrix{};

    Complex& at(int r, int c) { return matrix[4 * r + c]; }
    const Complex& at(int r, int c) const { return matrix[4 * r + c]; }
};

/// Eigenvalues of rho * rho~ sorted descending, and the Wootters concurrence
/// max(0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4)).
struct ConcurrenceSpectrum {
    std::array<double, 4> lambdas{};
    double concurrence = 0.0;
};

/// <sigma_i^z> for every qubit.
std::vector<double> local_polarizations(const StateVector& state);

/// Current and kinetic expectations per coupled pair, in bond order.
BondObservables bond_observables(const StateVector& state, const ChainModel& model);

/// i<[H(t), j_b]> per bond (analytic d<j>/dt), via the full commutator.
std::vector<double> current_time_derivative(const StateVector& state, const ChainModel& model,
                                            std::span<const double> fields);

/// Partial trace over the other N-2 qubits.
TwoQubitRDM reduced_density_2q(const StateVector& state, int k, int l);

ConcurrenceSpectrum concurrence(const TwoQubitRDM& rdm);

/// Closed-form pairwise concurrence on the single-excitation manifold as a
/// functional of the sigma^z profile alone.  Requires N >= 3 and a profile
/// consistent with one flipped qubit (sum sigma = N-2 within 1e-9).
double entanglement_functional_single_excitation(std::span<const double> sigma_z, int k, int l);

/// Closed-form eigenvalues of rho*rho~ for states in the two-flipped-qubit
/// manifold, sorted descending.
std::array<double, 4> two_excitation_spectrum(const StateVector& state, int k, int l);

} // namespace qchain
