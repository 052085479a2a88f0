#pragma once

#include <span>

#include "qchain/model.hpp"
#include "qchain/state.hpp"

namespace qchain {

enum class PauliAxis { X, Y, Z };

/// Two-qubit operators attached to a coupled pair (k, i):
///   Current  = -2 Jperp (X_k Y_i - Y_k X_i)
///   Kinetic  =    Jperp (X_k X_i + Y_k Y_i)
///   XXplusYY =          (X_k X_i + Y_k Y_i)   (no coupling prefactor)
///   ZZ       =           Z_k Z_i              (no coupling prefactor)
enum class BondOperatorKind { Current, Kinetic, XXplusYY, ZZ };

enum class HamiltonianPart { TwoQubitOnly, LocalFieldsOnly, Full };

/// sigma_qubit^axis |state>.
StateVector apply_pauli(const StateVector& state, int qubit, PauliAxis axis);

/// Bond operator applied to the state; the pair order (k, i) fixes the sign
/// of the antisymmetric current operator.
StateVector apply_bond_operator(const StateVector& state, const ChainModel& model, int k, int i,
                                BondOperatorKind kind);

/// <state|op_image>.
Complex expectation(const StateVector& state, const StateVector& op_image);

double sigma_z_expectation(const StateVector& state, int qubit);
double kinetic_expectation(const StateVector& state, const ChainModel& model, int k, int i);
double current_expectation(const StateVector& state, const ChainModel& model, int k, int i);

/// i<[H_part, j_ki]> computed by direct operator application.  `fields` may be
/// empty for TwoQubitOnly and must have length N otherwise.
double commutator_expectation(const StateVector& state, const ChainModel& model,
                              std::span<const double> fields, HamiltonianPart part, int k, int i);

} // namespace qchain
