#include "qchain/observables.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <bit>
#include <cmath>

#include "qchain/errors.hpp"

namespace qchain {

std::vector<double> local_polarizations(const StateVector& state) {
    std::vector<double> out(state.n_qubits);
    for (int q = 1; q <= state.n_qubits; ++q) out[q - 1] = sigma_z_expectation(state, q);
    return out;
}

BondObservables bond_observables(const StateVector& state, const ChainModel& model) {
    BondObservables out;
    out.currents.reserve(model.bonds().size());
    out.kinetics.reserve(model.bonds().size());
    for (const auto& bd : model.bonds()) {
        out.currents.push_back(current_expectation(state, model, bd.k, bd.i));
        out.kinetics.push_back(kinetic_expectation(state, model, bd.k, bd.i));
    }
    return out;
}

std::vector<double> current_time_derivative(const StateVector& state, const ChainModel& model,
                                            std::span<const double> fields) {
    std::vector<double> out;
    out.reserve(model.bonds().size());
    for (const auto& bd : model.bonds())
        out.push_back(
            commutator_expectation(state, model, fields, HamiltonianPart::Full, bd.k, bd.i));
    return out;
}

TwoQubitRDM reduced_density_2q(const StateVector& state, int k, int l) {
    if (k == l) throw ValidationError("reduced_density_2q needs two distinct qubits");
    if (k < 1 || k > state.n_qubits || l < 1 || l > state.n_qubits)
        throw ValidationError("reduced_density_2q: qubit index out of range");
    const std::size_t mk = std::size_t{1} << (k - 1);
    const std::size_t ml = std::size_t{1} << (l - 1);
    const std::size_t pair_mask = mk | ml;

    TwoQubitRDM rdm;
    rdm.k = k;
    rdm.l = l;
    for (std::size_t b = 0; b < state.dim(); ++b) {
        if (state.amps[b] == Complex(0.0, 0.0)) continue;
        const int s1 = 2 * ((b & mk) ? 1 : 0) + ((b & ml) ? 1 : 0);
        const std::size_t rest = b & ~pair_mask;
        for (int s2 = 0; s2 < 4; ++s2) {
            std::size_t b2 = rest;
            if (s2 & 2) b2 |= mk;
            if (s2 & 1) b2 |= ml;
            rdm.at(s1, s2) += state.amps[b] * std::conj(state.amps[b2]);
        }
    }
    return rdm;
}

ConcurrenceSpectrum concurrence(const TwoQubitRDM& rdm) {
    using Matrix4c = Eigen::Matrix4cd;
    Matrix4c rho;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) rho(r, c) = rdm.at(r, c);
    // guard against roundoff asymmetry from the partial trace
    rho = 0.5 * (rho + rho.adjoint().eval());

    Eigen::SelfAdjointEigenSolver<Matrix4c> es(rho);
    if (es.info() != Eigen::Success)
        throw NumericalError("concurrence: eigendecomposition of the 2RDM failed");

    Matrix4c L = es.eigenvectors();
    for (int c = 0; c < 4; ++c) L.col(c) *= std::sqrt(std::max(es.eigenvalues()(c), 0.0));

    // spin-flip matrix sigma_y (x) sigma_y in the {00,01,10,11} basis
    Matrix4c S = Matrix4c::Zero();
    S(0, 3) = -1.0;
    S(1, 2) = 1.0;
    S(2, 1) = 1.0;
    S(3, 0) = -1.0;

    // W = L^T S L is complex symmetric, so conj(W) W = W^dag W and the
    // eigenvalues of rho*rho~ are the squared singular values of W.
    const Matrix4c W = L.transpose() * S * L;
    Eigen::JacobiSVD<Matrix4c> svd(W);
    const auto& s = svd.singularValues(); // sorted descending

    ConcurrenceSpectrum out;
    for (int j = 0; j < 4; ++j) out.lambdas[j] = s(j) * s(j);
    out.concurrence = std::max(0.0, s(0) - s(1) - s(2) - s(3));
    return out;
}

double entanglement_functional_single_excitation(std::span<const double> sigma_z, int k, int l) {
    const int n = static_cast<int>(sigma_z.size());
    if (n < 3) throw ValidationError("entanglement functional requires N >= 3");
    if (k == l || k < 1 || k > n || l < 1 || l > n)
        throw ValidationError("entanglement functional: bad qubit pair");

    constexpr double tol = 1e-9;
    double total = 0.0;
    for (double s : sigma_z) total += s;
    if (std::abs(total - static_cast<double>(n - 2)) > tol)
        throw ValidationError("sigma_z profile is not on the single-excitation manifold");
    for (double s : sigma_z) {
        const double p = 0.5 * (1.0 - s); // implied |a_i|^2
        if (p < -tol || p > 1.0 + tol)
            throw ValidationError("sigma_z profile implies an occupation outside [0,1]");
    }

    double prod = 1.0;
    for (int m : {k, l}) {
        double others = total - sigma_z[m - 1];
        double bracket = others - static_cast<double>(n - 3) * sigma_z[m - 1];
        prod *= std::sqrt(std::max(bracket, 0.0));
    }
    return prod / static_cast<double>(n - 2);
}

std::array<double, 4> two_excitation_spectrum(const StateVector& state, int k, int l) {
    const int n = state.n_qubits;
    if (k == l || k < 1 || k > n || l < 1 || l > n)
        throw ValidationError("two_excitation_spectrum: bad qubit pair");

    double outside = 0.0;
    for (std::size_t b = 0; b < state.dim(); ++b)
        if (std::popcount(b) != 2) outside += std::norm(state.amps[b]);
    if (std::sqrt(outside) > 1e-9)
        throw ValidationError("state is not on the two-excitation manifold");

    auto amp = [&](int a, int b) {
        return state.amps[(std::size_t{1} << (a - 1)) | (std::size_t{1} << (b - 1))];
    };

    double sum_l = 0.0, sum_k = 0.0, rest = 0.0;
    Complex coh(0.0, 0.0);
    for (int i = 1; i <= n; ++i) {
        if (i == k || i == l) continue;
        sum_l += std::norm(amp(l, i));
        sum_k += std::norm(amp(k, i));
        coh += amp(k, i) * std::conj(amp(l, i));
        for (int j = i + 1; j <= n; ++j)
            if (j != k && j != l) rest += std::norm(amp(i, j));
    }
    const double root = std::sqrt(sum_l * sum_k);
    const double phase = std::abs(coh);
    const double pair_occ = std::norm(amp(k, l));

    std::array<double, 4> lam = {(root + phase) * (root + phase), pair_occ * rest,
                                 pair_occ * rest, (root - phase) * (root - phase)};
    std::sort(lam.begin(), lam.end(), std::greater<double>());
    return lam;
}

} // namespace qchain
