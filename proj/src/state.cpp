#include "qchain/state.hpp"

#include <cmath>

#include "qchain/errors.hpp"

namespace qchain {

double StateVector::norm() const {
    double s = 0.0;
    for (const auto& a : amps) s += std::norm(a);
    return std::sqrt(s);
}

void StateVector::normalize() {
    const double n = norm();
    if (!(n > 0.0) || !std::isfinite(n))
        throw ValidationError("cannot normalize a state with zero or non-finite norm");
    for (auto& a : amps) a /= n;
}

std::size_t basis_index(std::string_view label) {
    std::size_t b = 0;
    for (std::size_t j = 0; j < label.size(); ++j) {
        if (label[j] == '1')
            b |= std::size_t{1} << j;
        else if (label[j] != '0')
            throw ValidationError("basis label must contain only '0'/'1', got \"" +
                                  std::string(label) + "\"");
    }
    return b;
}

std::string basis_label(std::size_t index, int n_qubits) {
    std::string s(static_cast<std::size_t>(n_qubits), '0');
    for (int j = 0; j < n_qubits; ++j)
        if ((index >> j) & 1u) s[static_cast<std::size_t>(j)] = '1';
    return s;
}

} // namespace qchain
