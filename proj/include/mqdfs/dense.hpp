#pragma once

#include <Eigen/Dense>

#include "mqdfs/pauli.hpp"

namespace mqdfs {

using Matrix = Eigen::MatrixXcd;

/// Largest spin count to_matrix will realize (2^12 x 2^12).
inline constexpr std::size_t kMaxDenseSpins = 12;

/// Kronecker-product realization of a single string. Spin 0 is the leftmost
/// factor, i.e. the most significant bit of the basis index.
Matrix to_matrix(const PauliString& p);

/// Linear in coefficients; to_matrix(identity) is the identity matrix.
/// Throws std::length_error above kMaxDenseSpins.
Matrix to_matrix(const OperatorSum& op);

/// Tr(P * m) evaluated through the one-nonzero-per-row structure of P,
/// O(2^n) instead of a matrix product.
Complex trace_with_pauli(const PauliString& p, const Matrix& m);

/// Expands a 2^n x 2^n matrix in the Pauli basis:
/// op = sum_P Tr(P m)/2^n * P. Inverse of to_matrix.
OperatorSum pauli_project(const Matrix& m, std::size_t n_spins);

}  // namespace mqdfs
