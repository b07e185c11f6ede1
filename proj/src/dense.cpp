#include "mqdfs/dense.hpp"

namespace mqdfs {

namespace {

void check_dense_cap(std::size_t n_spins) {
  if (n_spins > kMaxDenseSpins) {
    throw std::length_error("dense realization capped at " +
                            std::to_string(kMaxDenseSpins) + " spins, got " +
                            std::to_string(n_spins));
  }
}

// Column index and entry of row r in the 2x2 letter matrix.
// E = [[1,0],[0,1]]  X = [[0,1],[1,0]]  Y = [[0,-i],[i,0]]  Z = [[1,0],[0,-1]]
inline void letter_entry(Pauli p, int bit, int& col_bit, Complex& value) {
  switch (p) {
    case Pauli::E: col_bit = bit; value = 1.0; return;
    case Pauli::X: col_bit = 1 - bit; value = 1.0; return;
    case Pauli::Y:
      col_bit = 1 - bit;
      value = bit == 0 ? Complex{0.0, -1.0} : Complex{0.0, 1.0};
      return;
    case Pauli::Z: col_bit = bit; value = bit == 0 ? 1.0 : -1.0; return;
  }
  throw std::logic_error("invalid Pauli letter");
}

// Row r of P has its single nonzero at column col(r) with value phase(r).
inline void pauli_row(const PauliString& p, Eigen::Index r, Eigen::Index& col,
                      Complex& value) {
  const std::size_t n = p.size();
  col = 0;
  value = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    int bit = static_cast<int>((r >> (n - 1 - k)) & 1);
    int col_bit = 0;
    Complex v;
    letter_entry(p.at(k), bit, col_bit, v);
    col = (col << 1) | col_bit;
    value *= v;
  }
}

}  // namespace

Matrix to_matrix(const PauliString& p) {
  check_dense_cap(p.size());
  const Eigen::Index dim = Eigen::Index{1} << p.size();
  Matrix m = Matrix::Zero(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    Eigen::Index col = 0;
    Complex value;
    pauli_row(p, r, col, value);
    m(r, col) = value;
  }
  return m;
}

Matrix to_matrix(const OperatorSum& op) {
  check_dense_cap(op.n_spins());
  const Eigen::Index dim = Eigen::Index{1} << op.n_spins();
  Matrix m = Matrix::Zero(dim, dim);
  for (const auto& [p, c] : op.terms()) {
    for (Eigen::Index r = 0; r < dim; ++r) {
      Eigen::Index col = 0;
      Complex value;
      pauli_row(p, r, col, value);
      m(r, col) += c * value;
    }
  }
  return m;
}

Complex trace_with_pauli(const PauliString& p, const Matrix& m) {
  const Eigen::Index dim = Eigen::Index{1} << p.size();
  if (m.rows() != dim || m.cols() != dim) {
    throw std::invalid_argument("trace_with_pauli: dimension mismatch");
  }
  Complex total{0.0, 0.0};
  for (Eigen::Index r = 0; r < dim; ++r) {
    Eigen::Index col = 0;
    Complex value;
    pauli_row(p, r, col, value);
    total += value * m(col, r);
  }
  return total;
}

OperatorSum pauli_project(const Matrix& m, std::size_t n_spins) {
  check_dense_cap(n_spins);
  const Eigen::Index dim = Eigen::Index{1} << n_spins;
  if (m.rows() != dim || m.cols() != dim) {
    throw std::invalid_argument("pauli_project: dimension mismatch");
  }
  const double scale = 1.0 / static_cast<double>(dim);
  OperatorSum op(n_spins);
  // Enumerate all 4^n strings by base-4 counting.
  std::vector<Pauli> letters(n_spins, Pauli::E);
  const std::size_t total = std::size_t{1} << (2 * n_spins);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t v = idx;
    for (std::size_t k = 0; k < n_spins; ++k) {
      letters[n_spins - 1 - k] = static_cast<Pauli>(v & 3);
      v >>= 2;
    }
    PauliString p(letters);
    Complex c = trace_with_pauli(p, m) * scale;
    if (std::abs(c) >= OperatorSum::kCoeffEpsilon) op.add_term(p, c);
  }
  return op;
}

}  // namespace mqdfs
