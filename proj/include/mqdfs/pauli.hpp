#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mqdfs {

using Complex = std::complex<double>;

/// Single-spin Pauli letter. E is the 2x2 identity.
enum class Pauli : std::uint8_t { E = 0, X = 1, Y = 2, Z = 3 };

char pauli_char(Pauli p);
Pauli pauli_from_char(char c);

/// A tensor product of single-spin Pauli letters over a fixed number of
/// spins. Immutable after construction. The all-E string is the
/// multiplicative identity; every string squares to the identity.
class PauliString {
 public:
  explicit PauliString(std::vector<Pauli> letters);

  static PauliString identity(std::size_t n_spins);

  /// Parses a letter string such as "XYEZ". Throws std::invalid_argument on
  /// any character outside {E, X, Y, Z}.
  static PauliString from_letters(std::string_view text);

  std::size_t size() const { return letters_.size(); }
  Pauli at(std::size_t k) const { return letters_.at(k); }
  const std::vector<Pauli>& letters() const { return letters_; }

  bool is_identity() const;

  /// Number of non-identity letters.
  std::size_t weight() const;

  /// True iff the two strings commute as operators. Distinct non-identity
  /// letters on the same spin anticommute; the strings anticommute iff the
  /// number of such positions is odd.
  bool commutes_with(const PauliString& other) const;

  /// Returns a copy with `letter` placed at position k.
  PauliString with_letter(std::size_t k, Pauli letter) const;

  std::string str() const;

  bool operator==(const PauliString& other) const = default;
  /// Lexicographic on letters (E < X < Y < Z); the canonical term order.
  bool operator<(const PauliString& other) const {
    return letters_ < other.letters_;
  }

 private:
  std::vector<Pauli> letters_;
};

/// Result of multiplying two Pauli strings: a*b = phase * string with
/// phase in {1, i, -1, -i}.
struct PauliProduct {
  Complex phase;
  PauliString string;
};

/// Pauli group multiplication, spin-wise. Throws on length mismatch.
PauliProduct pauli_product(const PauliString& a, const PauliString& b);

/// A linear combination of Pauli strings with complex coefficients; the
/// carrier for states, Hamiltonians and observables. Terms are held in
/// canonical (lexicographic) order and coefficients below kCoeffEpsilon are
/// dropped, so equal operators serialize identically.
class OperatorSum {
 public:
  /// Magnitude below which a coefficient is treated as zero. Large enough
  /// to absorb round-trip float dust, small enough to keep the dyadic
  /// rational coefficients of product-operator algebra exact.
  static constexpr double kCoeffEpsilon = 1e-14;

  explicit OperatorSum(std::size_t n_spins);
  OperatorSum(std::size_t n_spins,
              std::initializer_list<std::pair<PauliString, Complex>> terms);

  static OperatorSum zero(std::size_t n_spins) { return OperatorSum(n_spins); }
  static OperatorSum identity(std::size_t n_spins);

  /// The operator c * P for a single string.
  static OperatorSum single(const PauliString& p, Complex c = 1.0);

  std::size_t n_spins() const { return n_spins_; }
  std::size_t n_terms() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  const std::map<PauliString, Complex>& terms() const { return terms_; }

  /// Coefficient of `p`, zero if absent.
  Complex coefficient(const PauliString& p) const;

  void add_term(const PauliString& p, Complex c);

  OperatorSum& operator+=(const OperatorSum& other);
  OperatorSum& operator-=(const OperatorSum& other);
  OperatorSum& operator*=(Complex scale);

  friend OperatorSum operator+(OperatorSum a, const OperatorSum& b) {
    a += b;
    return a;
  }
  friend OperatorSum operator-(OperatorSum a, const OperatorSum& b) {
    a -= b;
    return a;
  }
  friend OperatorSum operator*(Complex s, OperatorSum a) {
    a *= s;
    return a;
  }
  friend OperatorSum operator*(OperatorSum a, Complex s) {
    a *= s;
    return a;
  }

  /// Operator product, expanding term by term through pauli_product.
  friend OperatorSum operator*(const OperatorSum& a, const OperatorSum& b);

  bool operator==(const OperatorSum& other) const = default;

  OperatorSum adjoint() const;

  /// All stored coefficients real: sufficient and necessary because Pauli
  /// strings are Hermitian and trace-orthogonal.
  bool is_hermitian(double tol = kCoeffEpsilon) const;

  /// Sum of |coefficient|^2 == hs_inner(a, a) by Parseval on the Pauli basis.
  double norm_squared() const;
  double norm() const;

  std::string str() const;

 private:
  std::size_t n_spins_;
  std::map<PauliString, Complex> terms_;
};

/// p * rho * p. Each term maps to +/- itself by commutation, so the result
/// has the same strings with possibly flipped signs. Involutive.
OperatorSum conjugate_by_pauli(const OperatorSum& rho, const PauliString& p);

/// Hilbert-Schmidt inner product Tr(a† b) / 2^n. Equals the coefficient-wise
/// inner product because distinct Pauli strings are trace-orthogonal and
/// each satisfies Tr(P†P) = 2^n.
Complex hs_inner(const OperatorSum& a, const OperatorSum& b);

/// HS distance min over unit phase: || a - e^{i t} b ||, the natural
/// state-equality metric for density-operator deviations.
double hs_distance_up_to_phase(const OperatorSum& a, const OperatorSum& b);

// --- text serialization -----------------------------------------------------
//
// One term per line: "<coeff_re> <coeff_im> <letters>", canonical term order,
// '#' starts a comment. Example: "0.5 0 XYEZ".

std::string serialize_operator(const OperatorSum& op);
OperatorSum parse_operator(std::string_view text);

/// Multi-operator files: operators separated by lines containing "---".
std::vector<OperatorSum> parse_operator_list(std::string_view text);

}  // namespace mqdfs
