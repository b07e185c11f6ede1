#pragma once

#include <array>

#include "mqdfs/coherence.hpp"
#include "mqdfs/pauli.hpp"

namespace mqdfs {

/// The four-spin workspace of the DFS constructions: spins ordered
/// (I1, I2, I3, S), so "XXXY" acts X on the three protons and Y on carbon.
inline constexpr std::size_t kDfsSpins = 4;
inline constexpr std::size_t kProtonCount = 3;

/// gamma weights in the integer 4:1 proton:carbon convention.
std::vector<int> dfs_gamma_weights();

/// The highest multiple-quantum state 8 Ix Iy Iy Sy: the single Pauli
/// string XYYY with coefficient 1/2.
OperatorSum highest_state();

/// The four MQ coherence operators with their tabulated coefficient
/// patterns (3,-3,-1,1), (3,3,-1,-1), (1,1,1,1), (1,-1,1,-1) on the strings
/// XYYY, XXYX, XXXY, YYYX, scaled by 1/16. They sum to highest_state()
/// exactly. Taken literally these are not coherence-order pure; see
/// coherence_projection for the order-pure counterparts.
std::array<OperatorSum, 4> mq_coherences();

const std::array<std::string, 4>& mq_labels();  // QQ, DQ1, DQ2, ZQ

/// gamma-weighted orders of each named coherence in the 4:1 convention:
/// QQ +/-13, DQ1 +/-11, DQ2 +/-5, ZQ +/-3.
std::set<int> weighted_orders_for(const std::string& label);

/// The gamma-weighted order projection of the highest state onto one named
/// coherence; order-pure by construction, so it evolves at the single
/// remote-coupling frequency of its label. Optionally HS-normalized.
OperatorSum coherence_projection(const std::string& label,
                                 bool normalized = true);

/// The logical basis: the modified MQ coherences with sign patterns
/// (1,-1,-1,1), (1,1,-1,-1), (1,1,1,1), (1,-1,1,-1), HS-normalized.
/// Pairwise orthogonal, Hermitian and traceless.
struct LogicalBasis {
  std::array<OperatorSum, 4> rho;
  std::array<std::string, 4> labels;
};

LogicalBasis logical_basis();

/// Collective (En) and forbidden single/partial-spin (Em) error families.
struct ErrorFamily {
  std::string tag;  // "En" or "Em"
  std::vector<PauliString> members;
};

ErrorFamily error_family(const std::string& tag);

enum class EigenSign { kPlus, kMinus, kNotEigen };

std::string eigen_sign_str(EigenSign sign);

/// +1 / -1 when conjugation by p maps rho exactly to +/- rho; kNotEigen
/// otherwise. Exact: Pauli conjugation only flips term signs.
EigenSign eigenoperator_check(const OperatorSum& rho, const PauliString& p);

/// True iff p is fixed by every permutation of the given positions.
bool permutation_symmetric(const PauliString& p,
                           const std::vector<std::size_t>& protons);

/// The two-physical-qubit warm-up: Bell-type logical states, their
/// product-operator expansion, invariance under X1X2 / Z1Z2 conjugation and
/// the coherence-order split of the |0>_L projector.
struct TwoQubitDemo {
  bool eq_projector_expansion_exact = false;
  bool xx_invariant = false;
  bool zz_invariant = false;
  bool states_orthonormal = false;
  OperatorSum projector0{2};        // |0>_L <0| in Pauli form
  std::set<int> projector0_orders;  // plain coherence orders present
  std::string order_label_note;
};

TwoQubitDemo two_qubit_dfs_demo();

/// Structured verification results: one named PASS/FAIL line per check plus
/// free-form notes. Rendered as "CHECK <name> PASS|FAIL <detail>" lines and
/// a NOTE section; deterministic ordering.
struct DfsReport {
  struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
  };

  std::vector<Check> checks;
  std::vector<std::string> notes;
  std::array<std::array<Complex, 4>, 4> orthogonality{};
  std::map<std::pair<std::size_t, std::string>, EigenSign> eigen_signs;
  std::map<std::string, bool> permutation_symmetric_by_member;

  bool all_pass() const;
  std::string render() const;
};

/// Runs the verification suite on a basis (normally logical_basis(), or an
/// externally supplied one for negative controls). `family` selects which
/// error families to sweep: "en", "em" or "all".
DfsReport dfs_report(const LogicalBasis& basis,
                     const std::string& family = "all");

}  // namespace mqdfs
