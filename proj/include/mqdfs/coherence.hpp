#pragma once

#include <set>

#include "mqdfs/pauli.hpp"

namespace mqdfs {

/// An operator split by coherence order: for each term, every spin is
/// expanded in the ladder basis {E, Z, sigma+, sigma-} and the pattern is
/// classified by the weighted order sum(w_k * p_k), p_k in {+1, 0, -1}.
/// Components sum back to the input exactly.
class CoherenceDecomposition {
 public:
  CoherenceDecomposition(std::size_t n_spins,
                         std::map<int, OperatorSum> components);

  const std::map<int, OperatorSum>& components() const { return components_; }

  /// Component at `order`; zero operator if absent.
  OperatorSum component(int order) const;

  std::set<int> orders() const;

  /// Sum of all components; equals the decomposed operator.
  OperatorSum reassemble() const;

 private:
  std::size_t n_spins_;
  std::map<int, OperatorSum> components_;
};

/// All-ones weights: plain coherence order.
std::vector<int> plain_weights(std::size_t n_spins);

/// Splits rho by weighted coherence order. Weights must be positive, one per
/// spin. The gamma-weighted convention feeds gradient selection; plain
/// weights give the textbook order.
CoherenceDecomposition coherence_decompose(const OperatorSum& rho,
                                           const std::vector<int>& weights);

/// Keeps only the components whose order lies in `keep`. A projection:
/// idempotent, and the identity when `keep` covers every present order.
OperatorSum project_orders(const OperatorSum& rho,
                           const std::vector<int>& weights,
                           const std::set<int>& keep);

}  // namespace mqdfs
