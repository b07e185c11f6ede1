#include "mqdfs/coherence.hpp"

#include <stdexcept>

namespace mqdfs {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_weights(std::size_t n_spins, const std::vector<int>& weights) {
  if (weights.size() != n_spins) {
    throw std::invalid_argument("weights length must equal spin count");
  }
  for (int w : weights) {
    if (w <= 0) throw std::invalid_argument("weights must be positive");
  }
}

}  // namespace

CoherenceDecomposition::CoherenceDecomposition(
    std::size_t n_spins, std::map<int, OperatorSum> components)
    : n_spins_(n_spins), components_(std::move(components)) {}

OperatorSum CoherenceDecomposition::component(int order) const {
  auto it = components_.find(order);
  return it == components_.end() ? OperatorSum::zero(n_spins_) : it->second;
}

std::set<int> CoherenceDecomposition::orders() const {
  std::set<int> out;
  for (const auto& [order, comp] : components_) out.insert(order);
  return out;
}

OperatorSum CoherenceDecomposition::reassemble() const {
  OperatorSum total(n_spins_);
  for (const auto& [order, comp] : components_) total += comp;
  return total;
}

std::vector<int> plain_weights(std::size_t n_spins) {
  return std::vector<int>(n_spins, 1);
}

CoherenceDecomposition coherence_decompose(const OperatorSum& rho,
                                           const std::vector<int>& weights) {
  check_weights(rho.n_spins(), weights);
  std::map<int, OperatorSum> components;

  for (const auto& [string, coeff] : rho.terms()) {
    // Transverse positions branch into sigma+/sigma-; E and Z stay order 0.
    std::vector<std::size_t> transverse;
    for (std::size_t k = 0; k < string.size(); ++k) {
      if (string.at(k) == Pauli::X || string.at(k) == Pauli::Y) {
        transverse.push_back(k);
      }
    }
    const std::size_t nt = transverse.size();
    const std::size_t n_patterns = std::size_t{1} << nt;
    // X = sigma+ + sigma-,  Y = -i sigma+ + i sigma-.
    // A ladder pattern (bit b=0 -> sigma+, b=1 -> sigma-) re-expands as
    // sigma+/- = (X +/- iY)/2, so each pattern contributes 2^nt strings.
    for (std::size_t pattern = 0; pattern < n_patterns; ++pattern) {
      Complex pattern_coeff = coeff;
      int order = 0;
      for (std::size_t t = 0; t < nt; ++t) {
        bool lowering = (pattern >> t) & 1;
        int sign = lowering ? -1 : +1;
        order += sign * weights[transverse[t]];
        if (string.at(transverse[t]) == Pauli::Y) {
          pattern_coeff *= -kI * static_cast<double>(sign);
        }
      }
      auto [it, inserted] =
          components.try_emplace(order, OperatorSum::zero(rho.n_spins()));
      OperatorSum& target = it->second;
      const double half_pow = 1.0 / static_cast<double>(n_patterns);
      for (std::size_t subset = 0; subset < n_patterns; ++subset) {
        Complex c = pattern_coeff * half_pow;
        std::vector<Pauli> letters = string.letters();
        for (std::size_t t = 0; t < nt; ++t) {
          bool take_y = (subset >> t) & 1;
          bool lowering = (pattern >> t) & 1;
          if (take_y) {
            letters[transverse[t]] = Pauli::Y;
            c *= lowering ? -kI : kI;
          } else {
            letters[transverse[t]] = Pauli::X;
          }
        }
        target.add_term(PauliString(std::move(letters)), c);
      }
    }
  }

  // Drop components that cancelled to zero.
  for (auto it = components.begin(); it != components.end();) {
    it = it->second.is_zero() ? components.erase(it) : std::next(it);
  }
  return CoherenceDecomposition(rho.n_spins(), std::move(components));
}

OperatorSum project_orders(const OperatorSum& rho,
                           const std::vector<int>& weights,
                           const std::set<int>& keep) {
  CoherenceDecomposition decomp = coherence_decompose(rho, weights);
  OperatorSum out(rho.n_spins());
  for (const auto& [order, comp] : decomp.components()) {
    if (keep.count(order)) out += comp;
  }
  return out;
}

}  // namespace mqdfs
