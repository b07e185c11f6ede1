#pragma once

#include <optional>

#include "mqdfs/pauli.hpp"

namespace mqdfs {

/// One spin-1/2 site. gamma_weight is the relative gyromagnetic ratio; spins
/// sharing a gamma_weight belong to the same RF channel.
struct Spin {
  std::string label;
  double gamma_weight = 1.0;
  double shift_hz = 0.0;
};

/// Coherence labels carrying their own transverse relaxation times.
/// "default" backs any label without an explicit entry.
inline const std::vector<std::string>& coherence_labels() {
  static const std::vector<std::string> kLabels = {"QQ",  "DQ1",    "DQ2",
                                                   "ZQ",  "SQ",     "default"};
  return kLabels;
}

/// A spin system: sites, symmetric J-coupling table (Hz), and per-coherence
/// T2 map (seconds). Immutable once built.
class SpinSystem {
 public:
  SpinSystem(std::vector<Spin> spins,
             std::vector<std::vector<double>> couplings,
             std::map<std::string, double> t2_map);

  std::size_t size() const { return spins_.size(); }
  const std::vector<Spin>& spins() const { return spins_; }
  const Spin& spin(std::size_t k) const { return spins_.at(k); }

  std::size_t index_of(const std::string& label) const;
  bool has_label(const std::string& label) const;

  double coupling(std::size_t a, std::size_t b) const;
  double coupling(const std::string& a, const std::string& b) const;
  const std::vector<std::vector<double>>& couplings() const {
    return couplings_;
  }

  const std::map<std::string, double>& t2_map() const { return t2_map_; }
  /// T2 for a coherence label, falling back to "default" (0.5 s if unset).
  double t2_for(const std::string& label) const;

  /// gamma_weights rounded to integers; throws if any weight is not integral
  /// within 1e-9. The integer convention drives exact gradient selection.
  std::vector<int> integer_gamma_weights() const;

  /// True iff a and b have equal shifts and equal couplings to every other
  /// spin: affected only collectively by any symmetric interaction.
  bool magnetically_equivalent(std::size_t a, std::size_t b) const;

  /// Maps a gamma-weighted coherence order to its T2 label for an SI3-M
  /// style system (labels S, I1..I3 present). Orders that match no named
  /// coherence, and systems without that structure, return "default".
  std::string coherence_label_for_order(int weighted_order) const;

 private:
  std::vector<Spin> spins_;
  std::vector<std::vector<double>> couplings_;
  std::map<std::string, double> t2_map_;
  std::map<std::string, std::size_t> index_;
};

/// Weak-coupling (secular) free-evolution generator, in rad/s:
///   H = sum_k 2 pi shift_k Iz_k + sum_{k<l} 2 pi J_kl Iz_k Iz_l.
/// Couplings between magnetically equivalent spins enter in the isotropic
/// form 2 pi J (IxIx + IyIy + IzIz): the secular truncation is invalid at
/// equal shifts, and the isotropic form is provably inert on operators
/// symmetric in the equivalent spins.
struct Hamiltonian {
  OperatorSum op;
  bool secular_only = true;
};

Hamiltonian build_hamiltonian(const SpinSystem& system);

/// 2 pi J (IxIx + IyIy + IzIz) between spins a and b, rad/s.
OperatorSum isotropic_coupling(std::size_t n_spins, std::size_t a,
                               std::size_t b, double j_hz);

// --- config format -----------------------------------------------------
//
// Line oriented; '#' comments. Directives:
//   spin <label> gamma=<int-or-rational> shift_hz=<float>
//   j <labelA> <labelB> <hz>
//   t2 <coherence-label> <seconds>
// Duplicate spins, duplicate or conflicting j lines, unknown directives and
// unknown t2 labels are rejected with the offending line number.

SpinSystem parse_spin_config(std::string_view text);
std::string serialize_spin_config(const SpinSystem& system);

/// The alanine 13CH3-12CH preset: S (carbon, gamma 1), I1..I3 and M (protons,
/// gamma 4), J_SI = 129.8 Hz, J_SM = 4.5 Hz, J_IM = 7.3 Hz, J = 0 within the
/// methyl, all shifts on resonance, T2 = 0.5 s throughout.
SpinSystem preset_alanine();

}  // namespace mqdfs
