#pragma once

#include "mqdfs/spin_system.hpp"

namespace mqdfs {

/// A density-operator deviation with a running time cursor.
struct StateOp {
  OperatorSum op;
  double time_cursor = 0.0;
};

/// An ideal RF pulse: rotation by `angle` about the transverse axis at
/// `phase` (0 = x, pi/2 = y) applied to every target spin index.
struct PulseEvent {
  std::vector<std::size_t> targets;
  double angle = 0.0;
  double phase = 0.0;
};

/// Parses "x", "y", "-x", "-y" or a number in degrees into a phase angle.
double parse_phase_axis(const std::string& token);

/// rho -> U rho U', U = exp(-i H t), via eigendecomposition of the dense
/// Hermitian matrix; the result is projected back onto the Pauli basis.
/// The ground-truth backend.
StateOp evolve_dense(const StateOp& state, const Hamiltonian& h, double t);

/// Term-by-term product-operator evolution, exact for commuting Z-string
/// generators. Throws std::domain_error when H carries any transverse
/// letter (non-secular generator).
StateOp evolve_analytic(const StateOp& state, const Hamiltonian& h, double t);

/// Picks evolve_analytic when the Hamiltonian is secular, else dense.
StateOp evolve(const StateOp& state, const Hamiltonian& h, double t);

/// rho -> R rho R'. Angles and phases on the 90-degree grid go through the
/// exact symbolic letter rotation; anything else takes the dense route.
StateOp apply_pulse(const StateOp& state, const PulseEvent& pulse);

/// Eq-7-style phenomenological decay: the state is split by gamma-weighted
/// coherence order, each component scaled by exp(-dt / T2(label)) with the
/// label taken from the system's order classification, then recombined.
StateOp apply_relaxation(const StateOp& state, const SpinSystem& system,
                         double dt);

// --- small constructors used across tests and the simulator ---------------

/// Product operator like 2^{w-1} Ia Ib ... on the listed spins: a single
/// Pauli string with coefficient 1/2.
OperatorSum product_operator(std::size_t n_spins,
                             const std::vector<std::pair<std::size_t, Pauli>>&
                                 factors,
                             double scale = 1.0);

/// Iz on one spin (coefficient 1/2 Z).
OperatorSum single_spin_op(std::size_t n_spins, std::size_t k, Pauli letter);

}  // namespace mqdfs
