#pragma once

#include "mqdfs/coherence.hpp"
#include "mqdfs/dynamics.hpp"

namespace mqdfs {

/// A pulsed field gradient; strength and duration are folded into one
/// dimensionless area (only ratios are ever used).
struct GradientEvent {
  double strength = 0.0;
};

/// z-position sampling for the ensemble gradient model.
enum class GradientSampling {
  kUniform,       // z_j = -1/2 + (j + 1/2) / nz
  kRandomOffset,  // the uniform lattice with one seeded random translation
};

/// Zeroes every coherence component whose gamma-weighted order is not in
/// `keep`. A projection: idempotent, exact.
StateOp gradient_filter(const StateOp& state, const std::set<int>& keep,
                        const std::vector<int>& weights);

/// Ideal rephasing condition: a pathway that holds order `mq_order` across
/// the encode gradient and `det_order` across the decode gradient survives
/// iff ge * mq_order + gd * det_order == 0.
bool surviving_ratio(const GradientEvent& ge, const GradientEvent& gd,
                     int mq_order, int det_order);

/// A selected coherence-transfer pathway: the orders admitted through the
/// encode gradient and the single-quantum order of the detected channel.
struct PathwaySelection {
  std::set<int> encode_orders;
  int detect_order = 0;
};

/// The encode orders that can rephase onto +/-`det_order` for this gradient
/// pair. Empty `ge`/`gd` strengths admit every order (gradients disabled).
std::set<int> rephasable_orders(const GradientEvent& ge,
                                const GradientEvent& gd, int det_order,
                                const std::set<int>& candidate_orders);

/// Bundles rephasable_orders with its detection order.
PathwaySelection select_pathways(const GradientEvent& ge,
                                 const GradientEvent& gd, int det_order,
                                 const std::set<int>& candidate_orders);

/// Applies the gradient phase exp(i * order * strength * 2 pi z) to each
/// coherence component at one molecular position z.
StateOp gradient_phase_at(const StateOp& state, const GradientEvent& g,
                          const std::vector<int>& weights, double z);

/// Ensemble average of gradient_phase_at over nz positions z in [-1/2, 1/2].
/// For a single gradient this dephases every nonzero order; composing
/// encode/decode at a shared z (see ensemble_kernel) converges to
/// gradient_filter of the rephased orders.
StateOp ensemble_gradient(const StateOp& state, const GradientEvent& g,
                          const std::vector<int>& weights, std::size_t nz,
                          GradientSampling sampling = GradientSampling::kUniform,
                          std::uint64_t seed = 0);

/// Average over the shared z ensemble of the phase picked up by a pathway
/// that is at order pe across the encode gradient and pd across the decode
/// gradient: (1/nz) sum_j exp(i 2 pi (pe ge + pd gd) z_j). The surviving
/// pathway has kernel 1; with uniform sampling every integer mismatch k not
/// divisible by nz cancels exactly.
Complex ensemble_kernel(const GradientEvent& ge, const GradientEvent& gd,
                        int pe, int pd, std::size_t nz,
                        GradientSampling sampling = GradientSampling::kUniform,
                        std::uint64_t seed = 0);

/// z positions used by the ensemble model; exposed for convergence studies.
std::vector<double> ensemble_positions(std::size_t nz,
                                       GradientSampling sampling,
                                       std::uint64_t seed);

}  // namespace mqdfs
