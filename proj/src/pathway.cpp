#include "mqdfs/pathway.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace mqdfs {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

StateOp gradient_filter(const StateOp& state, const std::set<int>& keep,
                        const std::vector<int>& weights) {
  return {project_orders(state.op, weights, keep), state.time_cursor};
}

bool surviving_ratio(const GradientEvent& ge, const GradientEvent& gd,
                     int mq_order, int det_order) {
  return ge.strength * mq_order + gd.strength * det_order == 0.0;
}

std::set<int> rephasable_orders(const GradientEvent& ge,
                                const GradientEvent& gd, int det_order,
                                const std::set<int>& candidate_orders) {
  std::set<int> keep;
  for (int p : candidate_orders) {
    if (surviving_ratio(ge, gd, p, det_order) ||
        surviving_ratio(ge, gd, p, -det_order)) {
      keep.insert(p);
    }
  }
  return keep;
}

PathwaySelection select_pathways(const GradientEvent& ge,
                                 const GradientEvent& gd, int det_order,
                                 const std::set<int>& candidate_orders) {
  return {rephasable_orders(ge, gd, det_order, candidate_orders), det_order};
}

StateOp gradient_phase_at(const StateOp& state, const GradientEvent& g,
                          const std::vector<int>& weights, double z) {
  if (!std::isfinite(g.strength)) {
    throw std::invalid_argument("gradient strength must be finite");
  }
  if (g.strength == 0.0) return state;
  CoherenceDecomposition decomp = coherence_decompose(state.op, weights);
  OperatorSum out(state.op.n_spins());
  for (const auto& [order, comp] : decomp.components()) {
    Complex phase = std::exp(kI * (order * g.strength * kTwoPi * z));
    out += phase * comp;
  }
  return {std::move(out), state.time_cursor};
}

std::vector<double> ensemble_positions(std::size_t nz,
                                       GradientSampling sampling,
                                       std::uint64_t seed) {
  if (nz < 2) throw std::invalid_argument("ensemble needs nz >= 2");
  double offset = 0.5;
  if (sampling == GradientSampling::kRandomOffset) {
    std::mt19937_64 rng(seed);
    offset = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  }
  std::vector<double> zs(nz);
  for (std::size_t j = 0; j < nz; ++j) {
    zs[j] = -0.5 + (static_cast<double>(j) + offset) / static_cast<double>(nz);
  }
  return zs;
}

StateOp ensemble_gradient(const StateOp& state, const GradientEvent& g,
                          const std::vector<int>& weights, std::size_t nz,
                          GradientSampling sampling, std::uint64_t seed) {
  if (g.strength == 0.0) return state;
  CoherenceDecomposition decomp = coherence_decompose(state.op, weights);
  const std::vector<double> zs = ensemble_positions(nz, sampling, seed);
  OperatorSum out(state.op.n_spins());
  for (const auto& [order, comp] : decomp.components()) {
    Complex avg{0.0, 0.0};
    for (double z : zs) {
      avg += std::exp(kI * (order * g.strength * kTwoPi * z));
    }
    avg /= static_cast<double>(nz);
    if (std::abs(avg) >= OperatorSum::kCoeffEpsilon) out += avg * comp;
  }
  return {std::move(out), state.time_cursor};
}

Complex ensemble_kernel(const GradientEvent& ge, const GradientEvent& gd,
                        int pe, int pd, std::size_t nz,
                        GradientSampling sampling, std::uint64_t seed) {
  const double k = pe * ge.strength + pd * gd.strength;
  const std::vector<double> zs = ensemble_positions(nz, sampling, seed);
  Complex avg{0.0, 0.0};
  for (double z : zs) avg += std::exp(kI * (k * kTwoPi * z));
  return avg / static_cast<double>(nz);
}

}  // namespace mqdfs
