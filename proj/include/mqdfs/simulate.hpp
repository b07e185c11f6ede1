#pragma once

#include <optional>

#include "mqdfs/dfs.hpp"
#include "mqdfs/pathway.hpp"
#include "mqdfs/sequence.hpp"

namespace mqdfs {

/// Acquired 2D data: complex t2 FIDs stacked over cosine-modulated t1
/// increments. Row-major [t1][t2].
struct Raw2D {
  std::size_t n_t1 = 0;
  std::size_t n_t2 = 0;
  double t1_dwell = 0.0;  // seconds
  double t2_dwell = 0.0;  // seconds
  std::vector<Complex> grid;

  Complex at(std::size_t k, std::size_t j) const { return grid[k * n_t2 + j]; }
};

/// Magnitude spectrum with axis vectors in Hz. Row-major [f1][f2].
struct Spectrum2D {
  std::size_t n_f1 = 0;
  std::size_t n_f2 = 0;
  std::vector<double> f1_hz;
  std::vector<double> f2_hz;
  std::vector<double> magnitude;

  double at(std::size_t i, std::size_t j) const {
    return magnitude[i * n_f2 + j];
  }
};

struct Peak {
  double f1_hz = 0.0;
  double f2_hz = 0.0;
  double amplitude = 0.0;  // normalized to the global maximum
};

using PeakList = std::vector<Peak>;

enum class GradMode { kExact, kEnsemble };

struct RunOptions {
  std::size_t t1_points = 64;
  double t1_sw_hz = 30.0;
  std::optional<std::size_t> t2_points;  // overrides the acquire line
  GradMode grad_mode = GradMode::kExact;
  std::size_t nz = 1024;
  GradientSampling sampling = GradientSampling::kUniform;
  std::uint64_t seed = 0;
  std::optional<std::string> inject;  // letters applied at position c
  bool relaxation = true;
  bool dense_backend = false;  // force the dense evolution oracle
  std::size_t threads = 0;     // 0 = hardware concurrency
};

/// Resolves a selective pulse target token: an exact spin label, or a label
/// group prefix whose remainder is numeric (I -> I1, I2, I3).
std::vector<std::size_t> resolve_targets(const SpinSystem& system,
                                         const std::string& token);

/// Resolves a hard channel token: all spins sharing a gamma weight with any
/// selectively matched spin (a band pulse hits the whole nuclide).
std::vector<std::size_t> resolve_channel(const SpinSystem& system,
                                         const std::vector<std::string>& tokens);

/// Named ideal operators for `prepare` lines, embedded into the system by
/// the labels I1, I2, I3, S: "highest" (8 IxIyIySy), "qq"/"dq1"/"dq2"/"zq"
/// (normalized order projections), "rho1".."rho4" (logical basis), "cohsum"
/// (equal-weight sum of the four projections), "sz", "zzzz", "thermal".
OperatorSum resolve_named_operator(const SpinSystem& system,
                                   const std::string& name);

/// Executes the events before the first gradient: the preparation block.
/// The sequence-correctness anchor compares this against highest_state().
StateOp state_before_encode(const SpinSystem& system,
                            const PulseSequence& seq,
                            const RunOptions& options = {});

/// Runs the full experiment over the t1 x t2 grid.
Raw2D run_sequence(const SpinSystem& system, const PulseSequence& seq,
                   const RunOptions& options = {});

/// The per-coherence evolution law during t1: cos(pi (a J_IM +/- b J_SM) t1)
/// times exp(-t1 / T2(label)), with (a, b) = (3,+1), (3,-1), (1,+1), (1,-1)
/// for QQ, DQ1, DQ2, ZQ.
double signal_model_eq7(const std::string& label, double t1,
                        const SpinSystem& system, bool relax = true);

/// Ideal-preparation echo experiment: prepares the named order-pure
/// coherence, evolves t1/2, applies hard 180 pulses on every channel,
/// evolves t1/2, relaxes, and projects back onto the prepared operator.
/// Matches signal_model_eq7 pointwise.
std::vector<double> run_interferogram(const SpinSystem& system,
                                      const std::string& label,
                                      std::size_t t1_points, double t1_sw_hz,
                                      bool relax = true, bool dense = true);

/// The direct-dimension stage alone: every row apodized with
/// w2(j) = cos(pi j / (2 n_t2)), transformed by a unitary FFT and centered.
/// Unitarity makes this stage energy preserving row by row.
std::vector<Complex> t2_spectrum_rows(const Raw2D& raw);

/// Cosine window + x4 zero-fill + cosine transform in t1 on top of
/// t2_spectrum_rows, magnitude output.
Spectrum2D process_2d(const Raw2D& raw);

/// Local maxima above threshold_fraction * global max, refined by parabolic
/// interpolation, sorted by amplitude descending.
PeakList peak_pick(const Spectrum2D& spec, double threshold_fraction = 0.05);

struct CompareReport {
  double max_rel_diff = 0.0;
  double tol = 0.0;
  bool pass = false;
};

/// Max |a - b| / max|a| over the grid; PASS iff within tol. Throws on
/// mismatched grids.
CompareReport compare_spectra(const Spectrum2D& a, const Spectrum2D& b,
                              double tol);

/// Largest magnitude in the band |f1 - center| <= half_width, any f2.
double f1_band_max(const Spectrum2D& spec, double center_hz,
                   double half_width_hz);

/// Pathway leakage diagnostic: least-squares fit of the strongest t2
/// column's t1 modulation onto the cos/sin quadrature pair of each named
/// coherence frequency (with the matching decay envelope). Returns the
/// quadrature amplitude per label; a clean DQ2 selection leaves QQ, DQ1 and
/// ZQ at numerical zero.
std::map<std::string, double> modulation_amplitudes(const Raw2D& raw,
                                                    const SpinSystem& system,
                                                    bool relax = true);

}  // namespace mqdfs
