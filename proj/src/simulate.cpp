#include "mqdfs/simulate.hpp"

#include <fftw3.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <numeric>
#include <thread>

#include "mqdfs/dense.hpp"

namespace mqdfs {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

bool numeric_suffix(std::string_view label, std::string_view prefix) {
  if (label.size() <= prefix.size() || label.substr(0, prefix.size()) != prefix)
    return false;
  for (char c : label.substr(prefix.size())) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

std::vector<std::size_t> resolve_targets(const SpinSystem& system,
                                         const std::string& token) {
  if (system.has_label(token)) return {system.index_of(token)};
  std::vector<std::size_t> matched;
  for (std::size_t k = 0; k < system.size(); ++k) {
    if (numeric_suffix(system.spin(k).label, token)) matched.push_back(k);
  }
  if (matched.empty()) {
    throw std::invalid_argument("pulse target '" + token +
                                "' matches no spin label or group");
  }
  return matched;
}

std::vector<std::size_t> resolve_channel(
    const SpinSystem& system, const std::vector<std::string>& tokens) {
  std::set<double> gammas;
  for (const std::string& token : tokens) {
    for (std::size_t k : resolve_targets(system, token)) {
      gammas.insert(system.spin(k).gamma_weight);
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < system.size(); ++k) {
    if (gammas.count(system.spin(k).gamma_weight)) out.push_back(k);
  }
  return out;
}

namespace {

// Maps the four-spin workspace operators onto the system by label.
OperatorSum embed_dfs_operator(const SpinSystem& system,
                               const OperatorSum& op4) {
  const std::array<std::string, 4> labels = {"I1", "I2", "I3", "S"};
  std::array<std::size_t, 4> where{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (!system.has_label(labels[i])) {
      throw std::invalid_argument(
          "system lacks the SI3 labels (I1, I2, I3, S) needed to embed the "
          "named operator");
    }
    where[i] = system.index_of(labels[i]);
  }
  OperatorSum out(system.size());
  for (const auto& [p, c] : op4.terms()) {
    std::vector<Pauli> letters(system.size(), Pauli::E);
    for (std::size_t i = 0; i < 4; ++i) letters[where[i]] = p.at(i);
    out.add_term(PauliString(std::move(letters)), c);
  }
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

OperatorSum resolve_named_operator(const SpinSystem& system,
                                   const std::string& name) {
  const std::string key = lower(name);
  if (key == "thermal") {
    OperatorSum out(system.size());
    for (std::size_t k = 0; k < system.size(); ++k) {
      out += system.spin(k).gamma_weight *
             single_spin_op(system.size(), k, Pauli::Z);
    }
    return out;
  }
  if (key == "sz") {
    return single_spin_op(system.size(), system.index_of("S"), Pauli::Z);
  }
  if (key == "zzzz") {
    // 8 Iz Iz Iz Sz on the SI3 subsystem.
    return embed_dfs_operator(
        system, OperatorSum::single(PauliString::from_letters("ZZZZ"), 0.5));
  }
  if (key == "highest" || key == "8ixiyiysy") {
    return embed_dfs_operator(system, highest_state());
  }
  if (key == "qq" || key == "dq1" || key == "dq2" || key == "zq") {
    std::string label = key;
    std::transform(label.begin(), label.end(), label.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    return embed_dfs_operator(system, coherence_projection(label, true));
  }
  if (key == "cohsum") {
    OperatorSum sum(kDfsSpins);
    for (const std::string& label : mq_labels()) {
      sum += coherence_projection(label, true);
    }
    sum *= 1.0 / sum.norm();
    return embed_dfs_operator(system, sum);
  }
  if (key == "rho1" || key == "rho2" || key == "rho3" || key == "rho4") {
    std::size_t idx = static_cast<std::size_t>(key[3] - '1');
    return embed_dfs_operator(system, logical_basis().rho[idx]);
  }
  throw std::invalid_argument("unknown named operator '" + name + "'");
}

namespace {

// --- resolved program --------------------------------------------------

struct StepPulse {
  std::vector<std::size_t> targets;
  double angle;
  double phase;
};
struct StepDelay {
  double seconds;
};
struct StepEvolveHalf {
  bool last;  // relaxation for the whole t1 applied after the last half
};
struct StepInject {
  PauliString string;
};
struct StepPrepare {
  OperatorSum op;
};

using Step =
    std::variant<StepPulse, StepDelay, StepEvolveHalf, StepInject, StepPrepare>;

struct Program {
  std::vector<Step> pre;     // before the encode gradient
  std::vector<Step> middle;  // between the gradients
  std::vector<Step> post;    // after the decode gradient
  bool has_gradients = false;
  GradientEvent encode;
  GradientEvent decode;
  SeqAcquire acquire;
  std::vector<std::size_t> detect_spins;
  int detect_order = 0;  // gamma weight of the detected channel
  std::size_t evolve_events = 0;
};

PauliString pad_letters(const std::string& letters, std::size_t n) {
  std::string padded = letters;
  if (padded.size() > n) {
    throw std::invalid_argument("inject string longer than the spin system");
  }
  padded.append(n - padded.size(), 'E');
  return PauliString::from_letters(padded);
}

Program compile_sequence(const SpinSystem& system, const PulseSequence& seq,
                         const RunOptions& options) {
  Program prog;
  std::size_t grads_seen = 0;
  std::vector<double> strengths;
  for (const auto& event : seq.events) {
    if (const auto* g = std::get_if<SeqGradient>(&event)) {
      if (g->strength != 0.0) strengths.push_back(g->strength);
    }
  }
  if (strengths.size() == 1) {
    throw std::invalid_argument(
        "sequence needs both encode and decode gradients (or none)");
  }
  prog.has_gradients = strengths.size() == 2;
  if (prog.has_gradients) {
    prog.encode = GradientEvent{strengths[0]};
    prog.decode = GradientEvent{strengths[1]};
  }

  auto* stage = &prog.pre;
  std::size_t evolve_seen = 0;
  const std::size_t evolve_total = seq.evolve_count();

  for (const auto& event : seq.events) {
    if (const auto* p = std::get_if<SeqPulse>(&event)) {
      std::vector<std::size_t> targets =
          p->channel ? resolve_channel(system, p->targets)
                     : resolve_targets(system, p->targets.front());
      stage->push_back(StepPulse{std::move(targets), p->angle, p->phase});
    } else if (const auto* d = std::get_if<SeqDelay>(&event)) {
      stage->push_back(StepDelay{d->seconds});
    } else if (std::get_if<SeqEvolveT1Half>(&event)) {
      ++evolve_seen;
      stage->push_back(StepEvolveHalf{evolve_seen == evolve_total});
    } else if (const auto* i = std::get_if<SeqInject>(&event)) {
      stage->push_back(StepInject{pad_letters(i->letters, system.size())});
    } else if (const auto* pr = std::get_if<SeqPrepare>(&event)) {
      stage->push_back(StepPrepare{resolve_named_operator(system, pr->name)});
    } else if (const auto* g = std::get_if<SeqGradient>(&event)) {
      if (g->strength == 0.0) continue;  // a zero-area gradient is a no-op
      ++grads_seen;
      stage = grads_seen == 1 ? &prog.middle : &prog.post;
    } else if (const auto* a = std::get_if<SeqAcquire>(&event)) {
      prog.acquire = *a;
      if (options.t2_points) prog.acquire.points = *options.t2_points;
      prog.detect_spins = resolve_channel(system, {a->species});
    }
  }
  prog.evolve_events = evolve_total;

  if (prog.detect_spins.empty()) {
    throw std::invalid_argument("acquire species matches no spins");
  }
  double gamma = system.spin(prog.detect_spins.front()).gamma_weight;
  double rounded = std::round(gamma);
  if (std::abs(gamma - rounded) > 1e-9) {
    throw std::invalid_argument(
        "detected channel gamma weight must be an integer for pathway "
        "selection");
  }
  prog.detect_order = static_cast<int>(rounded);

  // Error injection at position c: right after the encode gradient, or at
  // the start of the evolution block when gradients are disabled.
  if (options.inject) {
    StepInject step{pad_letters(*options.inject, system.size())};
    if (prog.has_gradients) {
      prog.middle.insert(prog.middle.begin(), step);
    } else {
      auto it = std::find_if(prog.pre.begin(), prog.pre.end(),
                             [](const Step& s) {
                               return std::holds_alternative<StepEvolveHalf>(s);
                             });
      prog.pre.insert(it, step);
    }
  }
  return prog;
}

// --- execution ---------------------------------------------------------

struct RunContext {
  const SpinSystem* system;
  Hamiltonian h;
  bool dense;
  bool relaxation;
  double t1;
};

StateOp run_steps(StateOp state, const std::vector<Step>& steps,
                  const RunContext& ctx) {
  for (const Step& step : steps) {
    if (const auto* p = std::get_if<StepPulse>(&step)) {
      state = apply_pulse(state, PulseEvent{p->targets, p->angle, p->phase});
    } else if (const auto* d = std::get_if<StepDelay>(&step)) {
      state = ctx.dense ? evolve_dense(state, ctx.h, d->seconds)
                        : evolve(state, ctx.h, d->seconds);
    } else if (const auto* e = std::get_if<StepEvolveHalf>(&step)) {
      state = ctx.dense ? evolve_dense(state, ctx.h, ctx.t1 / 2.0)
                        : evolve(state, ctx.h, ctx.t1 / 2.0);
      if (e->last && ctx.relaxation) {
        state = apply_relaxation(state, *ctx.system, ctx.t1);
      }
    } else if (const auto* i = std::get_if<StepInject>(&step)) {
      state = {conjugate_by_pauli(state.op, i->string), state.time_cursor};
    } else if (const auto* pr = std::get_if<StepPrepare>(&step)) {
      state = {pr->op, state.time_cursor};
    }
  }
  return state;
}

// Detection and t2 synthesis: with rho and F- in the eigenbasis of H,
// s(t) = sum_rc rho_rc F_cr exp(-i (E_r - E_c) t).
struct Synthesizer {
  Eigen::VectorXd energies;
  Matrix vectors;
  Matrix f_detect;  // in the eigenbasis
  double t2_dwell;
  std::size_t points;
  double t2_relax_time;  // <= 0 disables the envelope

  std::vector<Complex> fid(const OperatorSum& op) const {
    Matrix rho = vectors.adjoint() * to_matrix(op) * vectors;
    const Eigen::Index dim = rho.rows();
    struct Line {
      Complex weight;
      Complex step;
    };
    std::vector<Line> lines;
    for (Eigen::Index r = 0; r < dim; ++r) {
      for (Eigen::Index c = 0; c < dim; ++c) {
        Complex w = rho(r, c) * f_detect(c, r);
        if (std::abs(w) < 1e-16) continue;
        double delta = energies(r) - energies(c);
        lines.push_back({w, std::exp(-kI * delta * t2_dwell)});
      }
    }
    std::vector<Complex> s(points, Complex{0.0, 0.0});
    for (Line& line : lines) {
      Complex phase = line.weight;
      for (std::size_t j = 0; j < points; ++j) {
        s[j] += phase;
        phase *= line.step;
      }
    }
    if (t2_relax_time > 0.0) {
      for (std::size_t j = 0; j < points; ++j) {
        s[j] *= std::exp(-(static_cast<double>(j) * t2_dwell) / t2_relax_time);
      }
    }
    return s;
  }
};

}  // namespace

StateOp state_before_encode(const SpinSystem& system, const PulseSequence& seq,
                            const RunOptions& options) {
  Program prog = compile_sequence(system, seq, options);
  RunContext ctx{&system, build_hamiltonian(system), options.dense_backend,
                 options.relaxation, 0.0};
  StateOp state{resolve_named_operator(system, "thermal"), 0.0};
  return run_steps(std::move(state), prog.pre, ctx);
}

Raw2D run_sequence(const SpinSystem& system, const PulseSequence& seq,
                   const RunOptions& options) {
  if (options.t1_points == 0 || !(options.t1_sw_hz > 0.0)) {
    throw std::invalid_argument("t1 grid needs points >= 1 and a positive "
                                "spectral width");
  }
  const Program prog = compile_sequence(system, seq, options);
  const Hamiltonian h = build_hamiltonian(system);
  const std::vector<int> weights = system.integer_gamma_weights();

  Raw2D raw;
  raw.n_t1 = options.t1_points;
  raw.n_t2 = prog.acquire.points;
  raw.t1_dwell = 1.0 / options.t1_sw_hz;
  raw.t2_dwell = 1.0 / prog.acquire.sw_hz;
  raw.grid.assign(raw.n_t1 * raw.n_t2, Complex{0.0, 0.0});

  // Shared dense machinery for the t2 synthesis.
  Eigen::SelfAdjointEigenSolver<Matrix> es(to_matrix(h.op));
  Synthesizer synth;
  synth.energies = es.eigenvalues();
  synth.vectors = es.eigenvectors();
  // F- = sum_k I-_k = sum_k (Ix_k - i Iy_k); Tr(rho F-) reads out the
  // sigma+ (order +detect) components.
  OperatorSum f_minus(system.size());
  for (std::size_t k : prog.detect_spins) {
    f_minus += single_spin_op(system.size(), k, Pauli::X);
    f_minus += Complex{0.0, -1.0} * single_spin_op(system.size(), k, Pauli::Y);
  }
  synth.f_detect = synth.vectors.adjoint() * to_matrix(f_minus) * synth.vectors;
  synth.t2_dwell = raw.t2_dwell;
  synth.points = raw.n_t2;
  synth.t2_relax_time = options.relaxation ? system.t2_for("SQ") : 0.0;

  const OperatorSum initial = resolve_named_operator(system, "thermal");

  auto run_row = [&](std::size_t k) {
    RunContext ctx{&system, h, options.dense_backend, options.relaxation,
                   static_cast<double>(k) * raw.t1_dwell};
    StateOp state{initial, 0.0};
    state = run_steps(std::move(state), prog.pre, ctx);

    OperatorSum at_decode(system.size());
    if (!prog.has_gradients) {
      at_decode = run_steps(std::move(state), prog.middle, ctx).op;
    } else if (options.grad_mode == GradMode::kExact) {
      PathwaySelection selection = select_pathways(
          prog.encode, prog.decode, prog.detect_order,
          coherence_decompose(state.op, weights).orders());
      state = gradient_filter(state, selection.encode_orders, weights);
      state = run_steps(std::move(state), prog.middle, ctx);
      state = gradient_filter(
          state, {selection.detect_order, -selection.detect_order}, weights);
      at_decode = state.op;
    } else {
      // Ensemble model, factorized over the shared-z average: each encode
      // order component propagates through the middle once; the decode
      // decomposition then picks up the pathway kernel.
      CoherenceDecomposition enc = coherence_decompose(state.op, weights);
      for (const auto& [pe, comp] : enc.components()) {
        StateOp evolved =
            run_steps(StateOp{comp, state.time_cursor}, prog.middle, ctx);
        CoherenceDecomposition dec = coherence_decompose(evolved.op, weights);
        for (const auto& [pd, comp_d] : dec.components()) {
          Complex kernel =
              ensemble_kernel(prog.encode, prog.decode, pe, pd, options.nz,
                              options.sampling, options.seed);
          if (std::abs(kernel) < 1e-18) continue;
          at_decode += kernel * comp_d;
        }
      }
    }

    StateOp final_state =
        run_steps(StateOp{at_decode, 0.0}, prog.post, ctx);
    std::vector<Complex> fid = synth.fid(final_state.op);
    std::copy(fid.begin(), fid.end(), raw.grid.begin() + k * raw.n_t2);
  };

  std::size_t n_threads = options.threads != 0
                              ? options.threads
                              : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<std::size_t>(n_threads, raw.n_t1);
  if (n_threads <= 1) {
    for (std::size_t k = 0; k < raw.n_t1; ++k) run_row(k);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t k = t; k < raw.n_t1; k += n_threads) run_row(k);
      });
    }
    for (std::thread& th : pool) th.join();
  }
  return raw;
}

double signal_model_eq7(const std::string& label, double t1,
                        const SpinSystem& system, bool relax) {
  double j_im = system.coupling("I1", "M");
  double j_sm = system.coupling("S", "M");
  double a = 0.0, b = 0.0;
  if (label == "QQ") {
    a = 3.0; b = 1.0;
  } else if (label == "DQ1") {
    a = 3.0; b = -1.0;
  } else if (label == "DQ2") {
    a = 1.0; b = 1.0;
  } else if (label == "ZQ") {
    a = 1.0; b = -1.0;
  } else {
    throw std::invalid_argument("unknown coherence label '" + label + "'");
  }
  double value = std::cos(kPi * (a * j_im + b * j_sm) * t1);
  if (relax) value *= std::exp(-t1 / system.t2_for(label));
  return value;
}

std::vector<double> run_interferogram(const SpinSystem& system,
                                      const std::string& label,
                                      std::size_t t1_points, double t1_sw_hz,
                                      bool relax, bool dense) {
  const Hamiltonian h = build_hamiltonian(system);
  const OperatorSum prep =
      embed_dfs_operator(system, coherence_projection(label, true));
  std::vector<std::size_t> all(system.size());
  std::iota(all.begin(), all.end(), 0);
  const PulseEvent echo{all, kPi, 0.0};

  std::vector<double> out(t1_points, 0.0);
  const double dwell = 1.0 / t1_sw_hz;
  for (std::size_t k = 0; k < t1_points; ++k) {
    const double t1 = static_cast<double>(k) * dwell;
    StateOp state{prep, 0.0};
    state = dense ? evolve_dense(state, h, t1 / 2.0)
                  : evolve(state, h, t1 / 2.0);
    state = apply_pulse(state, echo);
    state = dense ? evolve_dense(state, h, t1 / 2.0)
                  : evolve(state, h, t1 / 2.0);
    if (relax) state = apply_relaxation(state, system, t1);
    out[k] = hs_inner(prep, state.op).real();
  }
  // Receiver phase: the hard echo conjugates every transverse string, which
  // shows up as one global sign; normalize so the first point reads +1.
  if (!out.empty() && out[0] != 0.0) {
    const double scale = 1.0 / out[0];
    for (double& v : out) v *= scale;
  }
  return out;
}

namespace {

struct FftPlan {
  fftw_plan plan;
  std::vector<Complex> buffer;

  explicit FftPlan(std::size_t n) : buffer(n) {
    plan = fftw_plan_dft_1d(static_cast<int>(n),
                            reinterpret_cast<fftw_complex*>(buffer.data()),
                            reinterpret_cast<fftw_complex*>(buffer.data()),
                            FFTW_FORWARD, FFTW_ESTIMATE);
  }
  ~FftPlan() { fftw_destroy_plan(plan); }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void execute() { fftw_execute(plan); }
};

std::vector<double> centered_axis(std::size_t n, double sw) {
  std::vector<double> axis(n);
  const double step = sw / static_cast<double>(n);
  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  for (std::size_t i = 0; i < n; ++i) {
    axis[i] = (static_cast<std::ptrdiff_t>(i) - half) * step;
  }
  return axis;
}

}  // namespace

std::vector<Complex> t2_spectrum_rows(const Raw2D& raw) {
  const std::size_t n1 = raw.n_t1;
  const std::size_t n2 = raw.n_t2;
  if (n1 == 0 || n2 == 0) throw std::invalid_argument("empty raw grid");
  std::vector<Complex> stage1(n1 * n2);
  FftPlan plan(n2);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n2));
  for (std::size_t k = 0; k < n1; ++k) {
    for (std::size_t j = 0; j < n2; ++j) {
      double w = std::cos(kPi * 0.5 * static_cast<double>(j) /
                          static_cast<double>(n2));
      plan.buffer[j] = raw.at(k, j) * w;
    }
    plan.execute();
    const std::size_t half = n2 / 2;
    for (std::size_t i = 0; i < n2; ++i) {
      stage1[k * n2 + i] = plan.buffer[(i + n2 - half) % n2] * scale;
    }
  }
  return stage1;
}

Spectrum2D process_2d(const Raw2D& raw) {
  const std::size_t n1 = raw.n_t1;
  const std::size_t n2 = raw.n_t2;
  const std::size_t nf1 = 4 * n1;  // x4 zero-fill in F1

  std::vector<Complex> stage1 = t2_spectrum_rows(raw);

  // t1: halve the first point, cosine apodization, zero-fill, cosine
  // transform via the even part of the padded FFT.
  Spectrum2D spec;
  spec.n_f1 = nf1;
  spec.n_f2 = n2;
  spec.magnitude.assign(nf1 * n2, 0.0);
  {
    FftPlan plan(nf1);
    const double scale = 1.0 / std::sqrt(static_cast<double>(nf1));
    std::vector<Complex> even(nf1);
    for (std::size_t col = 0; col < n2; ++col) {
      std::fill(plan.buffer.begin(), plan.buffer.end(), Complex{0.0, 0.0});
      for (std::size_t k = 0; k < n1; ++k) {
        double w = std::cos(kPi * 0.5 * static_cast<double>(k) /
                            static_cast<double>(n1));
        if (k == 0) w *= 0.5;
        plan.buffer[k] = stage1[k * n2 + col] * w;
      }
      plan.execute();
      for (std::size_t b = 0; b < nf1; ++b) {
        even[b] = 0.5 * (plan.buffer[b] + plan.buffer[(nf1 - b) % nf1]);
      }
      const std::size_t half = nf1 / 2;
      for (std::size_t i = 0; i < nf1; ++i) {
        spec.magnitude[i * n2 + col] =
            std::abs(even[(i + nf1 - half) % nf1] * scale);
      }
    }
  }

  const double sw1 = 1.0 / raw.t1_dwell;
  const double sw2 = 1.0 / raw.t2_dwell;
  spec.f1_hz = centered_axis(nf1, sw1);
  spec.f2_hz = centered_axis(n2, sw2);
  return spec;
}

PeakList peak_pick(const Spectrum2D& spec, double threshold_fraction) {
  if (threshold_fraction <= 0.0 || threshold_fraction >= 1.0) {
    throw std::invalid_argument("threshold_fraction must be in (0, 1)");
  }
  double gmax = 0.0;
  for (double v : spec.magnitude) gmax = std::max(gmax, v);
  if (gmax == 0.0) return {};

  PeakList peaks;
  const double threshold = threshold_fraction * gmax;
  auto value = [&](std::size_t i, std::size_t j) { return spec.at(i, j); };
  for (std::size_t i = 1; i + 1 < spec.n_f1; ++i) {
    for (std::size_t j = 0; j < spec.n_f2; ++j) {
      double v = value(i, j);
      if (v < threshold) continue;
      bool is_max = v > value(i - 1, j) && v >= value(i + 1, j);
      if (spec.n_f2 > 1) {
        std::size_t jm = j == 0 ? 0 : j - 1;
        std::size_t jp = j + 1 < spec.n_f2 ? j + 1 : j;
        if (jm != j && value(i, jm) >= v) is_max = false;
        if (jp != j && value(i, jp) > v) is_max = false;
      }
      if (!is_max) continue;

      double f1 = spec.f1_hz[i];
      double f2 = spec.f2_hz[j];
      double ym = value(i - 1, j), y0 = v, yp = value(i + 1, j);
      double denom = ym - 2.0 * y0 + yp;
      if (denom < 0.0) {
        f1 += 0.5 * (ym - yp) / denom * (spec.f1_hz[1] - spec.f1_hz[0]);
      }
      if (spec.n_f2 > 2 && j > 0 && j + 1 < spec.n_f2) {
        double xm = value(i, j - 1), xp = value(i, j + 1);
        double d2 = xm - 2.0 * y0 + xp;
        if (d2 < 0.0) {
          f2 += 0.5 * (xm - xp) / d2 * (spec.f2_hz[1] - spec.f2_hz[0]);
        }
      }
      peaks.push_back(Peak{f1, f2, v / gmax});
    }
  }
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.amplitude != b.amplitude) return a.amplitude > b.amplitude;
    if (a.f1_hz != b.f1_hz) return a.f1_hz < b.f1_hz;
    return a.f2_hz < b.f2_hz;
  });
  return peaks;
}

CompareReport compare_spectra(const Spectrum2D& a, const Spectrum2D& b,
                              double tol) {
  if (a.n_f1 != b.n_f1 || a.n_f2 != b.n_f2) {
    throw std::invalid_argument("compare_spectra: grid mismatch");
  }
  double max_a = 0.0;
  for (double v : a.magnitude) max_a = std::max(max_a, std::abs(v));
  double max_diff = 0.0;
  for (std::size_t i = 0; i < a.magnitude.size(); ++i) {
    max_diff = std::max(max_diff, std::abs(a.magnitude[i] - b.magnitude[i]));
  }
  double rel = max_a > 0.0 ? max_diff / max_a : max_diff;
  return CompareReport{rel, tol, rel <= tol};
}

double f1_band_max(const Spectrum2D& spec, double center_hz,
                   double half_width_hz) {
  double best = 0.0;
  for (std::size_t i = 0; i < spec.n_f1; ++i) {
    if (std::abs(spec.f1_hz[i] - center_hz) > half_width_hz) continue;
    for (std::size_t j = 0; j < spec.n_f2; ++j) {
      best = std::max(best, spec.at(i, j));
    }
  }
  return best;
}

std::map<std::string, double> modulation_amplitudes(const Raw2D& raw,
                                                    const SpinSystem& system,
                                                    bool relax) {
  if (raw.n_t1 < 8) {
    throw std::invalid_argument("need at least 8 t1 points for the fit");
  }
  const double j_im = system.coupling("I1", "M");
  const double j_sm = system.coupling("S", "M");
  const std::array<std::pair<std::string, double>, 4> freqs = {{
      {"QQ", 3.0 * j_im + j_sm},
      {"DQ1", 3.0 * j_im - j_sm},
      {"DQ2", j_im + j_sm},
      {"ZQ", j_im - j_sm},
  }};

  Eigen::MatrixXd basis(raw.n_t1, 8);
  for (std::size_t k = 0; k < raw.n_t1; ++k) {
    const double t1 = static_cast<double>(k) * raw.t1_dwell;
    for (std::size_t f = 0; f < 4; ++f) {
      double envelope =
          relax ? std::exp(-t1 / system.t2_for(freqs[f].first)) : 1.0;
      basis(k, 2 * f) = std::cos(kPi * freqs[f].second * t1) * envelope;
      basis(k, 2 * f + 1) = std::sin(kPi * freqs[f].second * t1) * envelope;
    }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);

  // Leakage can sit in any F2 column, so aggregate the quadrature energy of
  // every column per frequency.
  std::array<double, 4> energy{};
  Eigen::VectorXd re(raw.n_t1), im(raw.n_t1);
  for (std::size_t j = 0; j < raw.n_t2; ++j) {
    for (std::size_t k = 0; k < raw.n_t1; ++k) {
      re(k) = raw.at(k, j).real();
      im(k) = raw.at(k, j).imag();
    }
    Eigen::VectorXd cr = qr.solve(re);
    Eigen::VectorXd ci = qr.solve(im);
    for (std::size_t f = 0; f < 4; ++f) {
      energy[f] += cr(2 * f) * cr(2 * f) + cr(2 * f + 1) * cr(2 * f + 1) +
                   ci(2 * f) * ci(2 * f) + ci(2 * f + 1) * ci(2 * f + 1);
    }
  }
  std::map<std::string, double> out;
  for (std::size_t f = 0; f < 4; ++f) {
    out[freqs[f].first] = std::sqrt(energy[f]);
  }
  return out;
}

}  // namespace mqdfs
