#include "mqdfs/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "mqdfs/coherence.hpp"
#include "mqdfs/dense.hpp"

namespace mqdfs {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kGridTol = 1e-12;

bool on_quarter_turn_grid(double angle) {
  double q = angle / (std::numbers::pi / 2.0);
  return std::abs(q - std::round(q)) < kGridTol;
}

bool is_z_string(const PauliString& p) {
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p.at(k) == Pauli::X || p.at(k) == Pauli::Y) return false;
  }
  return true;
}

// Rodrigues rotation of the (X, Y, Z) operator components about the
// transverse axis (cos phase, sin phase, 0) by `angle`.
struct LetterRotation {
  double m[3][3];

  LetterRotation(double angle, double phase) {
    const double nx = std::cos(phase), ny = std::sin(phase);
    const double c = std::cos(angle), s = std::sin(angle);
    const double n[3] = {nx, ny, 0.0};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        m[i][j] = c * (i == j ? 1.0 : 0.0) + (1.0 - c) * n[i] * n[j];
      }
    }
    // + sin(angle) * cross-product matrix of n.
    m[0][1] += -s * n[2];
    m[0][2] += s * n[1];
    m[1][0] += s * n[2];
    m[1][2] += -s * n[0];
    m[2][0] += -s * n[1];
    m[2][1] += s * n[0];
  }
};

OperatorSum rotate_letters(const OperatorSum& op,
                           const std::vector<std::size_t>& targets,
                           double angle, double phase) {
  const LetterRotation rot(angle, phase);
  OperatorSum current = op;
  for (std::size_t target : targets) {
    OperatorSum next(op.n_spins());
    for (const auto& [q, c] : current.terms()) {
      Pauli letter = q.at(target);
      if (letter == Pauli::E) {
        next.add_term(q, c);
        continue;
      }
      int col = static_cast<int>(letter) - 1;
      for (int row = 0; row < 3; ++row) {
        double r = rot.m[row][col];
        if (std::abs(r) < OperatorSum::kCoeffEpsilon) continue;
        next.add_term(q.with_letter(target, static_cast<Pauli>(row + 1)),
                      c * r);
      }
    }
    current = std::move(next);
  }
  return current;
}

Matrix pulse_matrix(std::size_t n_spins,
                    const std::vector<std::size_t>& targets, double angle,
                    double phase) {
  Eigen::Matrix2cd one;
  const double h = angle / 2.0;
  const Complex a = std::cos(h);
  const Complex bx = -kI * std::sin(h) * std::cos(phase);
  const Complex by = -kI * std::sin(h) * std::sin(phase);
  // cos(t/2) I - i sin(t/2) (cos(phi) sx + sin(phi) sy)
  one << a, bx - kI * by, bx + kI * by, a;

  // Spin 0 is the most significant bit, so it must end up as the slowest
  // Kronecker factor: fold from the last spin upward.
  Matrix full = Matrix::Identity(1, 1);
  for (std::size_t k = n_spins; k-- > 0;) {
    bool hit = std::find(targets.begin(), targets.end(), k) != targets.end();
    Eigen::Matrix2cd factor =
        hit ? one : Eigen::Matrix2cd::Identity().eval();
    Matrix next(full.rows() * 2, full.cols() * 2);
    next << full * factor(0, 0), full * factor(0, 1), full * factor(1, 0),
        full * factor(1, 1);
    full = std::move(next);
  }
  return full;
}

}  // namespace

double parse_phase_axis(const std::string& token) {
  if (token == "x") return 0.0;
  if (token == "y") return std::numbers::pi / 2.0;
  if (token == "-x") return std::numbers::pi;
  if (token == "-y") return -std::numbers::pi / 2.0;
  try {
    std::size_t used = 0;
    double degrees = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return degrees * std::numbers::pi / 180.0;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad pulse phase '" + token +
                                "' (expected x, y, -x, -y or degrees)");
  }
}

StateOp evolve_dense(const StateOp& state, const Hamiltonian& h, double t) {
  if (t < 0.0) throw std::invalid_argument("evolution time must be >= 0");
  if (!h.op.is_hermitian(1e-9)) {
    throw std::invalid_argument("Hamiltonian must be Hermitian");
  }
  if (t == 0.0 || h.op.is_zero()) {
    return {state.op, state.time_cursor + t};
  }
  const std::size_t n = state.op.n_spins();
  Eigen::SelfAdjointEigenSolver<Matrix> es(to_matrix(h.op));
  const auto& values = es.eigenvalues();
  const Matrix& vectors = es.eigenvectors();
  Eigen::VectorXcd phases(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    phases(i) = std::exp(-kI * values(i) * t);
  }
  Matrix u = vectors * phases.asDiagonal() * vectors.adjoint();
  Matrix rho = to_matrix(state.op);
  Matrix evolved = u * rho * u.adjoint();
  return {pauli_project(evolved, n), state.time_cursor + t};
}

StateOp evolve_analytic(const StateOp& state, const Hamiltonian& h, double t) {
  if (t < 0.0) throw std::invalid_argument("evolution time must be >= 0");
  for (const auto& [p, c] : h.op.terms()) {
    if (!is_z_string(p)) {
      throw std::domain_error(
          "evolve_analytic needs a secular Hamiltonian (Iz / 2IzIz terms); "
          "found transverse generator " +
          p.str());
    }
  }
  OperatorSum current = state.op;
  // All generators commute, so they apply independently in any order.
  for (const auto& [gen, coeff] : h.op.terms()) {
    const double theta = coeff.real() * t;
    const double c2 = std::cos(2.0 * theta);
    const double s2 = std::sin(2.0 * theta);
    OperatorSum next(current.n_spins());
    for (const auto& [q, q_coeff] : current.terms()) {
      if (gen.commutes_with(q)) {
        next.add_term(q, q_coeff);
      } else {
        // exp(-i t g P) Q exp(i t g P) = cos(2t g) Q - i sin(2t g) P Q.
        next.add_term(q, q_coeff * c2);
        PauliProduct pq = pauli_product(gen, q);
        next.add_term(pq.string, q_coeff * -kI * s2 * pq.phase);
      }
    }
    current = std::move(next);
  }
  return {std::move(current), state.time_cursor + t};
}

StateOp evolve(const StateOp& state, const Hamiltonian& h, double t) {
  if (h.secular_only) return evolve_analytic(state, h, t);
  return evolve_dense(state, h, t);
}

StateOp apply_pulse(const StateOp& state, const PulseEvent& pulse) {
  if (pulse.targets.empty()) {
    throw std::invalid_argument("pulse needs at least one target spin");
  }
  for (std::size_t k : pulse.targets) {
    if (k >= state.op.n_spins()) {
      throw std::invalid_argument("pulse target index out of range");
    }
  }
  if (!std::isfinite(pulse.angle) || !std::isfinite(pulse.phase)) {
    throw std::invalid_argument("pulse angle/phase must be finite");
  }
  if (on_quarter_turn_grid(pulse.angle) && on_quarter_turn_grid(pulse.phase)) {
    return {rotate_letters(state.op, pulse.targets, pulse.angle, pulse.phase),
            state.time_cursor};
  }
  Matrix u = pulse_matrix(state.op.n_spins(), pulse.targets, pulse.angle,
                          pulse.phase);
  Matrix rho = to_matrix(state.op);
  Matrix rotated = u * rho * u.adjoint();
  return {pauli_project(rotated, state.op.n_spins()), state.time_cursor};
}

StateOp apply_relaxation(const StateOp& state, const SpinSystem& system,
                         double dt) {
  if (dt < 0.0) throw std::invalid_argument("relaxation interval must be >= 0");
  if (dt == 0.0 || state.op.is_zero()) return state;
  const std::vector<int> weights = system.integer_gamma_weights();
  CoherenceDecomposition decomp = coherence_decompose(state.op, weights);
  OperatorSum out(state.op.n_spins());
  for (const auto& [order, comp] : decomp.components()) {
    double t2 = system.t2_for(system.coherence_label_for_order(order));
    out += std::exp(-dt / t2) * comp;
  }
  return {std::move(out), state.time_cursor};
}

OperatorSum product_operator(
    std::size_t n_spins,
    const std::vector<std::pair<std::size_t, Pauli>>& factors, double scale) {
  std::vector<Pauli> letters(n_spins, Pauli::E);
  for (const auto& [k, letter] : factors) {
    if (k >= n_spins) throw std::invalid_argument("factor index out of range");
    if (letters[k] != Pauli::E) {
      throw std::invalid_argument("repeated spin in product operator");
    }
    letters[k] = letter;
  }
  // 2^{w-1} prod_k I_k has Pauli coefficient 1/2 for any weight w >= 1.
  return OperatorSum::single(PauliString(std::move(letters)), 0.5 * scale);
}

OperatorSum single_spin_op(std::size_t n_spins, std::size_t k, Pauli letter) {
  return product_operator(n_spins, {{k, letter}});
}

}  // namespace mqdfs
