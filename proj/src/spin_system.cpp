#include "mqdfs/spin_system.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mqdfs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDefaultT2 = 0.5;

PauliString z_string(std::size_t n, std::size_t k) {
  std::vector<Pauli> letters(n, Pauli::E);
  letters[k] = Pauli::Z;
  return PauliString(std::move(letters));
}

PauliString pair_string(std::size_t n, std::size_t a, Pauli pa, std::size_t b,
                        Pauli pb) {
  std::vector<Pauli> letters(n, Pauli::E);
  letters[a] = pa;
  letters[b] = pb;
  return PauliString(std::move(letters));
}

}  // namespace

SpinSystem::SpinSystem(std::vector<Spin> spins,
                       std::vector<std::vector<double>> couplings,
                       std::map<std::string, double> t2_map)
    : spins_(std::move(spins)),
      couplings_(std::move(couplings)),
      t2_map_(std::move(t2_map)) {
  if (spins_.empty()) throw std::invalid_argument("spin system is empty");
  for (std::size_t k = 0; k < spins_.size(); ++k) {
    const Spin& s = spins_[k];
    if (s.gamma_weight <= 0.0) {
      throw std::invalid_argument("gamma_weight must be positive for spin '" +
                                  s.label + "'");
    }
    if (!index_.emplace(s.label, k).second) {
      throw std::invalid_argument("duplicate spin label '" + s.label + "'");
    }
  }
  if (couplings_.size() != spins_.size()) {
    throw std::invalid_argument("coupling table must be n x n");
  }
  for (std::size_t a = 0; a < couplings_.size(); ++a) {
    if (couplings_[a].size() != spins_.size()) {
      throw std::invalid_argument("coupling table must be n x n");
    }
    if (couplings_[a][a] != 0.0) {
      throw std::invalid_argument("coupling table diagonal must be zero");
    }
    for (std::size_t b = 0; b < a; ++b) {
      if (couplings_[a][b] != couplings_[b][a]) {
        throw std::invalid_argument("coupling table must be symmetric");
      }
    }
  }
  for (const auto& [label, t2] : t2_map_) {
    const auto& known = coherence_labels();
    if (std::find(known.begin(), known.end(), label) == known.end()) {
      throw std::invalid_argument("unknown coherence label '" + label + "'");
    }
    if (t2 <= 0.0) {
      throw std::invalid_argument("T2 must be positive for '" + label + "'");
    }
  }
}

std::size_t SpinSystem::index_of(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) {
    throw std::invalid_argument("unknown spin label '" + label + "'");
  }
  return it->second;
}

bool SpinSystem::has_label(const std::string& label) const {
  return index_.count(label) > 0;
}

double SpinSystem::coupling(std::size_t a, std::size_t b) const {
  return couplings_.at(a).at(b);
}

double SpinSystem::coupling(const std::string& a, const std::string& b) const {
  return coupling(index_of(a), index_of(b));
}

double SpinSystem::t2_for(const std::string& label) const {
  auto it = t2_map_.find(label);
  if (it != t2_map_.end()) return it->second;
  it = t2_map_.find("default");
  return it != t2_map_.end() ? it->second : kDefaultT2;
}

std::vector<int> SpinSystem::integer_gamma_weights() const {
  std::vector<int> weights;
  weights.reserve(size());
  for (const Spin& s : spins_) {
    double rounded = std::round(s.gamma_weight);
    if (std::abs(s.gamma_weight - rounded) > 1e-9 || rounded < 1.0) {
      throw std::invalid_argument(
          "gamma_weight of spin '" + s.label +
          "' is not a positive integer; exact order filtering needs the "
          "integer gamma convention");
    }
    weights.push_back(static_cast<int>(rounded));
  }
  return weights;
}

bool SpinSystem::magnetically_equivalent(std::size_t a, std::size_t b) const {
  // Needs a third spin to compare couplings against; a bare pair is treated
  // as weakly coupled so the textbook secular rules apply.
  if (a == b || size() < 3) return false;
  if (spins_[a].shift_hz != spins_[b].shift_hz) return false;
  if (spins_[a].gamma_weight != spins_[b].gamma_weight) return false;
  for (std::size_t k = 0; k < size(); ++k) {
    if (k == a || k == b) continue;
    if (couplings_[a][k] != couplings_[b][k]) return false;
  }
  return true;
}

std::string SpinSystem::coherence_label_for_order(int weighted_order) const {
  // The named coherences live on the SI3 subsystem: three equivalent spins
  // of weight wI plus one of weight wS.
  if (!has_label("S") || !has_label("I1") || !has_label("I2") ||
      !has_label("I3")) {
    return "default";
  }
  double wi_d = spin(index_of("I1")).gamma_weight;
  double ws_d = spin(index_of("S")).gamma_weight;
  if (wi_d != std::round(wi_d) || ws_d != std::round(ws_d)) return "default";
  int wi = static_cast<int>(wi_d);
  int ws = static_cast<int>(ws_d);
  int p = std::abs(weighted_order);
  if (p == 3 * wi + ws) return "QQ";
  if (p == std::abs(3 * wi - ws)) return "DQ1";
  if (p == wi + ws) return "DQ2";
  if (p == std::abs(wi - ws)) return "ZQ";
  if (p == wi || p == ws) return "SQ";
  return "default";
}

Hamiltonian build_hamiltonian(const SpinSystem& system) {
  const std::size_t n = system.size();
  Hamiltonian h{OperatorSum(n), true};
  for (std::size_t k = 0; k < n; ++k) {
    double shift = system.spin(k).shift_hz;
    if (shift != 0.0) {
      // 2 pi shift Iz = pi shift Z.
      h.op.add_term(z_string(n, k), kTwoPi * shift * 0.5);
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      double j = system.coupling(a, b);
      if (j == 0.0) continue;
      if (system.magnetically_equivalent(a, b)) {
        h.op += isotropic_coupling(n, a, b, j);
        h.secular_only = false;
      } else {
        // 2 pi J IzIz = (pi J / 2) ZZ.
        h.op.add_term(pair_string(n, a, Pauli::Z, b, Pauli::Z),
                      kTwoPi * j * 0.25);
      }
    }
  }
  return h;
}

OperatorSum isotropic_coupling(std::size_t n_spins, std::size_t a,
                               std::size_t b, double j_hz) {
  OperatorSum op(n_spins);
  const double c = kTwoPi * j_hz * 0.25;
  op.add_term(pair_string(n_spins, a, Pauli::X, b, Pauli::X), c);
  op.add_term(pair_string(n_spins, a, Pauli::Y, b, Pauli::Y), c);
  op.add_term(pair_string(n_spins, a, Pauli::Z, b, Pauli::Z), c);
  return op;
}

namespace {

double parse_gamma(const std::string& token, std::size_t line_no) {
  std::size_t slash = token.find('/');
  try {
    if (slash == std::string::npos) return std::stod(token);
    double num = std::stod(token.substr(0, slash));
    double den = std::stod(token.substr(slash + 1));
    if (den == 0.0) throw std::invalid_argument("zero denominator");
    return num / den;
  } catch (const std::exception&) {
    throw std::invalid_argument("line " + std::to_string(line_no) +
                                ": bad gamma value '" + token + "'");
  }
}

[[noreturn]] void config_error(std::size_t line_no, const std::string& msg) {
  throw std::invalid_argument("spin config line " + std::to_string(line_no) +
                              ": " + msg);
}

}  // namespace

SpinSystem parse_spin_config(std::string_view text) {
  std::vector<Spin> spins;
  std::map<std::string, std::size_t> index;
  std::vector<std::tuple<std::string, std::string, double, std::size_t>> js;
  std::map<std::string, double> t2_map;

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw.substr(0, raw.find('#'));
    std::istringstream ls(line);
    std::string directive;
    if (!(ls >> directive)) continue;

    if (directive == "spin") {
      std::string label;
      if (!(ls >> label)) config_error(line_no, "spin needs a label");
      Spin s{label, 1.0, 0.0};
      bool saw_gamma = false;
      std::string kv;
      while (ls >> kv) {
        std::size_t eq = kv.find('=');
        if (eq == std::string::npos) {
          config_error(line_no, "expected key=value, got '" + kv + "'");
        }
        std::string key = kv.substr(0, eq);
        std::string value = kv.substr(eq + 1);
        if (key == "gamma") {
          s.gamma_weight = parse_gamma(value, line_no);
          saw_gamma = true;
        } else if (key == "shift_hz") {
          try {
            s.shift_hz = std::stod(value);
          } catch (const std::exception&) {
            config_error(line_no, "bad shift_hz value '" + value + "'");
          }
        } else {
          config_error(line_no, "unknown key '" + key + "'");
        }
      }
      if (!saw_gamma) config_error(line_no, "spin needs gamma=<value>");
      if (!index.emplace(label, spins.size()).second) {
        config_error(line_no, "duplicate spin '" + label + "'");
      }
      spins.push_back(std::move(s));
    } else if (directive == "j") {
      std::string a, b;
      double hz = 0.0;
      if (!(ls >> a >> b >> hz)) {
        config_error(line_no, "expected: j <labelA> <labelB> <hz>");
      }
      js.emplace_back(a, b, hz, line_no);
    } else if (directive == "t2") {
      std::string label;
      double seconds = 0.0;
      if (!(ls >> label >> seconds)) {
        config_error(line_no, "expected: t2 <coherence-label> <seconds>");
      }
      if (!t2_map.emplace(label, seconds).second) {
        config_error(line_no, "duplicate t2 entry '" + label + "'");
      }
    } else {
      config_error(line_no, "unknown directive '" + directive + "'");
    }
    std::string trailing;
    if (ls >> trailing) {
      config_error(line_no, "trailing tokens starting at '" + trailing + "'");
    }
  }

  if (spins.empty()) throw std::invalid_argument("spin config defines no spins");

  std::vector<std::vector<double>> couplings(
      spins.size(), std::vector<double>(spins.size(), 0.0));
  std::vector<std::vector<bool>> seen(spins.size(),
                                      std::vector<bool>(spins.size(), false));
  for (const auto& [a, b, hz, ln] : js) {
    auto ia = index.find(a);
    auto ib = index.find(b);
    if (ia == index.end()) config_error(ln, "unknown spin '" + a + "'");
    if (ib == index.end()) config_error(ln, "unknown spin '" + b + "'");
    if (ia->second == ib->second) config_error(ln, "self coupling");
    std::size_t r = ia->second, c = ib->second;
    if (seen[r][c]) {
      if (couplings[r][c] != hz) {
        config_error(ln, "conflicting J values for " + a + "-" + b);
      }
      config_error(ln, "duplicate J entry for " + a + "-" + b);
    }
    seen[r][c] = seen[c][r] = true;
    couplings[r][c] = couplings[c][r] = hz;
  }

  return SpinSystem(std::move(spins), std::move(couplings), std::move(t2_map));
}

std::string serialize_spin_config(const SpinSystem& system) {
  std::ostringstream out;
  out.precision(17);
  for (const Spin& s : system.spins()) {
    out << "spin " << s.label << " gamma=" << s.gamma_weight
        << " shift_hz=" << s.shift_hz << '\n';
  }
  for (std::size_t a = 0; a < system.size(); ++a) {
    for (std::size_t b = a + 1; b < system.size(); ++b) {
      double j = system.coupling(a, b);
      if (j != 0.0) {
        out << "j " << system.spin(a).label << ' ' << system.spin(b).label
            << ' ' << j << '\n';
      }
    }
  }
  for (const auto& [label, t2] : system.t2_map()) {
    out << "t2 " << label << ' ' << t2 << '\n';
  }
  return out.str();
}

SpinSystem preset_alanine() {
  std::vector<Spin> spins = {
      {"I1", 4.0, 0.0}, {"I2", 4.0, 0.0}, {"I3", 4.0, 0.0},
      {"S", 1.0, 0.0},  {"M", 4.0, 0.0},
  };
  std::vector<std::vector<double>> j(5, std::vector<double>(5, 0.0));
  auto set = [&](std::size_t a, std::size_t b, double hz) {
    j[a][b] = j[b][a] = hz;
  };
  const double j_si = 129.8, j_sm = 4.5, j_im = 7.3;
  set(0, 3, j_si);
  set(1, 3, j_si);
  set(2, 3, j_si);
  set(3, 4, j_sm);
  set(0, 4, j_im);
  set(1, 4, j_im);
  set(2, 4, j_im);
  return SpinSystem(std::move(spins), std::move(j), {{"default", kDefaultT2}});
}

}  // namespace mqdfs
