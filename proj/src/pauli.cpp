#include "mqdfs/pauli.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mqdfs {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_equal_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": length mismatch (" +
                                std::to_string(a) + " vs " +
                                std::to_string(b) + ")");
  }
}

}  // namespace

char pauli_char(Pauli p) {
  switch (p) {
    case Pauli::E: return 'E';
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
  }
  throw std::logic_error("invalid Pauli letter");
}

Pauli pauli_from_char(char c) {
  switch (c) {
    case 'E': case 'e': case 'I': case 'i': return Pauli::E;
    case 'X': case 'x': return Pauli::X;
    case 'Y': case 'y': return Pauli::Y;
    case 'Z': case 'z': return Pauli::Z;
    default:
      throw std::invalid_argument(std::string("invalid Pauli letter '") + c +
                                  "'");
  }
}

PauliString::PauliString(std::vector<Pauli> letters)
    : letters_(std::move(letters)) {
  if (letters_.empty()) {
    throw std::invalid_argument("PauliString must have at least one spin");
  }
}

PauliString PauliString::identity(std::size_t n_spins) {
  return PauliString(std::vector<Pauli>(n_spins, Pauli::E));
}

PauliString PauliString::from_letters(std::string_view text) {
  std::vector<Pauli> letters;
  letters.reserve(text.size());
  for (char c : text) letters.push_back(pauli_from_char(c));
  return PauliString(std::move(letters));
}

bool PauliString::is_identity() const {
  return std::all_of(letters_.begin(), letters_.end(),
                     [](Pauli p) { return p == Pauli::E; });
}

std::size_t PauliString::weight() const {
  return static_cast<std::size_t>(
      std::count_if(letters_.begin(), letters_.end(),
                    [](Pauli p) { return p != Pauli::E; }));
}

bool PauliString::commutes_with(const PauliString& other) const {
  require_equal_length(size(), other.size(), "commutes_with");
  int anticommuting = 0;
  for (std::size_t k = 0; k < size(); ++k) {
    Pauli a = letters_[k];
    Pauli b = other.letters_[k];
    if (a != Pauli::E && b != Pauli::E && a != b) ++anticommuting;
  }
  return anticommuting % 2 == 0;
}

PauliString PauliString::with_letter(std::size_t k, Pauli letter) const {
  std::vector<Pauli> letters = letters_;
  letters.at(k) = letter;
  return PauliString(std::move(letters));
}

std::string PauliString::str() const {
  std::string s;
  s.reserve(size());
  for (Pauli p : letters_) s.push_back(pauli_char(p));
  return s;
}

PauliProduct pauli_product(const PauliString& a, const PauliString& b) {
  require_equal_length(a.size(), b.size(), "pauli_product");
  // Spin-wise single-spin products: equal letters give E, distinct
  // non-identity letters give the third with phase +/- i (cyclic in XYZ).
  std::vector<Pauli> letters(a.size());
  int i_power = 0;  // accumulated power of i, mod 4
  for (std::size_t k = 0; k < a.size(); ++k) {
    Pauli p = a.at(k);
    Pauli q = b.at(k);
    if (p == Pauli::E) {
      letters[k] = q;
    } else if (q == Pauli::E) {
      letters[k] = p;
    } else if (p == q) {
      letters[k] = Pauli::E;
    } else {
      int pi = static_cast<int>(p);
      int qi = static_cast<int>(q);
      // The letter neither p nor q.
      letters[k] = static_cast<Pauli>(6 - pi - qi);
      // XY=iZ, YZ=iX, ZX=iY are the cyclic (+i) cases.
      bool cyclic = (qi - pi + 3) % 3 == 1;
      i_power += cyclic ? 1 : 3;
    }
  }
  static constexpr Complex kPhases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return PauliProduct{kPhases[i_power % 4], PauliString(std::move(letters))};
}

OperatorSum::OperatorSum(std::size_t n_spins) : n_spins_(n_spins) {
  if (n_spins_ == 0) {
    throw std::invalid_argument("OperatorSum must have at least one spin");
  }
}

OperatorSum::OperatorSum(
    std::size_t n_spins,
    std::initializer_list<std::pair<PauliString, Complex>> terms)
    : OperatorSum(n_spins) {
  for (const auto& [p, c] : terms) add_term(p, c);
}

OperatorSum OperatorSum::identity(std::size_t n_spins) {
  OperatorSum op(n_spins);
  op.add_term(PauliString::identity(n_spins), 1.0);
  return op;
}

OperatorSum OperatorSum::single(const PauliString& p, Complex c) {
  OperatorSum op(p.size());
  op.add_term(p, c);
  return op;
}

Complex OperatorSum::coefficient(const PauliString& p) const {
  auto it = terms_.find(p);
  return it == terms_.end() ? Complex{0.0, 0.0} : it->second;
}

void OperatorSum::add_term(const PauliString& p, Complex c) {
  require_equal_length(p.size(), n_spins_, "add_term");
  auto [it, inserted] = terms_.try_emplace(p, c);
  if (!inserted) it->second += c;
  if (std::abs(it->second) < kCoeffEpsilon) terms_.erase(it);
}

OperatorSum& OperatorSum::operator+=(const OperatorSum& other) {
  require_equal_length(other.n_spins_, n_spins_, "operator+=");
  for (const auto& [p, c] : other.terms_) add_term(p, c);
  return *this;
}

OperatorSum& OperatorSum::operator-=(const OperatorSum& other) {
  require_equal_length(other.n_spins_, n_spins_, "operator-=");
  for (const auto& [p, c] : other.terms_) add_term(p, -c);
  return *this;
}

OperatorSum& OperatorSum::operator*=(Complex scale) {
  if (std::abs(scale) < kCoeffEpsilon) {
    terms_.clear();
    return *this;
  }
  for (auto& [p, c] : terms_) c *= scale;
  return *this;
}

OperatorSum operator*(const OperatorSum& a, const OperatorSum& b) {
  require_equal_length(a.n_spins_, b.n_spins_, "operator*");
  OperatorSum out(a.n_spins_);
  for (const auto& [pa, ca] : a.terms_) {
    for (const auto& [pb, cb] : b.terms_) {
      PauliProduct prod = pauli_product(pa, pb);
      out.add_term(prod.string, ca * cb * prod.phase);
    }
  }
  return out;
}

OperatorSum OperatorSum::adjoint() const {
  OperatorSum out(n_spins_);
  for (const auto& [p, c] : terms_) out.add_term(p, std::conj(c));
  return out;
}

bool OperatorSum::is_hermitian(double tol) const {
  for (const auto& [p, c] : terms_) {
    if (std::abs(c.imag()) > tol) return false;
  }
  return true;
}

double OperatorSum::norm_squared() const {
  double total = 0.0;
  for (const auto& [p, c] : terms_) total += std::norm(c);
  return total;
}

double OperatorSum::norm() const { return std::sqrt(norm_squared()); }

std::string OperatorSum::str() const { return serialize_operator(*this); }

OperatorSum conjugate_by_pauli(const OperatorSum& rho, const PauliString& p) {
  require_equal_length(rho.n_spins(), p.size(), "conjugate_by_pauli");
  OperatorSum out(rho.n_spins());
  for (const auto& [q, c] : rho.terms()) {
    out.add_term(q, p.commutes_with(q) ? c : -c);
  }
  return out;
}

Complex hs_inner(const OperatorSum& a, const OperatorSum& b) {
  require_equal_length(a.n_spins(), b.n_spins(), "hs_inner");
  // Iterate the smaller operator.
  const OperatorSum& small = a.n_terms() <= b.n_terms() ? a : b;
  const OperatorSum& large = a.n_terms() <= b.n_terms() ? b : a;
  bool small_is_a = &small == &a;
  Complex total{0.0, 0.0};
  for (const auto& [p, c] : small.terms()) {
    Complex other = large.coefficient(p);
    total += small_is_a ? std::conj(c) * other : std::conj(other) * c;
  }
  return total;
}

double hs_distance_up_to_phase(const OperatorSum& a, const OperatorSum& b) {
  Complex overlap = hs_inner(b, a);
  double na2 = a.norm_squared();
  double nb2 = b.norm_squared();
  // || a - e^{i t} b ||^2 minimized at e^{i t} = overlap / |overlap|.
  double cross = 2.0 * std::abs(overlap);
  double d2 = na2 + nb2 - cross;
  return d2 > 0.0 ? std::sqrt(d2) : 0.0;
}

std::string serialize_operator(const OperatorSum& op) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& [p, c] : op.terms()) {
    out << c.real() << ' ' << c.imag() << ' ' << p.str() << '\n';
  }
  return out.str();
}

namespace {

std::string_view strip(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<OperatorSum> parse_operators_impl(std::string_view text,
                                              bool allow_many) {
  std::vector<OperatorSum> ops;
  std::vector<std::tuple<double, double, std::string>> pending;
  auto flush = [&] {
    if (pending.empty()) return;
    OperatorSum op(std::get<2>(pending.front()).size());
    for (const auto& [re, im, letters] : pending) {
      op.add_term(PauliString::from_letters(letters), Complex{re, im});
    }
    ops.push_back(std::move(op));
    pending.clear();
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = strip(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (line.substr(0, 3) == "---") {
      flush();
      continue;
    }
    std::istringstream ls{std::string(line)};
    double re = 0.0, im = 0.0;
    std::string letters;
    if (!(ls >> re >> im >> letters)) {
      throw std::invalid_argument("operator parse error at line " +
                                  std::to_string(line_no) + ": '" +
                                  std::string(line) + "'");
    }
    if (!pending.empty() && letters.size() != std::get<2>(pending.front()).size()) {
      throw std::invalid_argument("operator parse error at line " +
                                  std::to_string(line_no) +
                                  ": inconsistent string length");
    }
    pending.emplace_back(re, im, letters);
  }
  flush();
  if (ops.empty()) throw std::invalid_argument("no operator terms found");
  if (!allow_many && ops.size() > 1) {
    throw std::invalid_argument("expected a single operator, found " +
                                std::to_string(ops.size()));
  }
  return ops;
}

}  // namespace

OperatorSum parse_operator(std::string_view text) {
  return parse_operators_impl(text, false).front();
}

std::vector<OperatorSum> parse_operator_list(std::string_view text) {
  return parse_operators_impl(text, true);
}

}  // namespace mqdfs
