#include "mqdfs/sequence.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "mqdfs/dynamics.hpp"

namespace mqdfs {

namespace {

[[noreturn]] void seq_error(std::size_t line_no, const std::string& msg) {
  throw std::invalid_argument("sequence line " + std::to_string(line_no) +
                              ": " + msg);
}

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  double parse() {
    double v = expr();
    skip_ws();
    if (pos_ != text_.size()) {
      throw std::invalid_argument("trailing characters in expression");
    }
    return v;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(text_[pos_])) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  double expr() {
    double v = term();
    for (;;) {
      if (eat('+')) v += term();
      else if (eat('-')) v -= term();
      else return v;
    }
  }

  double term() {
    double v = factor();
    for (;;) {
      if (eat('*')) v *= factor();
      else if (eat('/')) {
        double d = factor();
        if (d == 0.0) throw std::invalid_argument("division by zero");
        v /= d;
      } else {
        return v;
      }
    }
  }

  double factor() {
    if (eat('-')) return -factor();
    if (eat('(')) {
      double v = expr();
      if (!eat(')')) throw std::invalid_argument("missing ')'");
      return v;
    }
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(text_[pos_]) || text_[pos_] == '.' ||
            text_[pos_] == 'e' || text_[pos_] == 'E' ||
            ((text_[pos_] == '+' || text_[pos_] == '-') && pos_ > start &&
             (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E')))) {
      ++pos_;
    }
    if (start == pos_) throw std::invalid_argument("expected a number");
    return std::stod(std::string(text_.substr(start, pos_ - start)));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

double eval_arithmetic(std::string_view expr) {
  return ExprParser(expr).parse();
}

const SeqAcquire& PulseSequence::acquire() const {
  return std::get<SeqAcquire>(events.back());
}

std::size_t PulseSequence::gradient_count() const {
  std::size_t n = 0;
  for (const auto& e : events) {
    if (std::holds_alternative<SeqGradient>(e)) ++n;
  }
  return n;
}

std::size_t PulseSequence::evolve_count() const {
  std::size_t n = 0;
  for (const auto& e : events) {
    if (std::holds_alternative<SeqEvolveT1Half>(e)) ++n;
  }
  return n;
}

PulseSequence parse_sequence(std::string_view text) {
  PulseSequence seq;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  std::size_t acquire_count = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw.substr(0, raw.find('#'));
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (acquire_count > 0) {
      seq_error(line_no, "no events allowed after acquire");
    }

    if (word == "pulse") {
      std::string target, axis;
      double degrees = 0.0;
      if (!(ls >> target >> degrees >> axis)) {
        seq_error(line_no, "expected: pulse <spin|group> <angle_deg> <axis>");
      }
      if (!std::isfinite(degrees)) seq_error(line_no, "angle must be finite");
      double phase = 0.0;
      try {
        phase = parse_phase_axis(axis);
      } catch (const std::exception& e) {
        seq_error(line_no, e.what());
      }
      seq.events.push_back(SeqPulse{{target},
                                    degrees * std::numbers::pi / 180.0, phase,
                                    false});
    } else if (word == "pulse180") {
      std::vector<std::string> targets;
      std::string t;
      while (ls >> t) targets.push_back(t);
      if (targets.empty()) {
        seq_error(line_no, "pulse180 needs at least one channel");
      }
      seq.events.push_back(
          SeqPulse{std::move(targets), std::numbers::pi, 0.0, true});
    } else if (word == "delay") {
      std::string expr;
      if (!(ls >> expr)) seq_error(line_no, "delay needs a duration");
      double seconds = 0.0;
      try {
        seconds = eval_arithmetic(expr);
      } catch (const std::exception& e) {
        seq_error(line_no, std::string("bad delay expression: ") + e.what());
      }
      if (!(seconds >= 0.0)) seq_error(line_no, "delay must be >= 0");
      seq.events.push_back(SeqDelay{seconds});
    } else if (word == "grad") {
      double strength = 0.0;
      if (!(ls >> strength) || !std::isfinite(strength)) {
        seq_error(line_no, "expected: grad <strength>");
      }
      seq.events.push_back(SeqGradient{strength});
    } else if (word == "evolve") {
      std::string what;
      if (!(ls >> what) || what != "t1/2") {
        seq_error(line_no, "expected: evolve t1/2");
      }
      seq.events.push_back(SeqEvolveT1Half{});
    } else if (word == "inject") {
      std::string letters;
      if (!(ls >> letters)) seq_error(line_no, "inject needs Pauli letters");
      try {
        PauliString::from_letters(letters);
      } catch (const std::exception& e) {
        seq_error(line_no, e.what());
      }
      seq.events.push_back(SeqInject{letters});
    } else if (word == "prepare") {
      std::string name;
      if (!(ls >> name)) seq_error(line_no, "prepare needs an operator name");
      seq.events.push_back(SeqPrepare{name});
    } else if (word == "acquire") {
      SeqAcquire acq;
      if (!(ls >> acq.points >> acq.sw_hz >> acq.species)) {
        seq_error(line_no, "expected: acquire <points> <sw_hz> <species>");
      }
      if (acq.points == 0) seq_error(line_no, "acquire needs points > 0");
      if (!(acq.sw_hz > 0.0)) seq_error(line_no, "spectral width must be > 0");
      seq.events.push_back(acq);
      ++acquire_count;
    } else {
      seq_error(line_no, "unknown directive '" + word + "'");
    }

    std::string trailing;
    if (ls >> trailing) {
      seq_error(line_no, "trailing tokens starting at '" + trailing + "'");
    }
  }

  if (acquire_count != 1) {
    throw std::invalid_argument(
        "sequence must end with exactly one acquire line");
  }
  if (seq.gradient_count() > 2) {
    throw std::invalid_argument(
        "sequence allows at most one encode and one decode gradient");
  }
  return seq;
}

}  // namespace mqdfs
