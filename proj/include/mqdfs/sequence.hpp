#pragma once

#include <variant>

#include "mqdfs/pauli.hpp"

namespace mqdfs {

// Events keep their target tokens; resolution against a SpinSystem happens
// at run time so the same sequence file works across systems.

/// `pulse` lines are selective: the token names one spin label or a label
/// group prefix (I -> I1, I2, I3). `pulse180` lines are hard channel pulses:
/// every spin sharing a gamma weight with a matched spin is flipped, the way
/// a spectrometer band pulse hits a whole nuclide.
struct SeqPulse {
  std::vector<std::string> targets;
  double angle = 0.0;  // radians
  double phase = 0.0;  // radians
  bool channel = false;
};

struct SeqDelay {
  double seconds = 0.0;
};

struct SeqGradient {
  double strength = 0.0;
};

/// One half of the indirect evolution period; the runner substitutes the
/// current t1 increment.
struct SeqEvolveT1Half {};

/// Conjugates the state by a Pauli string (ideal error injection). Letters
/// shorter than the system are padded with E on the right.
struct SeqInject {
  std::string letters;
};

/// Replaces the state by a named operator (ideal preparation).
struct SeqPrepare {
  std::string name;
};

struct SeqAcquire {
  std::size_t points = 0;
  double sw_hz = 0.0;
  std::string species;
};

using SequenceEvent = std::variant<SeqPulse, SeqDelay, SeqGradient,
                                   SeqEvolveT1Half, SeqInject, SeqPrepare,
                                   SeqAcquire>;

struct PulseSequence {
  std::vector<SequenceEvent> events;

  const SeqAcquire& acquire() const;
  std::size_t gradient_count() const;
  std::size_t evolve_count() const;
};

/// Parses the line-oriented sequence DSL with line-numbered diagnostics.
/// Delay values accept arithmetic expressions, e.g. `delay 1/(2*129.8)`.
PulseSequence parse_sequence(std::string_view text);

/// Arithmetic on numbers with + - * / and parentheses; used by delay values.
double eval_arithmetic(std::string_view expr);

}  // namespace mqdfs
