#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "mqdfs/dense.hpp"
#include "mqdfs/grid_io.hpp"
#include "mqdfs/simulate.hpp"

using namespace mqdfs;

namespace {

constexpr double kPi = std::numbers::pi;

std::string data_file(const std::string& name) {
  std::ifstream in(std::string(MQDFS_DATA_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

PulseSequence shipped_sequence() {
  return parse_sequence(data_file("alanine_mqjres.seq"));
}

// Quadrature residual of the strongest t2 column against one coherence
// model: how much of the column is unexplained by A cos + B sin at that
// frequency with its decay envelope.
double single_frequency_residual(const Raw2D& raw, const SpinSystem& sys,
                                 const std::string& label) {
  std::size_t best = 0;
  double best_total = -1.0;
  for (std::size_t j = 0; j < raw.n_t2; ++j) {
    double total = 0.0;
    for (std::size_t k = 0; k < raw.n_t1; ++k) total += std::abs(raw.at(k, j));
    if (total > best_total) {
      best_total = total;
      best = j;
    }
  }
  double j_im = sys.coupling("I1", "M");
  double j_sm = sys.coupling("S", "M");
  double freq = label == "QQ"    ? 3 * j_im + j_sm
                : label == "DQ1" ? 3 * j_im - j_sm
                : label == "DQ2" ? j_im + j_sm
                                 : j_im - j_sm;
  Eigen::MatrixXcd basis(raw.n_t1, 2);
  Eigen::VectorXcd y(raw.n_t1);
  for (std::size_t k = 0; k < raw.n_t1; ++k) {
    double t1 = k * raw.t1_dwell;
    double envelope = std::exp(-t1 / sys.t2_for(label));
    basis(k, 0) = std::cos(kPi * freq * t1) * envelope;
    basis(k, 1) = std::sin(kPi * freq * t1) * envelope;
    y(k) = raw.at(k, best);
  }
  Eigen::VectorXcd c = basis.colPivHouseholderQr().solve(y);
  return (basis * c - y).norm() / y.norm();
}

}  // namespace

TEST_CASE("target resolution") {
  SpinSystem sys = preset_alanine();
  CHECK(resolve_targets(sys, "I2") == std::vector<std::size_t>{1});
  CHECK(resolve_targets(sys, "I") == std::vector<std::size_t>{0, 1, 2});
  CHECK(resolve_targets(sys, "S") == std::vector<std::size_t>{3});
  CHECK_THROWS_AS(resolve_targets(sys, "Q"), std::invalid_argument);

  // A hard channel pulse on the protons reaches M as well.
  CHECK(resolve_channel(sys, {"I"}) == std::vector<std::size_t>{0, 1, 2, 4});
  CHECK(resolve_channel(sys, {"I", "S"}) ==
        std::vector<std::size_t>{0, 1, 2, 3, 4});
  CHECK(resolve_channel(sys, {"S"}) == std::vector<std::size_t>{3});
}

TEST_CASE("named operators") {
  SpinSystem sys = preset_alanine();
  OperatorSum highest5 = resolve_named_operator(sys, "highest");
  CHECK(highest5.n_terms() == 1);
  CHECK(highest5.coefficient(PauliString::from_letters("XYYYE")) ==
        Complex{0.5, 0.0});

  OperatorSum dq2 = resolve_named_operator(sys, "dq2");
  CHECK(dq2.norm() == doctest::Approx(1.0));

  OperatorSum sum = resolve_named_operator(sys, "cohsum");
  CHECK(sum.norm() == doctest::Approx(1.0));

  CHECK_THROWS_AS(resolve_named_operator(sys, "bogus"),
                  std::invalid_argument);
}

TEST_CASE("part 1 of the shipped sequence lands on the highest state") {
  SpinSystem sys = preset_alanine();
  StateOp state = state_before_encode(sys, shipped_sequence());
  OperatorSum target = resolve_named_operator(sys, "highest");
  CHECK(hs_distance_up_to_phase(state.op, target) < 1e-10);
  // The shipped phases make the sign positive outright.
  CHECK((state.op - target).norm() < 1e-10);
}

TEST_CASE("interferograms match the per-coherence evolution model") {
  SpinSystem sys = preset_alanine();
  for (const std::string& label : mq_labels()) {
    auto values = run_interferogram(sys, label, 64, 30.0, true, true);
    for (std::size_t k = 0; k < values.size(); ++k) {
      double model = signal_model_eq7(label, k / 30.0, sys, true);
      REQUIRE(std::abs(values[k] - model) < 1e-8);
    }
  }
  SUBCASE("the analytic backend gives the same interferogram") {
    auto dense = run_interferogram(sys, "DQ2", 32, 30.0, true, true);
    auto analytic = run_interferogram(sys, "DQ2", 32, 30.0, true, false);
    for (std::size_t k = 0; k < dense.size(); ++k) {
      REQUIRE(dense[k] == doctest::Approx(analytic[k]).epsilon(1e-10));
    }
  }
  SUBCASE("the DQ2 zero crossing sits at 1/(2(J_IM+J_SM))") {
    const double t_zero = 1.0 / (2.0 * (7.3 + 4.5));
    CHECK(t_zero == doctest::Approx(0.042373).epsilon(1e-4));
    CHECK(std::abs(signal_model_eq7("DQ2", t_zero, sys, false)) < 1e-12);
  }
}

TEST_CASE("signal model basics") {
  SpinSystem sys = preset_alanine();
  for (const std::string& label : mq_labels()) {
    CHECK(signal_model_eq7(label, 0.0, sys) == 1.0);
  }
  CHECK_THROWS_AS(signal_model_eq7("XX", 0.1, sys), std::invalid_argument);
}

TEST_CASE("the DQ2-selected run modulates at the single DQ2 frequency") {
  SpinSystem sys = preset_alanine();
  RunOptions opt;
  opt.t1_points = 64;
  opt.t2_points = 256;
  Raw2D raw = run_sequence(sys, shipped_sequence(), opt);

  CHECK(single_frequency_residual(raw, sys, "DQ2") < 1e-8);

  auto amplitudes = modulation_amplitudes(raw, sys);
  CHECK(amplitudes["QQ"] / amplitudes["DQ2"] < 1e-6);
  CHECK(amplitudes["DQ1"] / amplitudes["DQ2"] < 1e-6);
  CHECK(amplitudes["ZQ"] / amplitudes["DQ2"] < 1e-6);
}

TEST_CASE("an ideally prepared QQ coherence modulates at the QQ frequency") {
  SpinSystem sys = preset_alanine();
  PulseSequence seq = parse_sequence(
      "prepare qq\n"
      "evolve t1/2\n"
      "pulse180 I S\n"
      "evolve t1/2\n"
      "pulse I2 90 x\n"
      "pulse I3 90 x\n"
      "delay 1/(2*129.8)\n"
      "pulse S 90 x\n"
      "acquire 128 4000 I\n");
  RunOptions opt;
  opt.t1_points = 32;
  Raw2D raw = run_sequence(sys, seq, opt);
  CHECK(single_frequency_residual(raw, sys, "QQ") < 1e-8);
}

TEST_CASE("processing") {
  SUBCASE("a known F1 tone lands at +/- its frequency") {
    Raw2D raw;
    raw.n_t1 = 64;
    raw.n_t2 = 16;
    raw.t1_dwell = 1.0 / 30.0;
    raw.t2_dwell = 1.0 / 100.0;
    raw.grid.assign(raw.n_t1 * raw.n_t2, Complex{0.0, 0.0});
    const double tone = 5.9;
    for (std::size_t k = 0; k < raw.n_t1; ++k) {
      double amp = std::cos(2.0 * kPi * tone * k * raw.t1_dwell);
      for (std::size_t j = 0; j < raw.n_t2; ++j) {
        raw.grid[k * raw.n_t2 + j] =
            amp * std::exp(Complex{0.0, 2.0 * kPi * 10.0 * j * raw.t2_dwell});
      }
    }
    Spectrum2D spec = process_2d(raw);
    PeakList peaks = peak_pick(spec, 0.2);
    REQUIRE(peaks.size() >= 2);
    const double bin = 30.0 / static_cast<double>(spec.n_f1);
    bool plus = false, minus = false;
    for (const Peak& p : peaks) {
      if (std::abs(p.f1_hz - tone) <= bin) plus = true;
      if (std::abs(p.f1_hz + tone) <= bin) minus = true;
    }
    CHECK(plus);
    CHECK(minus);
  }
  SUBCASE("zero input gives a zero spectrum and no peaks") {
    Raw2D raw;
    raw.n_t1 = 8;
    raw.n_t2 = 8;
    raw.t1_dwell = raw.t2_dwell = 1.0 / 64.0;
    raw.grid.assign(64, Complex{0.0, 0.0});
    Spectrum2D spec = process_2d(raw);
    for (double v : spec.magnitude) CHECK(v == 0.0);
    CHECK(peak_pick(spec, 0.5).empty());
  }
  SUBCASE("the t2 stage preserves energy (unitary transform)") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Raw2D raw;
    raw.n_t1 = 4;
    raw.n_t2 = 100;  // not a power of two
    raw.t1_dwell = raw.t2_dwell = 1e-3;
    raw.grid.resize(raw.n_t1 * raw.n_t2);
    for (auto& v : raw.grid) v = Complex{dist(rng), dist(rng)};

    std::vector<Complex> rows = t2_spectrum_rows(raw);
    for (std::size_t k = 0; k < raw.n_t1; ++k) {
      double in = 0.0, out = 0.0;
      for (std::size_t j = 0; j < raw.n_t2; ++j) {
        double w = std::cos(kPi * 0.5 * j / static_cast<double>(raw.n_t2));
        in += std::norm(raw.at(k, j) * w);
        out += std::norm(rows[k * raw.n_t2 + j]);
      }
      REQUIRE(out == doctest::Approx(in).epsilon(1e-9));
    }
  }
  SUBCASE("peak threshold validation") {
    Raw2D raw;
    raw.n_t1 = 8;
    raw.n_t2 = 8;
    raw.t1_dwell = raw.t2_dwell = 1e-3;
    raw.grid.assign(64, Complex{1.0, 0.0});
    Spectrum2D spec = process_2d(raw);
    CHECK_THROWS_AS(peak_pick(spec, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(peak_pick(spec, 1.0), std::invalid_argument);
  }
}

TEST_CASE("F1 peaks of the selected and unfiltered runs") {
  SpinSystem sys = preset_alanine();
  RunOptions opt;
  opt.t1_points = 64;
  opt.t2_points = 512;

  SUBCASE("DQ2 selection puts the pair at +/-5.9 Hz and nothing else") {
    Raw2D raw = run_sequence(sys, shipped_sequence(), opt);
    Spectrum2D spec = process_2d(raw);
    PeakList peaks = peak_pick(spec);
    REQUIRE_FALSE(peaks.empty());
    bool plus = false, minus = false;
    for (const Peak& p : peaks) {
      if (std::abs(p.f1_hz - 5.9) <= 0.5) plus = true;
      if (std::abs(p.f1_hz + 5.9) <= 0.5) minus = true;
      for (double f : {13.2, 8.7, 1.4, -13.2, -8.7, -1.4}) {
        REQUIRE(std::abs(p.f1_hz - f) > 0.5);
      }
    }
    CHECK(plus);
    CHECK(minus);
  }
  SUBCASE("the unfiltered run shows all four multiplet pairs") {
    PulseSequence seq = parse_sequence(data_file("alanine_unfiltered.seq"));
    Raw2D raw = run_sequence(sys, seq, opt);
    Spectrum2D spec = process_2d(raw);
    PeakList peaks = peak_pick(spec);
    for (double f : {13.2, 8.7, 5.9, 1.4, -13.2, -8.7, -5.9, -1.4}) {
      bool found = false;
      for (const Peak& p : peaks) {
        if (std::abs(p.f1_hz - f) <= 0.5) found = true;
      }
      REQUIRE_MESSAGE(found, "missing F1 peak near ", f, " Hz");
    }
  }
}

TEST_CASE("spectra before and after injected errors") {
  SpinSystem sys = preset_alanine();
  RunOptions opt;
  opt.t1_points = 16;
  opt.t2_points = 128;
  PulseSequence seq = shipped_sequence();
  Spectrum2D baseline = process_2d(run_sequence(sys, seq, opt));

  SUBCASE("a spectrum equals itself") {
    CompareReport r = compare_spectra(baseline, baseline, 1e-12);
    CHECK(r.pass);
    CHECK(r.max_rel_diff == 0.0);
  }
  SUBCASE("the collective error of the before/after experiment is invisible") {
    RunOptions with = opt;
    with.inject = "XXXY";
    Spectrum2D after = process_2d(run_sequence(sys, seq, with));
    CompareReport r = compare_spectra(baseline, after, 1e-10);
    CHECK(r.pass);
  }
  SUBCASE("every collective-family member is invisible") {
    for (const auto& member : error_family("En").members) {
      RunOptions with = opt;
      with.inject = member.str();
      Spectrum2D after = process_2d(run_sequence(sys, seq, with));
      CompareReport r = compare_spectra(baseline, after, 1e-10);
      REQUIRE_MESSAGE(r.pass, "spectrum moved under ", member.str());
    }
  }
  SUBCASE("a partial-spin error changes the spectrum") {
    RunOptions with = opt;
    with.inject = "XEEE";
    Spectrum2D after = process_2d(run_sequence(sys, seq, with));
    CompareReport r = compare_spectra(baseline, after, 1e-6);
    CHECK_FALSE(r.pass);
    CHECK(r.max_rel_diff > 1e-3);
  }
  SUBCASE("a sample of non-eigen partial errors all move the spectrum") {
    OperatorSum dq2_state = resolve_named_operator(sys, "dq2");
    std::vector<std::string> movers;
    for (const auto& member : error_family("Em").members) {
      std::string padded = member.str() + "E";
      if (eigenoperator_check(dq2_state,
                              PauliString::from_letters(padded)) ==
          EigenSign::kNotEigen) {
        movers.push_back(member.str());
      }
    }
    REQUIRE(movers.size() == 132);  // 144 minus the 12 all-Z members
    std::mt19937 rng(2468);
    std::shuffle(movers.begin(), movers.end(), rng);
    for (std::size_t i = 0; i < 20; ++i) {
      RunOptions with = opt;
      with.inject = movers[i];
      Spectrum2D after = process_2d(run_sequence(sys, seq, with));
      CompareReport r = compare_spectra(baseline, after, 1e-6);
      REQUIRE_MESSAGE(!r.pass, "expected a visible change under ",
                      movers[i]);
    }
  }
  SUBCASE("grid mismatch is an error") {
    RunOptions other = opt;
    other.t2_points = 64;
    Spectrum2D small = process_2d(run_sequence(sys, seq, other));
    CHECK_THROWS_AS(compare_spectra(baseline, small, 1e-6),
                    std::invalid_argument);
  }
}

TEST_CASE("full partial-error sweep, partitioned by eigenoperator status" *
          doctest::timeout(300)) {
  // The slow exhaustive version of the sampled check above: every one of
  // the 144 partial-spin members either fixes the selected coherence up to
  // sign (the 12 all-Z members) and leaves the magnitude spectrum
  // untouched, or moves the spectrum above the comparison floor.
  SpinSystem sys = preset_alanine();
  PulseSequence seq = shipped_sequence();
  RunOptions opt;
  opt.t1_points = 8;
  opt.t2_points = 64;
  Spectrum2D baseline = process_2d(run_sequence(sys, seq, opt));
  OperatorSum dq2_state = resolve_named_operator(sys, "dq2");

  int eigen_members = 0, moved = 0;
  for (const auto& member : error_family("Em").members) {
    RunOptions with = opt;
    with.inject = member.str();
    Spectrum2D after = process_2d(run_sequence(sys, seq, with));
    double diff = compare_spectra(baseline, after, 1e-6).max_rel_diff;

    bool eigen = eigenoperator_check(
                     dq2_state, PauliString::from_letters(member.str() + "E")) !=
                 EigenSign::kNotEigen;
    if (eigen) {
      ++eigen_members;
      REQUIRE_MESSAGE(diff < 1e-10, member.str(),
                      " fixes the state but moved the spectrum");
    } else {
      REQUIRE_MESSAGE(diff > 1e-6, member.str(),
                      " should have moved the spectrum, diff=", diff);
      ++moved;
    }
  }
  CHECK(eigen_members == 12);
  CHECK(moved == 132);
}

TEST_CASE("ensemble gradient mode") {
  SpinSystem sys = preset_alanine();
  RunOptions opt;
  opt.t1_points = 32;
  opt.t2_points = 128;
  opt.grad_mode = GradMode::kEnsemble;
  opt.nz = 1024;
  Raw2D raw = run_sequence(sys, shipped_sequence(), opt);
  auto amplitudes = modulation_amplitudes(raw, sys);
  CHECK(amplitudes["QQ"] / amplitudes["DQ2"] < 1e-3);
  CHECK(amplitudes["DQ1"] / amplitudes["DQ2"] < 1e-3);
  CHECK(amplitudes["ZQ"] / amplitudes["DQ2"] < 1e-3);

  SUBCASE("aliased nz revives exactly the pathways it divides") {
    // Detection reads the +4 descendants, whose encode-order mismatches are
    // -8 pe + 40: ZQ's detectable branch (pe = -3, mismatch 64) and DQ1's
    // (pe = -11, mismatch 128) alias at nz = 64; QQ's (pe = -13, 144)
    // does not.
    RunOptions bad = opt;
    bad.nz = 64;
    Raw2D leaky = run_sequence(sys, shipped_sequence(), bad);
    auto amps = modulation_amplitudes(leaky, sys);
    CHECK(amps["ZQ"] / amps["DQ2"] > 1e-3);
    CHECK(amps["DQ1"] / amps["DQ2"] > 1e-3);
    CHECK(amps["QQ"] / amps["DQ2"] < 1e-6);
  }
}

TEST_CASE("runs are deterministic and thread-count independent") {
  SpinSystem sys = preset_alanine();
  RunOptions opt;
  opt.t1_points = 8;
  opt.t2_points = 64;
  opt.threads = 1;
  Raw2D a = run_sequence(sys, shipped_sequence(), opt);
  Raw2D b = run_sequence(sys, shipped_sequence(), opt);
  REQUIRE(a.grid.size() == b.grid.size());
  for (std::size_t i = 0; i < a.grid.size(); ++i) {
    REQUIRE(a.grid[i] == b.grid[i]);
  }
  opt.threads = 2;
  Raw2D c = run_sequence(sys, shipped_sequence(), opt);
  for (std::size_t i = 0; i < a.grid.size(); ++i) {
    REQUIRE(a.grid[i] == c.grid[i]);
  }
}

TEST_CASE("a single nonzero gradient is rejected") {
  SpinSystem sys = preset_alanine();
  PulseSequence seq = parse_sequence(
      "prepare highest\ngrad -8\nevolve t1/2\nacquire 16 1000 I\n");
  RunOptions opt;
  opt.t1_points = 2;
  CHECK_THROWS_AS(run_sequence(sys, seq, opt), std::invalid_argument);
}

TEST_CASE("grid files round trip through the sidecar header") {
  SpinSystem sys = preset_alanine();
  RunOptions opt;
  opt.t1_points = 4;
  opt.t2_points = 32;
  Raw2D raw = run_sequence(sys, shipped_sequence(), opt);
  Spectrum2D spec = process_2d(raw);

  auto dir = std::filesystem::temp_directory_path() / "mqdfs_grid_test";
  std::filesystem::create_directories(dir);
  write_raw2d(raw, dir / "raw", "cfg", "seq");
  write_spectrum2d(spec, dir / "spec", "cfg", "seq");

  std::ifstream hdr(dir / "raw.hdr");
  REQUIRE(hdr.good());
  std::string text((std::istreambuf_iterator<char>(hdr)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("rows 4") != std::string::npos);
  CHECK(text.find("cols 32") != std::string::npos);
  CHECK(text.find("config_hash cfg") != std::string::npos);

  auto size = std::filesystem::file_size(dir / "raw.bin");
  CHECK(size == raw.grid.size() * 2 * sizeof(double));
  std::filesystem::remove_all(dir);
}
