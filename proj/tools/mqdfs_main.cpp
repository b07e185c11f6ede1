// mqdfs: verification and simulation workbench for multiple-quantum
// decoherence-free subspaces in SI3-M spin systems.
//
// Subcommands: dfs-verify, simulate, decompose, compare.
// Exit codes: 0 success, 1 check failure, 2 usage error, 3 I/O error.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <cstring>
#include <sstream>

#include "mqdfs/dfs.hpp"
#include "mqdfs/grid_io.hpp"
#include "mqdfs/simulate.hpp"

namespace fs = std::filesystem;
using namespace mqdfs;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct CliError : std::runtime_error {
  int code;
  CliError(int code, const std::string& msg)
      : std::runtime_error(msg), code(code) {}
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError(kExitIo, "cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw CliError(kExitIo, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw CliError(kExitIo, "write failed for '" + path.string() + "'");
}

fs::path output_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("MQDFS_OUTPUT_DIR")) return env;
  return ".";
}

SpinSystem load_system(const std::string& config_path, std::string* hash) {
  if (config_path.empty() || config_path == "alanine") {
    SpinSystem system = preset_alanine();
    if (hash) *hash = fnv1a_hex(serialize_spin_config(system));
    return system;
  }
  std::string text = read_file(config_path);
  if (hash) *hash = fnv1a_hex(text);
  return parse_spin_config(text);
}

std::vector<int> parse_weights(const std::string& csv) {
  std::vector<int> weights;
  std::istringstream in(csv);
  std::string token;
  while (std::getline(in, token, ',')) {
    weights.push_back(std::stoi(token));
  }
  if (weights.empty()) throw CliError(kExitUsage, "empty weight list");
  return weights;
}

Spectrum2D read_spectrum(const fs::path& base) {
  std::string hdr = read_file(base.string() + ".hdr");
  std::istringstream in(hdr);
  std::string key;
  Spectrum2D spec;
  double f1_start = 0, f1_step = 0, f2_start = 0, f2_step = 0;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    ls >> key;
    if (key == "rows") ls >> spec.n_f1;
    else if (key == "cols") ls >> spec.n_f2;
    else if (key == "row_axis" || key == "col_axis") {
      std::string name, start_kv, step_kv;
      ls >> name >> start_kv >> step_kv;
      double start = std::stod(start_kv.substr(start_kv.find('=') + 1));
      double step = std::stod(step_kv.substr(step_kv.find('=') + 1));
      if (key == "row_axis") { f1_start = start; f1_step = step; }
      else { f2_start = start; f2_step = step; }
    } else if (key == "kind") {
      std::string kind;
      ls >> kind;
      if (kind != "spectrum2d") {
        throw CliError(kExitIo, "'" + base.string() + "' is not a spectrum");
      }
    }
  }
  if (spec.n_f1 == 0 || spec.n_f2 == 0) {
    throw CliError(kExitIo, "bad header in '" + base.string() + ".hdr'");
  }
  std::string bin = read_file(base.string() + ".bin");
  if (bin.size() != spec.n_f1 * spec.n_f2 * sizeof(double)) {
    throw CliError(kExitIo, "grid size mismatch in '" + base.string() + ".bin'");
  }
  spec.magnitude.resize(spec.n_f1 * spec.n_f2);
  std::memcpy(spec.magnitude.data(), bin.data(), bin.size());
  spec.f1_hz.resize(spec.n_f1);
  spec.f2_hz.resize(spec.n_f2);
  for (std::size_t i = 0; i < spec.n_f1; ++i) spec.f1_hz[i] = f1_start + f1_step * i;
  for (std::size_t j = 0; j < spec.n_f2; ++j) spec.f2_hz[j] = f2_start + f2_step * j;
  return spec;
}

int cmd_dfs_verify(const std::string& family, const std::string& basis_path,
                   const std::string& out_path) {
  LogicalBasis basis = logical_basis();
  if (!basis_path.empty()) {
    std::vector<OperatorSum> ops = parse_operator_list(read_file(basis_path));
    if (ops.size() != 4) {
      throw CliError(kExitUsage,
                     "basis file must hold four operators separated by ---");
    }
    for (std::size_t i = 0; i < 4; ++i) basis.rho[i] = ops[i];
  }
  DfsReport report = dfs_report(basis, family);
  std::string text = report.render();
  std::cout << text;
  if (!out_path.empty()) write_text(out_path, text);
  return report.all_pass() ? kExitOk : kExitCheckFailed;
}

SpinSystem override_t2(const SpinSystem& system,
                       const std::vector<std::string>& entries) {
  if (entries.empty()) return system;
  std::map<std::string, double> t2 = system.t2_map();
  for (const std::string& entry : entries) {
    std::size_t eq = entry.find('=');
    if (eq == std::string::npos) {
      throw CliError(kExitUsage, "--t2 expects LABEL=SECONDS, got '" + entry +
                                     "'");
    }
    t2[entry.substr(0, eq)] = std::stod(entry.substr(eq + 1));
  }
  return SpinSystem(system.spins(), system.couplings(), std::move(t2));
}

int cmd_simulate(const std::string& config_path, const std::string& seq_path,
                 const std::string& out_flag, RunOptions options,
                 const std::string& interferogram_label, bool full_grid,
                 const std::vector<std::string>& t2_overrides,
                 double peak_threshold) {
  std::string config_hash;
  SpinSystem system = override_t2(load_system(config_path, &config_hash),
                                  t2_overrides);
  fs::path dir = output_dir(out_flag);
  std::error_code ec;
  fs::create_directories(dir, ec);

  if (!interferogram_label.empty()) {
    std::vector<double> values =
        run_interferogram(system, interferogram_label, options.t1_points,
                          options.t1_sw_hz, options.relaxation, true);
    write_text(dir / ("interferogram_" + interferogram_label + ".tsv"),
               interferogram_tsv(values, 1.0 / options.t1_sw_hz));
    std::cout << "wrote " << (dir / ("interferogram_" + interferogram_label +
                                     ".tsv")).string()
              << "\n";
    return kExitOk;
  }

  if (seq_path.empty()) {
    throw CliError(kExitUsage, "simulate needs --seq <file>");
  }
  std::string seq_text = read_file(seq_path);
  std::string seq_hash = fnv1a_hex(seq_text);
  PulseSequence seq = parse_sequence(seq_text);
  if (full_grid) options.t2_points = 10000;

  Raw2D raw = run_sequence(system, seq, options);
  Spectrum2D spec = process_2d(raw);
  PeakList peaks = peak_pick(spec, peak_threshold);

  write_raw2d(raw, dir / "raw", config_hash, seq_hash);
  write_spectrum2d(spec, dir / "spectrum", config_hash, seq_hash);
  write_text(dir / "peaks.tsv", peaks_tsv(peaks));
  write_text(dir / "spectrum.tsv", spectrum_tsv(spec));

  if (options.grad_mode == GradMode::kEnsemble) {
    // Leakage metric: pathway kernels for every encode order against the
    // detected order, plus the suppressed-band spectral ratio.
    std::ostringstream leak;
    leak.precision(6);
    leak << "pathway\tkernel_magnitude\n";
    GradientEvent ge{-8.0}, gd{10.0};
    // Pull the actual strengths from the sequence when present.
    std::vector<double> strengths;
    for (const auto& e : seq.events) {
      if (const auto* g = std::get_if<SeqGradient>(&e)) {
        if (g->strength != 0.0) strengths.push_back(g->strength);
      }
    }
    if (strengths.size() == 2) {
      ge.strength = strengths[0];
      gd.strength = strengths[1];
    }
    for (int pe : {13, 11, 5, 3, -3, -5, -11, -13}) {
      Complex k = ensemble_kernel(ge, gd, pe, 4, options.nz, options.sampling,
                                  options.seed);
      leak << pe << "->4\t" << std::abs(k) << '\n';
    }
    write_text(dir / "leakage.tsv", leak.str());
  }

  std::cout << "wrote raw/spectrum grids and peaks.tsv under " << dir.string()
            << "\n";
  for (std::size_t i = 0; i < std::min<std::size_t>(peaks.size(), 12); ++i) {
    std::cout << "peak f1=" << peaks[i].f1_hz << " Hz f2=" << peaks[i].f2_hz
              << " Hz amp=" << peaks[i].amplitude << "\n";
  }
  return kExitOk;
}

int cmd_decompose(const std::string& op_path, const std::string& weights_csv,
                  const std::string& out_path) {
  OperatorSum op = parse_operator(read_file(op_path));
  std::vector<int> weights = weights_csv.empty()
                                 ? plain_weights(op.n_spins())
                                 : parse_weights(weights_csv);
  CoherenceDecomposition decomp = coherence_decompose(op, weights);
  std::ostringstream out;
  for (const auto& [order, comp] : decomp.components()) {
    out << "# order " << order << "\n" << serialize_operator(comp);
  }
  // The zero-quantum pitfall: transverse flip-flop terms carry order 0 even
  // though pair terms like IxIx + IyIy are often labelled +/-2 quantum.
  bool flip_flop = decomp.components().count(0) &&
                   decomp.component(0).n_terms() > 0;
  if (flip_flop) {
    out << "# note: order 0 holds every flip-flop (I+I- style) term; "
           "transverse pair operators are zero-quantum under the ladder "
           "expansion\n";
  }
  std::cout << out.str();
  if (!out_path.empty()) write_text(out_path, out.str());
  return kExitOk;
}

int cmd_compare(const std::string& a_path, const std::string& b_path,
                double tol) {
  Spectrum2D a = read_spectrum(a_path);
  Spectrum2D b = read_spectrum(b_path);
  CompareReport report = compare_spectra(a, b, tol);
  std::cout << "max_rel_diff " << report.max_rel_diff << " tol " << tol << ' '
            << (report.pass ? "PASS" : "FAIL") << "\n";
  return report.pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiple-quantum DFS verification and MQ-JRES simulation"};
  app.require_subcommand(1);

  // dfs-verify
  auto* verify = app.add_subcommand(
      "dfs-verify", "run the DFS verification suite and emit a report");
  std::string family = "all", basis_path, report_path;
  verify->add_option("--family", family, "en, em or all")
      ->check(CLI::IsMember({"en", "em", "all"}));
  verify->add_option("--basis", basis_path,
                     "verify four operators from a file instead of the "
                     "built-in basis");
  verify->add_option("--out", report_path, "also write the report here");

  // simulate
  auto* simulate = app.add_subcommand(
      "simulate", "run the 2D MQ-JRES experiment and process the spectrum");
  std::string config_path, seq_path, out_flag, grad_mode = "exact";
  std::string inject_letters, interferogram_label, sampling = "uniform";
  RunOptions options;
  bool full_grid = false, no_relax = false;
  std::size_t t2_points = 0;
  std::vector<std::string> t2_overrides;
  double peak_threshold = 0.05;
  simulate->add_option("--config", config_path,
                       "spin config file (default: built-in alanine preset)");
  simulate->add_option("--seq", seq_path, "pulse sequence file");
  simulate->add_option("--out-dir", out_flag,
                       "output directory (or MQDFS_OUTPUT_DIR)");
  simulate->add_option("--t1-points", options.t1_points, "t1 increments");
  simulate->add_option("--t1-sw", options.t1_sw_hz, "F1 spectral width, Hz");
  simulate->add_option("--t2-points", t2_points, "override acquire points");
  simulate->add_option("--grad-mode", grad_mode, "exact or ensemble")
      ->check(CLI::IsMember({"exact", "ensemble"}));
  simulate->add_option("--nz", options.nz, "ensemble positions");
  simulate->add_option("--sampling", sampling, "uniform or random-offset")
      ->check(CLI::IsMember({"uniform", "random-offset"}));
  simulate->add_option("--seed", options.seed, "random-offset seed");
  simulate->add_option("--inject", inject_letters,
                       "Pauli letters conjugated in at position c");
  simulate->add_option("--interferogram", interferogram_label,
                       "skip the 2D run; write the echo interferogram of this "
                       "coherence (QQ, DQ1, DQ2, ZQ)");
  simulate->add_option("--threads", options.threads,
                       "worker threads (0 = cores)");
  simulate->add_flag("--full-grid", full_grid, "use the full 10000-point t2");
  simulate->add_flag("--no-relax", no_relax, "disable relaxation");
  simulate->add_option("--t2", t2_overrides,
                       "override a T2 entry, LABEL=SECONDS (repeatable)");
  simulate->add_option("--peak-threshold", peak_threshold,
                       "peak pick floor as a fraction of the maximum");

  // decompose
  auto* decompose = app.add_subcommand(
      "decompose", "split an operator file by weighted coherence order");
  std::string op_path, weights_csv, decompose_out;
  decompose->add_option("--op", op_path, "operator file")->required();
  decompose->add_option("--weights", weights_csv,
                        "comma-separated integer gamma weights (default all 1)");
  decompose->add_option("--out", decompose_out, "also write the listing here");

  // compare
  auto* compare = app.add_subcommand(
      "compare", "compare two spectrum grids written by simulate");
  std::string a_path, b_path;
  double tol = 1e-6;
  compare->add_option("--a", a_path, "first spectrum base path")->required();
  compare->add_option("--b", b_path, "second spectrum base path")->required();
  compare->add_option("--tol", tol, "relative tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "ERROR " << kExitUsage << " " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*verify) return cmd_dfs_verify(family, basis_path, report_path);
    if (*simulate) {
      options.grad_mode =
          grad_mode == "exact" ? GradMode::kExact : GradMode::kEnsemble;
      options.sampling = sampling == "uniform"
                             ? GradientSampling::kUniform
                             : GradientSampling::kRandomOffset;
      options.relaxation = !no_relax;
      if (t2_points != 0) options.t2_points = t2_points;
      if (!inject_letters.empty()) options.inject = inject_letters;
      return cmd_simulate(config_path, seq_path, out_flag, options,
                          interferogram_label, full_grid, t2_overrides,
                          peak_threshold);
    }
    if (*decompose) return cmd_decompose(op_path, weights_csv, decompose_out);
    if (*compare) return cmd_compare(a_path, b_path, tol);
  } catch (const CliError& e) {
    std::cerr << "ERROR " << e.code << " " << e.what() << "\n";
    return e.code;
  } catch (const std::invalid_argument& e) {
    std::cerr << "ERROR " << kExitUsage << " " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "ERROR " << kExitIo << " " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
