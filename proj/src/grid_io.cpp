#include "mqdfs/grid_io.hpp"

#include <bit>
#include <fstream>
#include <sstream>

namespace mqdfs {

namespace {

void write_file(const std::filesystem::path& path, const std::string& data,
                bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() +
                             "' for writing");
  }
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string pack_doubles(const double* values, std::size_t count) {
  // Little-endian IEEE doubles; this is the native layout on every target
  // this project builds on, asserted at compile time.
  static_assert(std::endian::native == std::endian::little);
  return std::string(reinterpret_cast<const char*>(values),
                     count * sizeof(double));
}

}  // namespace

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  std::ostringstream out;
  out << std::hex << hash;
  return out.str();
}

void write_raw2d(const Raw2D& raw, const std::filesystem::path& base,
                 const std::string& config_hash,
                 const std::string& sequence_hash) {
  std::ostringstream hdr;
  hdr.precision(17);
  hdr << "format mqdfs-grid-1\n"
      << "kind raw2d\n"
      << "value complex128-interleaved\n"
      << "rows " << raw.n_t1 << "\n"
      << "cols " << raw.n_t2 << "\n"
      << "row_axis t1_s start=0 step=" << raw.t1_dwell << "\n"
      << "col_axis t2_s start=0 step=" << raw.t2_dwell << "\n"
      << "config_hash " << config_hash << "\n"
      << "sequence_hash " << sequence_hash << "\n";
  write_file(base.string() + ".hdr", hdr.str(), false);
  write_file(base.string() + ".bin",
             pack_doubles(reinterpret_cast<const double*>(raw.grid.data()),
                          raw.grid.size() * 2),
             true);
}

void write_spectrum2d(const Spectrum2D& spec, const std::filesystem::path& base,
                      const std::string& config_hash,
                      const std::string& sequence_hash) {
  std::ostringstream hdr;
  hdr.precision(17);
  hdr << "format mqdfs-grid-1\n"
      << "kind spectrum2d\n"
      << "value float64-magnitude\n"
      << "rows " << spec.n_f1 << "\n"
      << "cols " << spec.n_f2 << "\n"
      << "row_axis f1_hz start=" << spec.f1_hz.front()
      << " step=" << (spec.f1_hz[1] - spec.f1_hz[0]) << "\n"
      << "col_axis f2_hz start=" << spec.f2_hz.front()
      << " step=" << (spec.f2_hz[1] - spec.f2_hz[0]) << "\n"
      << "config_hash " << config_hash << "\n"
      << "sequence_hash " << sequence_hash << "\n";
  write_file(base.string() + ".hdr", hdr.str(), false);
  write_file(base.string() + ".bin",
             pack_doubles(spec.magnitude.data(), spec.magnitude.size()), true);
}

std::string spectrum_tsv(const Spectrum2D& spec) {
  std::ostringstream out;
  out.precision(10);
  out << "f1_hz\tf2_hz\tmagnitude\n";
  for (std::size_t i = 0; i < spec.n_f1; ++i) {
    for (std::size_t j = 0; j < spec.n_f2; ++j) {
      out << spec.f1_hz[i] << '\t' << spec.f2_hz[j] << '\t' << spec.at(i, j)
          << '\n';
    }
  }
  return out.str();
}

std::string peaks_tsv(const PeakList& peaks) {
  std::ostringstream out;
  out.precision(10);
  out << "f1_hz\tf2_hz\tamplitude\n";
  for (const Peak& p : peaks) {
    out << p.f1_hz << '\t' << p.f2_hz << '\t' << p.amplitude << '\n';
  }
  return out.str();
}

std::string interferogram_tsv(const std::vector<double>& values,
                              double t1_dwell) {
  std::ostringstream out;
  out.precision(12);
  out << "t1_s\tamplitude\n";
  for (std::size_t k = 0; k < values.size(); ++k) {
    out << static_cast<double>(k) * t1_dwell << '\t' << values[k] << '\n';
  }
  return out.str();
}

}  // namespace mqdfs
