#pragma once

#include <filesystem>

#include "mqdfs/simulate.hpp"

namespace mqdfs {

/// FNV-1a 64-bit hex digest; used for config/sequence provenance stamps.
std::string fnv1a_hex(std::string_view data);

/// Writes a little-endian float64 grid (complex interleaved for raw data)
/// next to a structured-text .hdr sidecar carrying dimensions, axes and
/// provenance hashes.
void write_raw2d(const Raw2D& raw, const std::filesystem::path& base,
                 const std::string& config_hash,
                 const std::string& sequence_hash);

void write_spectrum2d(const Spectrum2D& spec, const std::filesystem::path& base,
                      const std::string& config_hash,
                      const std::string& sequence_hash);

/// TSV exports for plotting.
std::string spectrum_tsv(const Spectrum2D& spec);
std::string peaks_tsv(const PeakList& peaks);
std::string interferogram_tsv(const std::vector<double>& values,
                              double t1_dwell);

}  // namespace mqdfs
