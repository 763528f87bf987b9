#pragma once

#include <filesystem>
#include <optional>

#include "lsmkit/forward.hpp"
#include "lsmkit/inversion.hpp"

namespace lsm {

// LSMD binary container, version 1, all fields little-endian:
//   magic "LSMD" | u32 version | u32 n_freq | u32 n_rx | u32 n_tx |
//   u64 seed | u8 noise_applied | f64 snr_db (0 when absent) |
//   per frequency: n_rx * n_tx interleaved (re, im) f64 pairs,
//   column-major (transmitter-major).
// A JSON sidecar <base>.json mirrors the metadata (frequencies, receiver
// indices, geometry hash) needed to interpret the rows.

// Writes <base>.lsmd and <base>.json atomically.
void save_dataset(const std::filesystem::path& base, const ScatteringDataset& dataset);

// Loads both files; optionally restricts receivers at load time.
ScatteringDataset load_dataset(const std::filesystem::path& base,
                               const std::optional<ApertureSelection>& aperture = std::nullopt);

// Indicator-map exports: raw CSV grid, 8-bit PGM after min-max normalization
// (row 0 = top of the DOI, i.e. largest y), and a JSON metadata sidecar.
void write_indicator_csv(const std::filesystem::path& path, const IndicatorMap& map);
void write_indicator_pgm(const std::filesystem::path& path, const IndicatorMap& map);
void write_indicator_json(const std::filesystem::path& path, const IndicatorMap& map);

} // namespace lsm
