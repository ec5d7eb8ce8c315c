#pragma once

#include "vatom/density.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace vatom {

/// Binary layout, all little-endian:
///
///     "VATOMSR\0"  u32 version  u32 flags  u64 count  f64 dt  f64 t0
///     u32 n + label bytes   u32 n + origin bytes   count x f64 values
///
/// flags bit 0 marks a partial series.
inline constexpr char series_magic[8] = {'V', 'A', 'T', 'O', 'M', 'S', 'R', '\0'};
inline constexpr std::uint32_t series_version = 1;

void save_series_binary(const std::filesystem::path& path, const ObservableSeries& series);
ObservableSeries load_series_binary(const std::filesystem::path& path);

/// CSV with `# key=value` metadata lines, a `t,value` header and one row per
/// sample, numbers at 17 significant digits.
void save_series_csv(const std::filesystem::path& path, const ObservableSeries& series);
ObservableSeries load_series_csv(const std::filesystem::path& path);

/// Picks the reader from the file's leading bytes.
ObservableSeries load_series(const std::filesystem::path& path);

/// Shortest round-tripping decimal form is not needed; %.17g is.
std::string format_double(double v);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace vatom
