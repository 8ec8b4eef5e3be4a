#pragma once

// Dataset files. Bits b in {0,1} map to signs 2b - 1.
//
// CSV: comma-separated "0"/"1" tokens, LF line ends (a trailing CR is
// tolerated), one record per line, optional final newline. The first line is
// a header when none of its tokens is exactly "0" or "1".
//
// Packed: "PSYN1", then p and n as little-endian u64, then the n*p bits in
// row-major order as one continuous stream, least significant bit first in
// each byte, zero-padded to a whole byte. The file is exactly
// 21 + ceil(n*p/8) bytes.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "psyn/cube.hpp"

namespace psyn {

enum class FileFormat { kAuto, kCsv, kPacked };

/// "auto", "csv" or "packed"; throws ConfigError otherwise.
FileFormat parse_format(std::string_view name);

struct BitTable {
  std::vector<std::string> header;  // empty when the file had none
  Dataset rows;
};

inline constexpr std::string_view kPackedMagic = "PSYN1";
inline constexpr std::size_t kPackedHeaderBytes = 21;

/// Throws InputError on empty input, ParseError (with line number) on ragged
/// rows, non-bit tokens or a header that does not match the row width.
BitTable parse_csv(std::string_view text);
std::string format_csv(const Dataset& rows, const std::vector<std::string>& header = {});

/// Throws ParseError (with byte offset) on bad magic, size mismatch or p = 0.
Dataset parse_packed(std::string_view bytes);
std::string format_packed(const Dataset& rows);

/// Reads a whole file; throws InputError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);
/// Writes bytes to a file; throws InputError on failure.
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// kAuto picks packed when the file starts with the magic, CSV otherwise.
BitTable ingest(const std::filesystem::path& path, FileFormat format = FileFormat::kAuto);
/// kAuto writes CSV.
void emit(const std::filesystem::path& path, const BitTable& table, FileFormat format = FileFormat::kAuto);

}  // namespace psyn
