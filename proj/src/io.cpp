#include "psyn/io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "psyn/error.hpp"

namespace psyn {
namespace {

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
  throw ParseError("line " + std::to_string(line) + ": " + what);
}

[[noreturn]] void fail_offset(std::size_t offset, const std::string& what) {
  throw ParseError("offset " + std::to_string(offset) + ": " + what);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::uint64_t read_u64_le(std::string_view bytes, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(bytes[at + i]);
  return v;
}

void append_u64_le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

FileFormat parse_format(std::string_view name) {
  if (name == "auto") return FileFormat::kAuto;
  if (name == "csv") return FileFormat::kCsv;
  if (name == "packed") return FileFormat::kPacked;
  throw ConfigError("unknown format '" + std::string(name) + "' (expected auto, csv or packed)");
}

BitTable parse_csv(std::string_view text) {
  if (text.empty()) throw InputError("input is empty");
  BitTable out;
  std::size_t p = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::vector<Sign> row;
  bool first = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) fail_line(line_no, "empty line");

    if (first) {
      first = false;
      const auto tokens = split_commas(line);
      bool has_bit = false;
      for (auto t : tokens) has_bit = has_bit || t == "0" || t == "1";
      p = tokens.size();
      row.resize(p);
      if (!has_bit) {
        for (auto t : tokens) out.header.emplace_back(t);
        out.rows = Dataset(p);
        continue;
      }
      out.rows = Dataset(p);
    }

    // Fast path: "b,b,...,b" has exactly 2p - 1 characters.
    if (line.size() == 2 * p - 1) {
      bool ok = true;
      for (std::size_t j = 0; j < p && ok; ++j) {
        const char c = line[2 * j];
        ok = (c == '0' || c == '1') && (j + 1 == p || line[2 * j + 1] == ',');
        row[j] = c == '1' ? Sign{1} : Sign{-1};
      }
      if (ok) {
        out.rows.push_back(row);
        continue;
      }
    }
    const auto tokens = split_commas(line);
    if (tokens.size() != p)
      fail_line(line_no, "expected " + std::to_string(p) + " fields, found " + std::to_string(tokens.size()));
    for (std::size_t j = 0; j < p; ++j) {
      if (tokens[j] == "1") {
        row[j] = 1;
      } else if (tokens[j] == "0") {
        row[j] = -1;
      } else {
        fail_line(line_no, "field " + std::to_string(j + 1) + " is '" + std::string(tokens[j]) +
                               "', expected 0 or 1");
      }
    }
    out.rows.push_back(row);
  }
  return out;
}

std::string format_csv(const Dataset& rows, const std::vector<std::string>& header) {
  const std::size_t p = rows.dimension();
  if (!header.empty() && header.size() != p)
    throw InputError("header has " + std::to_string(header.size()) + " names for " + std::to_string(p) +
                     " columns");
  std::string out;
  out.reserve(rows.size() * 2 * p + 64);
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out.push_back(',');
    out += header[j];
  }
  if (!header.empty()) out.push_back('\n');
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows.row(i);
    for (std::size_t j = 0; j < p; ++j) {
      if (j) out.push_back(',');
      out.push_back(r[j] > 0 ? '1' : '0');
    }
    out.push_back('\n');
  }
  return out;
}

Dataset parse_packed(std::string_view bytes) {
  if (bytes.size() < kPackedHeaderBytes)
    fail_offset(bytes.size(), "file ends inside the " + std::to_string(kPackedHeaderBytes) + "-byte header");
  if (bytes.substr(0, kPackedMagic.size()) != kPackedMagic) fail_offset(0, "magic mismatch, expected PSYN1");
  const std::uint64_t p = read_u64_le(bytes, 5);
  const std::uint64_t n = read_u64_le(bytes, 13);
  if (p == 0) fail_offset(5, "dimension is zero");
  if (n != 0 && p > UINT64_MAX / n) fail_offset(13, "n * p overflows");
  const std::uint64_t nbits = n * p;
  const std::uint64_t payload = nbits / 8 + (nbits % 8 ? 1 : 0);
  const std::uint64_t expected = kPackedHeaderBytes + payload;
  if (bytes.size() != expected)
    fail_offset(std::min<std::uint64_t>(bytes.size(), expected),
                "file is " + std::to_string(bytes.size()) + " bytes, expected " + std::to_string(expected));

  Dataset out(p);
  out.reserve(n);
  std::vector<Sign> row(p);
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data() + kPackedHeaderBytes);
  std::uint64_t bit = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint64_t j = 0; j < p; ++j, ++bit)
      row[j] = (data[bit >> 3] >> (bit & 7)) & 1 ? Sign{1} : Sign{-1};
    out.push_back(row);
  }
  if (nbits % 8 && (data[payload - 1] >> (nbits % 8)) != 0)
    fail_offset(expected - 1, "padding bits are not zero");
  return out;
}

std::string format_packed(const Dataset& rows) {
  const std::size_t p = rows.dimension();
  if (p == 0) throw InputError("cannot pack a zero-dimensional dataset");
  const std::uint64_t nbits = static_cast<std::uint64_t>(rows.size()) * p;
  std::string out(kPackedMagic);
  append_u64_le(out, p);
  append_u64_le(out, rows.size());
  const std::size_t start = out.size();
  out.resize(start + nbits / 8 + (nbits % 8 ? 1 : 0), '\0');
  auto* data = reinterpret_cast<unsigned char*>(out.data() + start);
  const auto signs = rows.data();
  for (std::uint64_t b = 0; b < nbits; ++b)
    if (signs[b] > 0) data[b >> 3] |= static_cast<unsigned char>(1u << (b & 7));
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw InputError("error reading '" + path.string() + "'");
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw InputError("error writing '" + path.string() + "'");
}

BitTable ingest(const std::filesystem::path& path, FileFormat format) {
  const std::string bytes = read_file(path);
  if (bytes.empty()) throw InputError("'" + path.string() + "' is empty");
  if (format == FileFormat::kAuto)
    format = std::string_view(bytes).starts_with(kPackedMagic) ? FileFormat::kPacked : FileFormat::kCsv;
  try {
    if (format == FileFormat::kPacked) return BitTable{{}, parse_packed(bytes)};
    return parse_csv(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void emit(const std::filesystem::path& path, const BitTable& table, FileFormat format) {
  write_file(path, format == FileFormat::kPacked ? format_packed(table.rows)
                                                  : format_csv(table.rows, table.header));
}

}  // namespace psyn
