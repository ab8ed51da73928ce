#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

namespace rram::harness {

/// Shortest round-trip decimal form; identical bytes for identical values.
inline std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_number failed");
  return std::string(buf, end);
}

inline std::string field(std::string_view s) { return std::string(s); }
inline std::string field(const char* s) { return s; }
inline std::string field(const std::string& s) { return s; }
inline std::string field(double v) { return format_number(v); }
inline std::string field(bool v) { return v ? "1" : "0"; }
template <typename I>
  requires(std::is_integral_v<I> && !std::is_same_v<I, bool>)
std::string field(I v) {
  return std::to_string(v);
}

/// Minimal CSV builder. Fields containing separators or quotes are quoted.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
    append_row(header_);
  }

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_; }
  const std::string& text() const { return text_; }

  template <typename... Fields>
  void add_row(const Fields&... fields) {
    commit({field(fields)...});
  }

 private:
  void commit(const std::vector<std::string>& cells) {
    if (cells.size() != header_.size())
      throw std::logic_error("csv row has " + std::to_string(cells.size()) +
                             " fields, header has " +
                             std::to_string(header_.size()));
    append_row(cells);
    ++rows_;
  }

  void append_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      const auto& c = cells[i];
      if (c.find_first_of(",\"\n") == std::string::npos) {
        text_ += c;
      } else {
        text_ += '"';
        for (char ch : c) {
          if (ch == '"') text_ += '"';
          text_ += ch;
        }
        text_ += '"';
      }
    }
    text_ += '\n';
  }

  std::vector<std::string> header_;
  std::string text_;
  std::size_t rows_ = 0;
};

/// Write via a sibling temporary file and rename, so readers never see a
/// partial file.
inline void write_file_atomic(const std::filesystem::path& path,
                              std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename to " + path.string() + ": " +
                             ec.message());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace rram::harness
