#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace helmfov::harness {

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

/// In-memory CSV table with a fixed header; rows must match its width.
class CsvTable {
 public:
  CsvTable() = default;
  explicit CsvTable(std::vector<std::string> header);

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  std::size_t num_rows() const { return rows_.size(); }

  void add_row(std::vector<std::string> cells);
  /// Column index by name; throws std::out_of_range.
  std::size_t column(const std::string& name) const;
  const std::string& cell(std::size_t row, const std::string& name) const;

  void write(std::ostream& os) const;
  void write(const std::filesystem::path& path) const;
  std::string to_string() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace helmfov::harness
