#include "helmfov/harness/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace helmfov::harness {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw std::invalid_argument("CsvTable: empty header");
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) {
    throw std::invalid_argument("CsvTable: row has " + std::to_string(cells.size()) +
                                " cells, header has " + std::to_string(header_.size()));
  }
  rows_.push_back(std::move(cells));
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  throw std::out_of_range("CsvTable: no column '" + name + "'");
}

const std::string& CsvTable::cell(std::size_t row, const std::string& name) const {
  return rows_.at(row).at(column(name));
}

void CsvTable::write(std::ostream& os) const {
  const auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << cells[i];
    }
    os << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
}

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write(os);
}

std::string CsvTable::to_string() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

}  // namespace helmfov::harness
