#include "helmfov/matrix_market.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace helmfov {
namespace {

// 16 significant digits: assembly round-off such as 0.12499999999999999
// prints as 0.125.
std::string format_double(double v) {
  std::array<char, 40> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 16);
  return std::string(buf.data(), res.ptr);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

void write_matrix_market(std::ostream& out, const SparseComplexMatrix& a) {
  out << "%%MatrixMarket matrix coordinate complex general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index k = a.row_ptr()[static_cast<std::size_t>(i)];
         k < a.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k) {
      const Complex v = a.values()[static_cast<std::size_t>(k)];
      out << (i + 1) << ' ' << (a.col_idx()[static_cast<std::size_t>(k)] + 1) << ' '
          << format_double(v.real()) << ' ' << format_double(v.imag()) << '\n';
    }
  }
}

void export_matrixmarket(const SparseComplexMatrix& a, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_matrix_market(out, a);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void export_matrixmarket(const SparseRealMatrix& a, const std::filesystem::path& path) {
  export_matrixmarket(linear_combination<Complex, double>({Complex(1.0)}, {&a}), path);
}

SparseComplexMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("MatrixMarket: empty input");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "coordinate") {
    throw std::runtime_error("MatrixMarket: unsupported banner '" + line + "'");
  }
  field = lower(field);
  symmetry = lower(symmetry);
  const bool is_complex = field == "complex";
  if (!is_complex && field != "real" && field != "integer") {
    throw std::runtime_error("MatrixMarket: unsupported field " + field);
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream dims(line);
  Index rows = 0, cols = 0, nnz = 0;
  if (!(dims >> rows >> cols >> nnz)) throw std::runtime_error("MatrixMarket: bad size line");

  std::vector<Triplet<Complex>> t;
  t.reserve(static_cast<std::size_t>(nnz));
  for (Index k = 0; k < nnz; ++k) {
    Index i = 0, j = 0;
    double re = 0.0, im = 0.0;
    if (!(in >> i >> j >> re)) throw std::runtime_error("MatrixMarket: truncated entries");
    if (is_complex && !(in >> im)) throw std::runtime_error("MatrixMarket: truncated entries");
    const Complex v(re, im);
    t.push_back({i - 1, j - 1, v});
    if (i != j) {
      if (symmetry == "symmetric") t.push_back({j - 1, i - 1, v});
      if (symmetry == "hermitian") t.push_back({j - 1, i - 1, std::conj(v)});
      if (symmetry == "skew-symmetric") t.push_back({j - 1, i - 1, -v});
    }
  }
  return SparseComplexMatrix::from_triplets(rows, cols, std::move(t));
}

SparseComplexMatrix import_matrixmarket(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_matrix_market(in);
}

}  // namespace helmfov
