#include "grokbench/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace grokbench {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void save_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "# rows=" << m.rows() << " cols=" << m.cols() << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

Eigen::MatrixXd load_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string header;
  std::getline(in, header);
  long rows = 0, cols = 0;
  if (std::sscanf(header.c_str(), "# rows=%ld cols=%ld", &rows, &cols) != 2)
    throw std::runtime_error("bad matrix header in " + path);
  Eigen::MatrixXd m(rows, cols);
  std::string line;
  for (long i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("truncated matrix file: " + path);
    std::stringstream ss(line);
    std::string cell;
    for (long j = 0; j < cols; ++j) {
      if (!std::getline(ss, cell, ',')) throw std::runtime_error("short row in " + path);
      m(i, j) = std::stod(cell);
    }
  }
  return m;
}

}  // namespace grokbench
