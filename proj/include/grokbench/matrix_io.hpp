#pragma once

#include <Eigen/Core>
#include <string>

namespace grokbench {

// Shared matrix dump format: first line "# rows=R cols=C", then R lines of
// comma-separated decimal doubles printed with 17 significant digits.
void save_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd load_matrix_csv(const std::string& path);

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

}  // namespace grokbench
