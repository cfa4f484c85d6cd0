#include "grokbench/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace grokbench {

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

SymEig sym_eig(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("sym_eig: matrix not square");
  if (!a.allFinite()) throw std::invalid_argument("sym_eig: non-finite entries");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a));
  if (es.info() != Eigen::Success) throw std::runtime_error("sym_eig: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

namespace {

Matrix clamped_power(const SymEig& eig, double s) {
  const double lmax = std::max(eig.values.maxCoeff(), 0.0);
  const double cut = 1e-12 * lmax;
  Vector w = eig.values;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    w[i] = (w[i] < cut) ? 0.0 : std::pow(w[i], s);
  return eig.vectors * w.asDiagonal() * eig.vectors.transpose();
}

}  // namespace

Matrix psd_power(const Matrix& m, double s) {
  if (s <= 0) throw std::invalid_argument("psd_power: exponent must be positive");
  SymEig eig = sym_eig(m);
  const double lmax = eig.values.maxCoeff();
  const double lmin = eig.values.minCoeff();
  if (lmin < -1e-6 * std::abs(lmax))
    throw std::runtime_error("psd_power: input is materially non-PSD");
  return clamped_power(eig, s);
}

Matrix positive_part_power(const Matrix& m, double s) {
  if (s <= 0) throw std::invalid_argument("positive_part_power: exponent must be positive");
  return clamped_power(sym_eig(m), s);
}

SpdSolve solve_spd(const Matrix& k, const Matrix& y, double jitter) {
  if (k.rows() != k.cols()) throw std::invalid_argument("solve_spd: K not square");
  if (k.rows() != y.rows()) throw std::invalid_argument("solve_spd: dimension mismatch");
  const auto factor_solve = [&](double j) -> Matrix {
    Matrix kj = k;
    if (j != 0.0) kj.diagonal().array() += j;
    Eigen::LLT<Matrix> llt(kj);
    if (llt.info() != Eigen::Success) throw std::runtime_error("llt");
    return llt.solve(y);
  };
  try {
    return {factor_solve(jitter), jitter, false};
  } catch (const std::runtime_error&) {
    const double fallback = 1e-10 * k.trace() / static_cast<double>(k.rows());
    try {
      return {factor_solve(fallback), fallback, true};
    } catch (const std::runtime_error&) {
      throw std::runtime_error("solve_spd: kernel matrix is singular (jitter retry failed)");
    }
  }
}

Matrix solve_sym(const Matrix& k, const Matrix& y) {
  if (k.rows() != k.cols() || k.rows() != y.rows())
    throw std::invalid_argument("solve_sym: dimension mismatch");
  Eigen::LDLT<Matrix> ldlt(symmetrize(k));
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("solve_sym: LDLT factorization failed");
  return ldlt.solve(y);
}

CMatrix dft(int d) {
  if (d <= 0) throw std::invalid_argument("dft: dimension must be positive");
  CMatrix f(d, d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      const double angle = -2.0 * M_PI * (static_cast<long long>(j) * k % d) / d;
      f(j, k) = std::polar(scale, angle);
    }
  return f;
}

Matrix circulant(const CirculantSpec& spec) {
  const Eigen::Index p = spec.first_row.size();
  if (p == 0) throw std::invalid_argument("circulant: empty first row");
  Matrix c(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const Eigen::Index shift = spec.kind == BlockKind::Circulant ? i : (p - i) % p;
    // row i = sigma^shift(first_row): entry j comes from first_row[(j - shift) mod p]
    for (Eigen::Index j = 0; j < p; ++j)
      c(i, j) = spec.first_row[((j - shift) % p + p) % p];
  }
  return c;
}

bool circulant_diag_check(const Matrix& c, double tol) {
  const Eigen::Index p = c.rows();
  if (p == 0 || c.cols() != p) throw std::invalid_argument("circulant_diag_check: not square");
  const CMatrix f = dft(static_cast<int>(p));
  const CVector diag = std::sqrt(static_cast<double>(p)) * (f * c.row(0).transpose());
  const CMatrix rebuilt = f * diag.asDiagonal() * f.adjoint();
  const double num = (rebuilt - c.cast<std::complex<double>>()).norm();
  const double den = c.norm();
  if (den == 0.0) return num < tol;
  return num / den < tol;
}

double spectral_radius_sym(const Matrix& m) {
  SymEig eig = sym_eig(m);
  return std::max(std::abs(eig.values.minCoeff()), std::abs(eig.values.maxCoeff()));
}

}  // namespace grokbench
