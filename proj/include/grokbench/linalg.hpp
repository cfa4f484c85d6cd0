#pragma once

#include <Eigen/Core>
#include <complex>

namespace grokbench {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// (A + A^T) / 2.
Matrix symmetrize(const Matrix& a);

struct SymEig {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns, A = V diag(values) V^T
};

/// Eigendecomposition of a symmetric matrix. Throws on non-finite input.
SymEig sym_eig(const Matrix& a);

/// M^s for symmetric PSD M: eigenvalues below 1e-12 * lambda_max are clamped
/// to zero before the fractional power. Throws if M is materially non-PSD
/// (lambda_min < -1e-6 * lambda_max).
Matrix psd_power(const Matrix& m, double s);

/// [M]_+^s: projects a symmetric matrix onto the PSD cone (all negative
/// eigenvalues to zero), then applies psd_power's clamped fractional power.
/// Used where an indefinite matrix is deliberately treated through its
/// positive part (random block-circulant feature matrices are indefinite).
Matrix positive_part_power(const Matrix& m, double s);

struct SpdSolve {
  Matrix solution;
  double jitter = 0.0;   // jitter that was actually applied
  bool retried = false;  // true if the zero-jitter factorization failed
};

/// Solves (K + jitter*I) alpha = Y by Cholesky. With jitter 0 a failed
/// factorization is retried once with jitter 1e-10 * trace(K)/n; a second
/// failure throws.
SpdSolve solve_spd(const Matrix& k, const Matrix& y, double jitter = 0.0);

/// Symmetric-indefinite solve (LDL^T with pivoting). For full-rank symmetric
/// systems that need not be positive definite.
Matrix solve_sym(const Matrix& k, const Matrix& y);

/// Unitary DFT matrix, F_jk = omega^(jk) / sqrt(d), omega = exp(-2*pi*i/d).
CMatrix dft(int d);

enum class BlockKind { Circulant, Hankel };

struct CirculantSpec {
  Vector first_row;
  BlockKind kind = BlockKind::Circulant;
};

/// Circulant: rows are c, sigma(c), ..., sigma^(p-1)(c) where sigma shifts
/// one cell to the right. Hankel: rows are c, sigma^-1(c), ...
Matrix circulant(const CirculantSpec& spec);

/// Checks the DFT diagonalization identity C = F diag(sqrt(p) F c) F^H with
/// c the first row, at relative Frobenius tolerance 1e-9.
bool circulant_diag_check(const Matrix& c, double tol = 1e-9);

/// Largest eigenvalue magnitude of a symmetric matrix.
double spectral_radius_sym(const Matrix& m);

}  // namespace grokbench
