#pragma once

#include "grokbench/linalg.hpp"

namespace grokbench {

enum class KernelKind { Quadratic, Gaussian };

struct KernelSpec {
  KernelKind kind = KernelKind::Quadratic;
  double bandwidth = 2.5;  // Gaussian only

  KernelSpec() = default;
  KernelSpec(KernelKind k, double L = 2.5);
};

/// Mahalanobis kernel value. Quadratic: (x^T M x')^2.
/// Gaussian: exp(-(x - x')^T M (x - x') / L).
double k_eval(const KernelSpec& spec, const Matrix& m, const Vector& x, const Vector& y);

/// Entrywise kernel matrix [k(x1_i, x2_j)]. One-hot rows are detected and the
/// Gram part is assembled by gathering rows/columns of M instead of dense
/// products.
Matrix kernel_matrix(const KernelSpec& spec, const Matrix& m, const Matrix& x1,
                     const Matrix& x2);

/// A ridgeless-fitted kernel predictor f(x) = k(x, X; M) alpha.
struct KernelMachine {
  KernelSpec spec;
  Matrix m;       // feature matrix, d x d symmetric PSD
  Matrix xtrain;  // n x d
  Matrix alpha;   // n x p
  double jitter = 0.0;
  bool jitter_retried = false;
};

KernelMachine fit(const KernelSpec& spec, const Matrix& m, const Matrix& xtrain,
                  const Matrix& ytrain);

Matrix predict(const KernelMachine& km, const Matrix& x);

/// d x p matrix whose column l is the gradient of output l at x.
Matrix jacobian(const KernelMachine& km, const Vector& x);

/// Average gradient outer product (1/n) sum_j J(x_j) J(x_j)^T over the rows
/// of x. Algebraically identical to accumulating jacobian() outer products,
/// assembled blockwise for speed.
Matrix agop(const KernelMachine& km, const Matrix& x);

}  // namespace grokbench
