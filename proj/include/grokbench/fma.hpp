#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "grokbench/dataset.hpp"
#include "grokbench/linalg.hpp"
#include "grokbench/measures.hpp"

namespace grokbench {

enum class FmaMode { Add, Sub };

/// Fourier multiplication algorithm over one-hot digit pairs.
struct FmaModel {
  int p;
  FmaMode mode;
  CMatrix f;  // unitary DFT
};

FmaModel make_fma(int p, FmaMode mode);

/// Raw complex output for class `cls`:
///   Add: sqrt(p) <F x1 . F x2, F e_cls>_C
///   Sub: sqrt(p) <F x1 . F e_((p-cls) mod p), F x2>_C
/// On one-hot inputs the imaginary part vanishes up to roundoff.
std::complex<double> fma_eval_complex(const FmaModel& model, const Vector& x, int cls);

/// Real part of fma_eval_complex.
double fma_eval(const FmaModel& model, const Vector& x, int cls);

/// True iff the length-p FMA output equals the task's one-hot label for every
/// discrete pair, entrywise within tol. max_err, when given, receives the
/// largest deviation found.
bool fma_table_check(const FmaModel& model, const ModTask& task, double tol = 1e-8,
                     double* max_err = nullptr);

/// Per-class quadratic-kernel machines with block-circulant feature matrices
/// M_l = [[0, B^l],[B^l^T, 0]], fitted ridgeless on the full table.
/// Subtraction form: B^l = C^l with C the circulant with first row e_1.
/// Addition form: B^l = C^l R with R the order-reversing Hankel.
struct Theorem1Ensemble {
  int p;
  FmaMode mode;
  std::vector<Matrix> m;      // per-class feature matrices, 2p x 2p
  std::vector<Matrix> alpha;  // per-class coefficients reshaped to p x p (row a, col b)
};

Theorem1Ensemble theorem1_build(int p);
Theorem1Ensemble theorem1_addition_variant(int p);

struct Theorem1Report {
  // (i) predictor vs the bilinear form on all discrete inputs
  double bilinear_discrete_err = 0.0;
  // (ii) predictor vs FMA on all discrete inputs, and the bilinear identity
  //      vs FMA on random real-valued inputs (out-of-domain)
  double fma_discrete_err = 0.0;
  double fma_random_err = 0.0;
  // (iii) residual of the interpolation system the coefficients must satisfy
  double system_residual = 0.0;
  // least-squares fit of the rank-one offset in alpha = C^(3l)/2 + lambda 11^T
  double lambda_fit = 0.0;
  double lambda_fit_residual = 0.0;
  std::string lambda_match;  // which published constant the fit agrees with

  bool pass(double tol = 1e-8) const;
};

Theorem1Report theorem1_verify(const Theorem1Ensemble& ens, int n_random = 100,
                               std::uint64_t seed = 2024);

/// Index-4 encoder/decoder construction: unit-circle phase encoding with
/// complex multiplication and a hard-argmax decoder.
struct LowRankModel {
  int p;
  Op mode;         // Add or Mul
  Matrix encoder;  // 4 x 2p real matrix (re/im of both digit encodings)
  Generator gen;   // Mul only
};

LowRankModel lowrank_build(int p, Op mode);
int lowrank_predict(const LowRankModel& model, int a, int b);

/// Singular values of the encoder map, zero-padded beyond the fourth (a
/// 4 x 2p operator has at most four).
Vector encoder_singular_values(const LowRankModel& model, int count);

}  // namespace grokbench
