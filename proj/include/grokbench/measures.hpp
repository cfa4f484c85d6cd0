#pragma once

#include <vector>

#include "grokbench/linalg.hpp"

namespace grokbench {

/// Normalized total variance of the wrapped diagonals: row l is shifted so a
/// circulant maps to constant columns, Var(v) = sum_j (v_j - mean)^2, and the
/// sum over columns is divided by |A|_F^2. The row-reversed block is also
/// measured and the minimum taken, so Hankel blocks score zero as well.
/// Exactly circulant (or Hankel) input gives 0. Throws on the zero matrix.
double circulant_deviation(const Matrix& a);

/// Cosine similarity of the vectorized matrices. Throws if either is zero.
double agop_alignment(const Matrix& a, const Matrix& b);

/// Cosine similarity after removing each matrix's mean entry.
double pearson(const Matrix& a, const Matrix& b);

/// Fraction of rows whose argmax matches (lowest index wins ties).
double accuracy(const Matrix& pred, const Matrix& y);

/// Mean over all m*p entries of the squared error.
double mse(const Matrix& pred, const Matrix& y);

/// Mean over rows of (pred[row, label] - 1)^2.
double correct_class_loss(const Matrix& pred, const Matrix& y);

/// Generator g of Z_p^* with its discrete-logarithm table.
struct Generator {
  int g = 0;
  int p = 0;
  std::vector<int> dlog;  // dlog[g^i mod p] = i for i = 1..p-1; dlog[0] unused

  int phi(int r) const { return dlog[r]; }
};

/// Smallest generator of Z_p^*. Throws if p is not prime.
Generator find_generator(int p);

/// Moves entry (r, c), r,c in Z_p^*, to (phi(r), phi(c)); index 0 stays put.
Matrix dlog_reorder(const Matrix& block, const Generator& gen);

/// Deviation of the reordered (p-1)x(p-1) interior, the quantity tracked for
/// multiplication/division feature blocks.
double circulant_deviation_reordered(const Matrix& block, const Generator& gen);

}  // namespace grokbench
