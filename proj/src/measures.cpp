#include "grokbench/measures.hpp"

#include <cmath>
#include <stdexcept>

#include "grokbench/dataset.hpp"

namespace grokbench {

namespace {

// Shift row l so wrapped diagonals become columns, then sum column variances.
double wrapped_diagonal_variance(const Matrix& a) {
  const Eigen::Index p = a.rows();
  Matrix s(p, p);
  for (Eigen::Index l = 0; l < p; ++l)
    for (Eigen::Index j = 0; j < p; ++j) s(l, j) = a(l, (j + l) % p);
  double total = 0.0;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double mean = s.col(j).mean();
    total += (s.col(j).array() - mean).square().sum();
  }
  return total;
}

}  // namespace

double circulant_deviation(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("circulant_deviation: not square");
  const double norm2 = a.squaredNorm();
  if (norm2 == 0.0) throw std::invalid_argument("circulant_deviation: zero matrix");
  const double fwd = wrapped_diagonal_variance(a);
  const double rev = wrapped_diagonal_variance(a.colwise().reverse());
  return std::min(fwd, rev) / norm2;
}

double agop_alignment(const Matrix& a, const Matrix& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("agop_alignment: zero matrix");
  return a.cwiseProduct(b).sum() / (na * nb);
}

double pearson(const Matrix& a, const Matrix& b) {
  return agop_alignment(a.array() - a.mean(), b.array() - b.mean());
}

namespace {

Eigen::Index argmax_row(const Matrix& m, Eigen::Index row) {
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < m.cols(); ++j)
    if (m(row, j) > m(row, best)) best = j;
  return best;
}

}  // namespace

double accuracy(const Matrix& pred, const Matrix& y) {
  if (pred.rows() != y.rows() || pred.cols() != y.cols())
    throw std::invalid_argument("accuracy: shape mismatch");
  Eigen::Index hits = 0;
  for (Eigen::Index i = 0; i < pred.rows(); ++i)
    if (argmax_row(pred, i) == argmax_row(y, i)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(pred.rows());
}

double mse(const Matrix& pred, const Matrix& y) {
  if (pred.rows() != y.rows() || pred.cols() != y.cols())
    throw std::invalid_argument("mse: shape mismatch");
  return (pred - y).squaredNorm() / static_cast<double>(pred.size());
}

double correct_class_loss(const Matrix& pred, const Matrix& y) {
  if (pred.rows() != y.rows() || pred.cols() != y.cols())
    throw std::invalid_argument("correct_class_loss: shape mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < pred.rows(); ++i) {
    const double v = pred(i, argmax_row(y, i));
    total += (v - 1.0) * (v - 1.0);
  }
  return total / static_cast<double>(pred.rows());
}

Generator find_generator(int p) {
  if (!is_prime(p)) throw std::invalid_argument("find_generator: p must be prime");
  for (int g = 2; g < p; ++g) {
    int x = 1, order = 0;
    do {
      x = static_cast<int>(static_cast<long long>(x) * g % p);
      ++order;
    } while (x != 1);
    if (order == p - 1) {
      Generator gen;
      gen.g = g;
      gen.p = p;
      gen.dlog.assign(p, 0);
      x = 1;
      for (int i = 1; i < p; ++i) {
        x = static_cast<int>(static_cast<long long>(x) * g % p);
        gen.dlog[x] = i;
      }
      return gen;
    }
  }
  throw std::logic_error("find_generator: no generator found");  // unreachable for prime p
}

Matrix dlog_reorder(const Matrix& block, const Generator& gen) {
  const int p = gen.p;
  if (block.rows() != p || block.cols() != p)
    throw std::invalid_argument("dlog_reorder: block size must match the generator's modulus");
  std::vector<int> perm(p);
  perm[0] = 0;
  for (int r = 1; r < p; ++r) perm[r] = gen.phi(r);
  Matrix out(p, p);
  for (int r = 0; r < p; ++r)
    for (int c = 0; c < p; ++c) out(perm[r], perm[c]) = block(r, c);
  return out;
}

double circulant_deviation_reordered(const Matrix& block, const Generator& gen) {
  const Matrix r = dlog_reorder(block, gen);
  return circulant_deviation(r.block(1, 1, gen.p - 1, gen.p - 1));
}

}  // namespace grokbench
