#include "grokbench/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace grokbench {

KernelSpec::KernelSpec(KernelKind k, double L) : kind(k), bandwidth(L) {
  if (bandwidth <= 0) throw std::invalid_argument("KernelSpec: bandwidth must be positive");
}

namespace {

struct SparseRows {
  std::vector<std::vector<std::pair<int, double>>> rows;
  bool sparse = false;  // worth using the gather path
};

SparseRows analyze_rows(const Matrix& x) {
  SparseRows s;
  s.rows.resize(x.rows());
  std::size_t nnz = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      if (x(i, j) != 0.0) s.rows[i].emplace_back(static_cast<int>(j), x(i, j));
    nnz += s.rows[i].size();
  }
  s.sparse = x.rows() > 0 && nnz <= 4 * static_cast<std::size_t>(x.rows());
  return s;
}

// x1 * M * x2^T, gathering through one-hot supports when available.
Matrix cross_gram(const Matrix& x1, const Matrix& m, const Matrix& x2) {
  const SparseRows s1 = analyze_rows(x1);
  const SparseRows s2 = analyze_rows(x2);
  if (!s1.sparse || !s2.sparse) return x1 * (m * x2.transpose());
  // mx2t = M * x2^T, one column per x2 row.
  Matrix mx2t = Matrix::Zero(m.rows(), x2.rows());
  for (Eigen::Index j = 0; j < x2.rows(); ++j)
    for (const auto& [v, val] : s2.rows[j]) mx2t.col(j) += val * m.col(v);
  Matrix g = Matrix::Zero(x1.rows(), x2.rows());
  for (Eigen::Index i = 0; i < x1.rows(); ++i)
    for (const auto& [u, val] : s1.rows[i]) g.row(i) += val * mx2t.row(u);
  return g;
}

Vector gram_diag(const Matrix& x, const Matrix& m) {
  const SparseRows s = analyze_rows(x);
  Vector q(x.rows());
  if (!s.sparse) {
    q = ((x * m).array() * x.array()).rowwise().sum();
    return q;
  }
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double v = 0.0;
    for (const auto& [u, a] : s.rows[i])
      for (const auto& [w, b] : s.rows[i]) v += a * b * m(u, w);
    q[i] = v;
  }
  return q;
}

void check_dims(const KernelSpec&, const Matrix& m, Eigen::Index d1, Eigen::Index d2) {
  if (m.rows() != m.cols()) throw std::invalid_argument("kernel: M not square");
  if (d1 != m.rows() || d2 != m.rows())
    throw std::invalid_argument("kernel: dimension mismatch");
}

}  // namespace

double k_eval(const KernelSpec& spec, const Matrix& m, const Vector& x, const Vector& y) {
  check_dims(spec, m, x.size(), y.size());
  if (spec.kind == KernelKind::Quadratic) {
    const double v = x.dot(m * y);
    return v * v;
  }
  const Vector diff = x - y;
  return std::exp(-diff.dot(m * diff) / spec.bandwidth);
}

Matrix kernel_matrix(const KernelSpec& spec, const Matrix& m, const Matrix& x1,
                     const Matrix& x2) {
  check_dims(spec, m, x1.cols(), x2.cols());
  if (spec.kind == KernelKind::Quadratic) {
    Matrix g = cross_gram(x1, m, x2);
    return g.array().square();
  }
  const Vector q1 = gram_diag(x1, m);
  const Vector q2 = gram_diag(x2, m);
  Matrix d = -2.0 * cross_gram(x1, m, x2);
  d.colwise() += q1;
  d.rowwise() += q2.transpose();
  return (-(d.array().max(0.0)) / spec.bandwidth).exp();
}

KernelMachine fit(const KernelSpec& spec, const Matrix& m, const Matrix& xtrain,
                  const Matrix& ytrain) {
  if (xtrain.rows() != ytrain.rows()) throw std::invalid_argument("fit: row mismatch");
  const Matrix k = kernel_matrix(spec, m, xtrain, xtrain);
  SpdSolve sol = solve_spd(k, ytrain, 0.0);
  KernelMachine km;
  km.spec = spec;
  km.m = m;
  km.xtrain = xtrain;
  km.alpha = std::move(sol.solution);
  km.jitter = sol.jitter;
  km.jitter_retried = sol.retried;
  return km;
}

Matrix predict(const KernelMachine& km, const Matrix& x) {
  return kernel_matrix(km.spec, km.m, x, km.xtrain) * km.alpha;
}

Matrix jacobian(const KernelMachine& km, const Vector& x) {
  if (x.size() != km.m.rows()) throw std::invalid_argument("jacobian: dimension mismatch");
  const Eigen::Index n = km.xtrain.rows();
  const Eigen::Index d = x.size();
  const Eigen::Index p = km.alpha.cols();
  Matrix j = Matrix::Zero(d, p);
  if (km.spec.kind == KernelKind::Quadratic) {
    // grad_l = sum_j alpha_jl * 2 (x^T M x_j) M x_j
    const Vector u = km.xtrain * (km.m * x);              // n
    const Matrix mxt = km.m * km.xtrain.transpose();      // d x n
    j = 2.0 * mxt * (u.asDiagonal() * km.alpha);
  } else {
    // grad_l = sum_j alpha_jl * k(x, x_j) * (-2/L) M (x - x_j)
    Vector w(n);
    for (Eigen::Index i = 0; i < n; ++i)
      w[i] = k_eval(km.spec, km.m, x, km.xtrain.row(i).transpose());
    const Vector s = km.alpha.transpose() * w;            // p
    const Matrix vt = km.xtrain.transpose() * (w.asDiagonal() * km.alpha);  // d x p
    j = (-2.0 / km.spec.bandwidth) * km.m * (x * s.transpose() - vt);
  }
  return j;
}

Matrix agop(const KernelMachine& km, const Matrix& x) {
  if (x.rows() == 0) throw std::invalid_argument("agop: empty sample set");
  if (x.cols() != km.m.rows()) throw std::invalid_argument("agop: dimension mismatch");
  const Eigen::Index n = km.xtrain.rows();
  const Eigen::Index m_eval = x.rows();
  const Eigen::Index d = x.cols();
  const Eigen::Index p = km.alpha.cols();
  const bool gaussian = km.spec.kind == KernelKind::Gaussian;

  // Column i of w holds k-weights of eval point i against the training set
  // (Gaussian) or the Gram values x_train M x_i (quadratic).
  const Matrix w = gaussian ? kernel_matrix(km.spec, km.m, km.xtrain, x)
                            : cross_gram(km.xtrain, km.m, x);
  Matrix s;  // p x m_eval, only used by the Gaussian path
  if (gaussian) s = km.alpha.transpose() * w;

  const SparseRows strain = analyze_rows(km.xtrain);
  const SparseRows seval = analyze_rows(x);

  // H = sum_i A_i A_i^T with A_i = [x_i s_i^T -] X^T diag(w_i) alpha;
  // blocks of A_i are stacked so the rank update runs as one syrk per chunk.
  const Eigen::Index chunk = std::max<Eigen::Index>(1, 8192 / std::max<Eigen::Index>(p, 1));
  Matrix h = Matrix::Zero(d, d);
  Matrix ablk(d, chunk * p);
  Matrix pw(n, p);
  for (Eigen::Index start = 0; start < m_eval; start += chunk) {
    const Eigen::Index c = std::min(chunk, m_eval - start);
    ablk.setZero();
    for (Eigen::Index i = 0; i < c; ++i) {
      auto a_i = ablk.middleCols((i)*p, p);
      pw = w.col(start + i).asDiagonal() * km.alpha;
      if (strain.sparse) {
        for (Eigen::Index jr = 0; jr < n; ++jr)
          for (const auto& [u, val] : strain.rows[jr]) a_i.row(u) -= val * pw.row(jr);
      } else {
        a_i.noalias() -= km.xtrain.transpose() * pw;
      }
      if (gaussian) {
        if (seval.sparse) {
          for (const auto& [u, val] : seval.rows[start + i])
            a_i.row(u) += val * s.col(start + i).transpose();
        } else {
          a_i.noalias() += x.row(start + i).transpose() * s.col(start + i).transpose();
        }
      }
    }
    h.selfadjointView<Eigen::Lower>().rankUpdate(ablk.leftCols(c * p));
  }
  h.triangularView<Eigen::Upper>() = h.transpose();

  const double scale = gaussian
      ? 4.0 / (km.spec.bandwidth * km.spec.bandwidth * static_cast<double>(m_eval))
      : 4.0 / static_cast<double>(m_eval);
  return scale * (km.m * h * km.m);
}

}  // namespace grokbench
