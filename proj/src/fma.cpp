#include "grokbench/fma.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

#include "grokbench/kernel.hpp"
#include "grokbench/rng.hpp"

namespace grokbench {

FmaModel make_fma(int p, FmaMode mode) {
  if (!is_prime(p)) throw std::invalid_argument("make_fma: p must be prime");
  return {p, mode, dft(p)};
}

std::complex<double> fma_eval_complex(const FmaModel& model, const Vector& x, int cls) {
  const int p = model.p;
  if (x.size() % 2 != 0 || x.size() != 2 * p)
    throw std::invalid_argument("fma_eval: input length must be 2p");
  if (cls < 0 || cls >= p) throw std::invalid_argument("fma_eval: class out of range");
  const CVector f1 = model.f * x.head(p).cast<std::complex<double>>();
  const CVector f2 = model.f * x.tail(p).cast<std::complex<double>>();
  const double root_p = std::sqrt(static_cast<double>(p));
  if (model.mode == FmaMode::Add) {
    // sqrt(p) <f1 . f2, F e_cls>_C
    const CVector fe = model.f.col(cls);
    return root_p * (f1.array() * f2.array() * fe.conjugate().array()).sum();
  }
  // sqrt(p) <f1 . F e_((p - cls) mod p), f2>_C. The frequency index is
  // (p - cls) mod p: that is the exponent for which the machine output
  // matches e_((a-b) mod p) on the full table and the diagonalization of
  // C^(-cls) in the per-class kernel construction.
  const CVector fe = model.f.col((p - cls) % p);
  return root_p * (f1.array() * fe.array() * f2.conjugate().array()).sum();
}

double fma_eval(const FmaModel& model, const Vector& x, int cls) {
  return fma_eval_complex(model, x, cls).real();
}

bool fma_table_check(const FmaModel& model, const ModTask& task, double tol, double* max_err) {
  if (task.p != model.p) throw std::invalid_argument("fma_table_check: modulus mismatch");
  double worst = 0.0;
  for (const TableRow& row : make_table(task)) {
    const Vector x = encode_pair(row.a, row.b, task.p);
    for (int cls = 0; cls < task.p; ++cls) {
      const double want = cls == row.label ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(fma_eval(model, x, cls) - want));
    }
  }
  if (max_err) *max_err = worst;
  return worst < tol;
}

namespace {

Matrix shift_circulant(int p) {
  Vector e1 = Vector::Zero(p);
  e1[1 % p] = 1.0;
  return circulant({e1, BlockKind::Circulant});  // first row e_1
}

Matrix reversal_hankel(int p) {
  Vector row = Vector::Zero(p);
  row[p - 1] = 1.0;
  return circulant({row, BlockKind::Hankel});  // ones on the main anti-diagonal
}

Matrix matrix_power_int(const Matrix& c, int k) {
  Matrix r = Matrix::Identity(c.rows(), c.cols());
  for (int i = 0; i < k; ++i) r = r * c;
  return r;
}

Matrix block_feature(const Matrix& b) {
  const int p = static_cast<int>(b.rows());
  Matrix m = Matrix::Zero(2 * p, 2 * p);
  m.block(0, p, p, p) = b;
  m.block(p, 0, p, p) = b.transpose();
  return m;
}

Theorem1Ensemble build_ensemble(int p, FmaMode mode) {
  if (!is_prime(p)) throw std::invalid_argument("theorem1: p must be prime");
  const Matrix c = shift_circulant(p);
  const Matrix r = reversal_hankel(p);
  const ModTask task(mode == FmaMode::Sub ? Op::Sub : Op::Add, p);
  const auto rows = make_table(task);
  const int n = static_cast<int>(rows.size());
  Matrix x(n, 2 * p);
  for (int i = 0; i < n; ++i)
    x.row(i) = encode_pair(rows[i].a, rows[i].b, p).transpose();

  Theorem1Ensemble ens;
  ens.p = p;
  ens.mode = mode;
  const KernelSpec quad(KernelKind::Quadratic);
  for (int cls = 0; cls < p; ++cls) {
    Matrix block = matrix_power_int(c, cls);
    if (mode == FmaMode::Add) block = block * r;
    const Matrix m = block_feature(block);
    // The per-class kernel matrix is symmetric but indefinite, so the fit
    // goes through the pivoted LDLT solve rather than Cholesky.
    const Matrix k = kernel_matrix(quad, m, x, x);
    Vector y(n);
    for (int i = 0; i < n; ++i) y[i] = rows[i].label == cls ? 1.0 : 0.0;
    const Matrix alpha_flat = solve_sym(k, y);
    Matrix alpha(p, p);  // row a, column b, lexicographic row order of the table
    for (int i = 0; i < n; ++i) alpha(rows[i].a, rows[i].b) = alpha_flat(i, 0);
    ens.m.push_back(m);
    ens.alpha.push_back(alpha);
  }
  return ens;
}

// Effective bilinear form of class cls: x1^T B x2 with B_(u,v) = 1 iff
// (u - v) mod p = cls (Sub) or (u + v) mod p = cls (Add).
Matrix bilinear_target(int p, FmaMode mode, int cls) {
  Matrix b = Matrix::Zero(p, p);
  for (int u = 0; u < p; ++u)
    for (int v = 0; v < p; ++v) {
      const int s = mode == FmaMode::Sub ? ((u - v) % p + p) % p : (u + v) % p;
      if (s == cls) b(u, v) = 1.0;
    }
  return b;
}

double predictor_eval(const Theorem1Ensemble& ens, int cls, const Vector& x) {
  // f_cls(x) = sum_ab alpha_ab (x^T M_cls (e_a + e_b))^2 via the quadratic kernel
  const int p = ens.p;
  double acc = 0.0;
  const Vector mx = ens.m[cls] * x;
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b) {
      const double v = mx[a] + mx[p + b];
      acc += ens.alpha[cls](a, b) * v * v;
    }
  return acc;
}

}  // namespace

Theorem1Ensemble theorem1_build(int p) { return build_ensemble(p, FmaMode::Sub); }

Theorem1Ensemble theorem1_addition_variant(int p) { return build_ensemble(p, FmaMode::Add); }

bool Theorem1Report::pass(double tol) const {
  return bilinear_discrete_err < tol && fma_discrete_err < tol && fma_random_err < tol &&
         system_residual < tol;
}

Theorem1Report theorem1_verify(const Theorem1Ensemble& ens, int n_random, std::uint64_t seed) {
  const int p = ens.p;
  const FmaModel model = make_fma(p, ens.mode);
  const Matrix c = shift_circulant(p);
  const Matrix ones = Matrix::Constant(p, p, 1.0);
  Theorem1Report report;

  Xoshiro256ss rng(seed);
  std::vector<Vector> random_inputs;
  for (int i = 0; i < n_random; ++i) {
    Vector x(2 * p);
    for (int j = 0; j < 2 * p; ++j) x[j] = rng.gaussian();
    random_inputs.push_back(std::move(x));
  }

  double lambda_num = 0.0;
  int lambda_den = 0;
  for (int cls = 0; cls < p; ++cls) {
    const Matrix b = bilinear_target(p, ens.mode, cls);
    // (i) + (ii) on the discrete table
    for (int a = 0; a < p; ++a)
      for (int bb = 0; bb < p; ++bb) {
        const Vector x = encode_pair(a, bb, p);
        const double f = predictor_eval(ens, cls, x);
        const double bil = x.head(p).dot(b * x.tail(p));
        report.bilinear_discrete_err = std::max(report.bilinear_discrete_err, std::abs(f - bil));
        report.fma_discrete_err =
            std::max(report.fma_discrete_err, std::abs(f - fma_eval(model, x, cls)));
      }
    // (ii) out-of-domain: the bilinear identity against the FMA on real inputs
    for (const Vector& x : random_inputs) {
      const double bil = x.head(p).dot(b * x.tail(p));
      report.fma_random_err =
          std::max(report.fma_random_err, std::abs(bil - fma_eval(model, x, cls)));
    }
    if (ens.mode == FmaMode::Sub) {
      // (iii) C^(-2l) a 11^T + 11^T a C^(-l) + 2 C^(-2l) a C^(-l) = I
      const Matrix cml = matrix_power_int(c, (p - cls % p) % p);
      const Matrix cm2l = matrix_power_int(c, (2 * (p - cls % p)) % p);
      const Matrix lhs = cm2l * ens.alpha[cls] * ones + ones * ens.alpha[cls] * cml +
                         2.0 * cm2l * ens.alpha[cls] * cml;
      report.system_residual = std::max(
          report.system_residual, (lhs - Matrix::Identity(p, p)).cwiseAbs().maxCoeff());
      // closed-form offset: alpha - C^(3l)/2 should be lambda 11^T
      const Matrix res = ens.alpha[cls] - 0.5 * matrix_power_int(c, (3 * cls) % p);
      const double lam = res.mean();
      lambda_num += lam;
      ++lambda_den;
      report.lambda_fit_residual =
          std::max(report.lambda_fit_residual, (res.array() - lam).abs().maxCoeff());
    } else {
      // Addition variant: verify the interpolation system directly through
      // the fitted predictor's residual on the table (covered by check (i)).
      report.system_residual = std::max(report.system_residual, report.bilinear_discrete_err);
    }
  }
  if (lambda_den > 0) {
    report.lambda_fit = lambda_num / lambda_den;
    const double cand1 = -1.0 / (2.0 * p + 2.0);
    const double cand2 = -2.0 / (2.0 * p + 2.0);
    report.lambda_match = std::abs(report.lambda_fit - cand1) < std::abs(report.lambda_fit - cand2)
                              ? "-1/(2p+2)"
                              : "-2/(2p+2)";
  }
  return report;
}

LowRankModel lowrank_build(int p, Op mode) {
  if (mode != Op::Add && mode != Op::Mul)
    throw std::invalid_argument("lowrank_build: mode must be add or mul");
  LowRankModel model;
  model.p = p;
  model.mode = mode;
  model.encoder = Matrix::Zero(4, 2 * p);
  if (mode == Op::Add) {
    for (int k = 0; k < p; ++k) {
      const double angle = 2.0 * M_PI * k / p;
      model.encoder(0, k) = std::cos(angle);
      model.encoder(1, k) = std::sin(angle);
      model.encoder(2, p + k) = std::cos(angle);
      model.encoder(3, p + k) = std::sin(angle);
    }
  } else {
    model.gen = find_generator(p);
    for (int k = 1; k < p; ++k) {
      const double angle = 2.0 * M_PI * model.gen.phi(k) / (p - 1);
      model.encoder(0, k) = std::cos(angle);
      model.encoder(1, k) = std::sin(angle);
      model.encoder(2, p + k) = std::cos(angle);
      model.encoder(3, p + k) = std::sin(angle);
    }
  }
  return model;
}

int lowrank_predict(const LowRankModel& model, int a, int b) {
  const int p = model.p;
  if (a < 0 || a >= p || b < 0 || b >= p)
    throw std::invalid_argument("lowrank_predict: residue out of range");
  const Vector x = encode_pair(a, b, p);
  const Vector enc = model.encoder * x;
  const std::complex<double> z1(enc[0], enc[1]);
  const std::complex<double> z2(enc[2], enc[3]);
  const std::complex<double> z = z1 * z2;
  if (model.mode == Op::Mul && std::abs(z) < 1e-12) return 0;
  const int slots = model.mode == Op::Add ? p : p - 1;
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < slots; ++k) {
    const double angle = 2.0 * M_PI * k / slots;
    const double v = z.real() * std::cos(angle) + z.imag() * std::sin(angle);
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  if (model.mode == Op::Add) return best;
  // decode g^k mod p
  long long r = 1;
  for (int i = 0; i < best; ++i) r = r * model.gen.g % p;
  return static_cast<int>(r);
}

Vector encoder_singular_values(const LowRankModel& model, int count) {
  Eigen::JacobiSVD<Matrix> svd(model.encoder);
  const Vector sv = svd.singularValues();
  Vector out = Vector::Zero(count);
  for (int i = 0; i < count && i < sv.size(); ++i) out[i] = sv[i];
  return out;  // a 4 x 2p operator has at most four nonzero singular values
}

}  // namespace grokbench
