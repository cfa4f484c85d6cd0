#include <cmath>

#include "doctest.h"
#include "grokbench/dataset.hpp"
#include "grokbench/kernel.hpp"
#include "grokbench/measures.hpp"
#include "grokbench/rng.hpp"

using namespace grokbench;

namespace {

Matrix random_psd(int d, std::uint64_t seed) {
  Xoshiro256ss rng(seed);
  Matrix b(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) b(i, j) = rng.uniform(-1, 1);
  return b.transpose() * b / d + 0.05 * Matrix::Identity(d, d);
}

Matrix random_rows(int n, int d, std::uint64_t seed) {
  Xoshiro256ss rng(seed);
  Matrix x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = rng.uniform(-1, 1);
  return x;
}

// central finite differences of the fitted predictor
Matrix fd_jacobian(const KernelMachine& km, const Vector& x, double h = 1e-5) {
  const Eigen::Index d = x.size();
  const Eigen::Index p = km.alpha.cols();
  Matrix j(d, p);
  for (Eigen::Index u = 0; u < d; ++u) {
    Vector hi = x, lo = x;
    hi[u] += h;
    lo[u] -= h;
    Matrix xm(2, d);
    xm.row(0) = hi;
    xm.row(1) = lo;
    const Matrix pred = predict(km, xm);
    j.row(u) = (pred.row(0) - pred.row(1)) / (2 * h);
  }
  return j;
}

}  // namespace

TEST_CASE("k_eval analytic values") {
  const Matrix eye = Matrix::Identity(6, 6);
  const Vector x = encode_pair(1, 2, 3);
  CHECK(k_eval(KernelSpec(KernelKind::Quadratic), eye, x, x) == doctest::Approx(4.0));

  const KernelSpec gauss(KernelKind::Gaussian, 2.5);
  CHECK(k_eval(gauss, eye, x, x) == doctest::Approx(1.0));
  const Vector z = encode_pair(0, 1, 3);  // disjoint one-hots: squared distance 4
  CHECK(k_eval(gauss, eye, x, z) == doctest::Approx(std::exp(-1.6)));

  CHECK_THROWS_AS(k_eval(gauss, eye, Vector::Zero(4), x), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec(KernelKind::Gaussian, 0.0), std::invalid_argument);
}

TEST_CASE("kernel symmetry in the Mahalanobis matrix") {
  const Matrix m = random_psd(6, 2);
  Xoshiro256ss rng(3);
  for (int t = 0; t < 5; ++t) {
    Vector x(6), y(6);
    for (int i = 0; i < 6; ++i) {
      x[i] = rng.uniform(-1, 1);
      y[i] = rng.uniform(-1, 1);
    }
    const double a = k_eval(KernelSpec(KernelKind::Quadratic), m, x, y);
    const double b = k_eval(KernelSpec(KernelKind::Quadratic), m.transpose(), y, x);
    CHECK(a == doctest::Approx(b));
  }
}

TEST_CASE("kernel_matrix agrees with pointwise evaluation") {
  const Matrix m = random_psd(6, 4);
  const Matrix x1 = random_rows(7, 6, 5);
  const Matrix x2 = random_rows(4, 6, 6);
  for (const KernelSpec spec :
       {KernelSpec(KernelKind::Quadratic), KernelSpec(KernelKind::Gaussian, 2.5)}) {
    const Matrix k = kernel_matrix(spec, m, x1, x2);
    CHECK(k.rows() == 7);
    CHECK(k.cols() == 4);
    const std::vector<std::pair<int, int>> spots = {{0, 0}, {3, 1}, {6, 3}, {2, 2}, {5, 0}};
    for (const auto& [i, j] : spots)
      CHECK(k(i, j) ==
            doctest::Approx(k_eval(spec, m, x1.row(i).transpose(), x2.row(j).transpose())));
    const Matrix kk = kernel_matrix(spec, m, x1, x1);
    CHECK((kk - kk.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
  // the one-hot gather path must agree with the dense path
  const Dataset data = split(ModTask(Op::Add, 5), 1.0, 1);
  const Matrix ks = kernel_matrix(KernelSpec(KernelKind::Quadratic), random_psd(10, 7),
                                  data.x, data.x);
  for (Eigen::Index i = 0; i < 5; ++i)
    CHECK(ks(i, i) == doctest::Approx(k_eval(KernelSpec(KernelKind::Quadratic),
                                             random_psd(10, 7), data.x.row(i).transpose(),
                                             data.x.row(i).transpose())));
}

TEST_CASE("single-point fit matches the scalar solution") {
  Matrix x(1, 6);
  x.row(0) = encode_pair(2, 1, 3).transpose();
  Matrix y(1, 3);
  y << 0, 1, 0;
  const KernelMachine km = fit(KernelSpec(KernelKind::Quadratic), Matrix::Identity(6, 6), x, y);
  const double kxx = 4.0;  // (x^T x)^2
  CHECK(km.alpha(0, 1) == doctest::Approx(1.0 / kxx));
  const Matrix pred = predict(km, x);
  CHECK(pred(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("ridgeless fit interpolates the full add table") {
  const Dataset data = split(ModTask(Op::Add, 5), 1.0, 1);
  const KernelMachine km =
      fit(KernelSpec(KernelKind::Quadratic), Matrix::Identity(10, 10), data.x, data.y);
  CHECK(!km.jitter_retried);
  const Matrix pred = predict(km, data.x);
  CHECK(accuracy(pred, data.y) == 1.0);
  CHECK((pred - data.y).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(mse(pred, data.y) <= 1e-10);
}

TEST_CASE("jacobian analytic cases") {
  // single training point, quadratic, M = I, alpha = 1, x = x0 = e1
  Matrix x0(1, 4);
  x0 << 0, 1, 0, 0;
  KernelMachine km;
  km.spec = KernelSpec(KernelKind::Quadratic);
  km.m = Matrix::Identity(4, 4);
  km.xtrain = x0;
  km.alpha = Matrix::Ones(1, 1);
  const Matrix j = jacobian(km, x0.row(0).transpose());
  Vector want = Vector::Zero(4);
  want[1] = 2.0;  // 2 (x^T x0) x0
  CHECK((j.col(0) - want).norm() < 1e-12);

  km.spec = KernelSpec(KernelKind::Gaussian, 2.5);
  const Matrix jg = jacobian(km, x0.row(0).transpose());
  CHECK(jg.norm() == doctest::Approx(0.0));  // (x - x0) = 0
}

TEST_CASE("jacobian matches central finite differences for both kernels") {
  const int d = 8, n = 12, p = 3;
  const Matrix m = random_psd(d, 11);
  const Matrix xtr = random_rows(n, d, 12);
  const Matrix ytr = random_rows(n, p, 13);
  Xoshiro256ss rng(14);
  for (const KernelSpec spec :
       {KernelSpec(KernelKind::Quadratic), KernelSpec(KernelKind::Gaussian, 2.5)}) {
    const KernelMachine km = fit(spec, m, xtr, ytr);
    for (int t = 0; t < 10; ++t) {
      Vector x(d);
      for (int i = 0; i < d; ++i) x[i] = rng.uniform(-1, 1);
      const Matrix ja = jacobian(km, x);
      const Matrix jf = fd_jacobian(km, x);
      const double scale = std::max(ja.cwiseAbs().maxCoeff(), 1e-12);
      CHECK((ja - jf).cwiseAbs().maxCoeff() / scale < 1e-6);
    }
  }
}

TEST_CASE("agop equals the averaged jacobian outer products") {
  const int d = 8, n = 10, p = 3;
  const Matrix m = random_psd(d, 21);
  const Matrix xtr = random_rows(n, d, 22);
  const Matrix ytr = random_rows(n, p, 23);
  for (const KernelSpec spec :
       {KernelSpec(KernelKind::Quadratic), KernelSpec(KernelKind::Gaussian, 2.5)}) {
    const KernelMachine km = fit(spec, m, xtr, ytr);
    const Matrix g = agop(km, xtr);
    Matrix ref = Matrix::Zero(d, d);
    for (int i = 0; i < n; ++i) {
      const Matrix j = jacobian(km, xtr.row(i).transpose());
      ref += j * j.transpose();
    }
    ref /= n;
    CHECK((g - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff() < 1e-10);
    // PSD up to roundoff
    const SymEig e = sym_eig(g);
    CHECK(e.values.minCoeff() >= -1e-10 * std::abs(e.values.maxCoeff()));
    // single sample: rank <= 1 gram of the gradient
    const Matrix g1 = agop(km, xtr.topRows(1));
    const Matrix j0 = jacobian(km, xtr.row(0).transpose());
    CHECK((g1 - j0 * j0.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("agop is invariant to permuting the training rows") {
  const Dataset data = split(ModTask(Op::Add, 5), 1.0, 2);
  const KernelSpec spec(KernelKind::Gaussian, 2.5);
  const Matrix m = Matrix::Identity(10, 10);
  const KernelMachine km = fit(spec, m, data.x, data.y);

  Matrix xperm = data.x;
  Matrix yperm = data.y;
  std::vector<int> order(data.x.rows());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  Xoshiro256ss rng(5);
  rng.shuffle(order);
  for (std::size_t i = 0; i < order.size(); ++i) {
    xperm.row(i) = data.x.row(order[i]);
    yperm.row(i) = data.y.row(order[i]);
  }
  const KernelMachine km2 = fit(spec, m, xperm, yperm);
  CHECK((agop(km, data.x) - agop(km2, xperm)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("agop matches finite-difference jacobians") {
  const int d = 6, n = 8, p = 2;
  const Matrix m = random_psd(d, 31);
  const Matrix xtr = random_rows(n, d, 32);
  const Matrix ytr = random_rows(n, p, 33);
  const KernelMachine km = fit(KernelSpec(KernelKind::Gaussian, 2.5), m, xtr, ytr);
  Matrix ref = Matrix::Zero(d, d);
  for (int i = 0; i < n; ++i) {
    const Matrix j = fd_jacobian(km, xtr.row(i).transpose());
    ref += j * j.transpose();
  }
  ref /= n;
  const Matrix g = agop(km, xtr);
  CHECK((g - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff() < 1e-5);
}
