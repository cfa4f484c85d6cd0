#include <cmath>

#include "doctest.h"
#include "grokbench/measures.hpp"
#include "grokbench/nnet.hpp"
#include "grokbench/rng.hpp"

using namespace grokbench;

namespace {

QuadMlp tiny_net(int d, int m, int p, std::uint64_t seed) { return mlp_init(d, m, p, seed); }

Matrix random_rows(int n, int d, std::uint64_t seed) {
  Xoshiro256ss rng(seed);
  Matrix x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = rng.uniform(-1, 1);
  return x;
}

double loss_of(const QuadMlp& net, const Matrix& x, const Matrix& y) {
  return mse(mlp_forward(net, x), y);
}

}  // namespace

TEST_CASE("initialization bounds and determinism") {
  const QuadMlp net = mlp_init(10, 16, 5, 3);
  const double b1 = 1.0 / std::sqrt(10.0);
  const double b2 = 1.0 / std::sqrt(16.0);
  CHECK(net.w1.cwiseAbs().maxCoeff() < b1);
  CHECK(net.w2.cwiseAbs().maxCoeff() < b2);
  const QuadMlp same = mlp_init(10, 16, 5, 3);
  CHECK((net.w1 - same.w1).norm() == 0.0);
  CHECK((net.w2 - same.w2).norm() == 0.0);
  const QuadMlp other = mlp_init(10, 16, 5, 4);
  CHECK((net.w1 - other.w1).norm() > 0.0);
}

TEST_CASE("forward hand evaluation") {
  QuadMlp net;
  net.w1 = Matrix::Identity(2, 2);
  net.w2 = Matrix::Ones(1, 2);
  Matrix x(1, 2);
  x << 1, 2;
  const Matrix out = mlp_forward(net, x);
  CHECK(out(0, 0) == doctest::Approx(5.0));  // 1^2 + 2^2

  // zero weights: output zero, loss 1/p on one-hot targets
  QuadMlp zero;
  zero.w1 = Matrix::Zero(4, 6);
  zero.w2 = Matrix::Zero(3, 4);
  Matrix y = Matrix::Zero(7, 3);
  for (int i = 0; i < 7; ++i) y(i, i % 3) = 1.0;
  const Matrix xs = random_rows(7, 6, 5);
  CHECK(mlp_forward(zero, xs).norm() == 0.0);
  CHECK(loss_of(zero, xs, y) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("batch loss is the mean of per-row losses") {
  const QuadMlp net = tiny_net(6, 8, 3, 1);
  const Matrix x = random_rows(9, 6, 2);
  const Matrix y = random_rows(9, 3, 3);
  double acc = 0.0;
  for (int i = 0; i < 9; ++i) acc += loss_of(net, x.row(i), y.row(i));
  CHECK(loss_of(net, x, y) == doctest::Approx(acc / 9.0));
}

TEST_CASE("backward matches central finite differences") {
  const QuadMlp net = tiny_net(7, 6, 4, 11);
  const Matrix x = random_rows(5, 7, 12);
  Matrix y = Matrix::Zero(5, 4);
  for (int i = 0; i < 5; ++i) y(i, i % 4) = 1.0;
  const MlpGrads g = mlp_backward(net, x, y);
  const double h = 1e-5;
  double max_rel = 0.0;
  const double scale = std::max(g.dw1.cwiseAbs().maxCoeff(), g.dw2.cwiseAbs().maxCoeff());
  for (int i = 0; i < net.w1.rows(); ++i)
    for (int j = 0; j < net.w1.cols(); ++j) {
      QuadMlp hi = net, lo = net;
      hi.w1(i, j) += h;
      lo.w1(i, j) -= h;
      const double fd = (loss_of(hi, x, y) - loss_of(lo, x, y)) / (2 * h);
      max_rel = std::max(max_rel, std::abs(fd - g.dw1(i, j)) / scale);
    }
  for (int i = 0; i < net.w2.rows(); ++i)
    for (int j = 0; j < net.w2.cols(); ++j) {
      QuadMlp hi = net, lo = net;
      hi.w2(i, j) += h;
      lo.w2(i, j) -= h;
      const double fd = (loss_of(hi, x, y) - loss_of(lo, x, y)) / (2 * h);
      max_rel = std::max(max_rel, std::abs(fd - g.dw2(i, j)) / scale);
    }
  CHECK(max_rel < 1e-5);
}

TEST_CASE("zero residual gives zero gradients; batch gradient is the mean") {
  const QuadMlp net = tiny_net(5, 4, 3, 21);
  const Matrix x = random_rows(6, 5, 22);
  const Matrix y = mlp_forward(net, x);
  const MlpGrads g = mlp_backward(net, x, y);
  CHECK(g.dw1.norm() == doctest::Approx(0.0));
  CHECK(g.dw2.norm() == doctest::Approx(0.0));

  Matrix y2 = random_rows(6, 3, 23);
  const MlpGrads full = mlp_backward(net, x, y2);
  Matrix mean1 = Matrix::Zero(4, 5), mean2 = Matrix::Zero(3, 4);
  for (int i = 0; i < 6; ++i) {
    const MlpGrads gi = mlp_backward(net, x.row(i), y2.row(i));
    mean1 += gi.dw1;
    mean2 += gi.dw2;
  }
  CHECK((full.dw1 - mean1 / 6.0).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((full.dw2 - mean2 / 6.0).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("mlp agop closed form matches per-sample jacobians") {
  const QuadMlp net = tiny_net(6, 5, 4, 31);
  const Matrix x = random_rows(8, 6, 32);
  const Matrix g = agop_mlp(net, x);
  // reference: grad f_l(x) = 2 W1^T diag(W1 x) W2[l,:]^T
  Matrix ref = Matrix::Zero(6, 6);
  for (int i = 0; i < 8; ++i) {
    const Vector h = net.w1 * x.row(i).transpose();
    const Matrix j = 2.0 * net.w1.transpose() * h.asDiagonal() * net.w2.transpose();
    ref += j * j.transpose();
  }
  ref /= 8.0;
  CHECK((g - ref).cwiseAbs().maxCoeff() < 1e-12);

  // PSD, and zero when W2 = 0
  const SymEig e = sym_eig(g);
  CHECK(e.values.minCoeff() >= -1e-10 * std::abs(e.values.maxCoeff()));
  QuadMlp dead = net;
  dead.w2.setZero();
  CHECK(agop_mlp(dead, x).norm() == 0.0);
  CHECK(agop_trace(dead, x) == 0.0);
}

TEST_CASE("mlp agop matches finite-difference jacobians") {
  const QuadMlp net = tiny_net(5, 4, 3, 41);
  const Matrix x = random_rows(5, 5, 42);
  Matrix ref = Matrix::Zero(5, 5);
  const double h = 1e-5;
  for (int i = 0; i < 5; ++i) {
    Matrix j(5, 3);
    for (int u = 0; u < 5; ++u) {
      Matrix hi = x.row(i), lo = x.row(i);
      hi(0, u) += h;
      lo(0, u) -= h;
      j.row(u) = (mlp_forward(net, hi) - mlp_forward(net, lo)) / (2 * h);
    }
    ref += j * j.transpose();
  }
  ref /= 5.0;
  const Matrix g = agop_mlp(net, x);
  CHECK((g - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff() < 1e-5);
  CHECK(agop_trace(net, x) == doctest::Approx(g.trace()).epsilon(1e-10));
}

TEST_CASE("agop trace gradients match finite differences on a 5-unit net") {
  const QuadMlp net = tiny_net(6, 5, 3, 51);
  const Matrix x = random_rows(7, 6, 52);
  double tr = 0.0;
  const MlpGrads g = agop_trace_grads(net, x, &tr);
  CHECK(tr == doctest::Approx(agop_trace(net, x)));
  const double h = 1e-6;
  const double scale = std::max(g.dw1.cwiseAbs().maxCoeff(), g.dw2.cwiseAbs().maxCoeff());
  double max_rel = 0.0;
  for (int i = 0; i < net.w1.rows(); ++i)
    for (int j = 0; j < net.w1.cols(); ++j) {
      QuadMlp hi = net, lo = net;
      hi.w1(i, j) += h;
      lo.w1(i, j) -= h;
      const double fd = (agop_trace(hi, x) - agop_trace(lo, x)) / (2 * h);
      max_rel = std::max(max_rel, std::abs(fd - g.dw1(i, j)) / scale);
    }
  for (int i = 0; i < net.w2.rows(); ++i)
    for (int j = 0; j < net.w2.cols(); ++j) {
      QuadMlp hi = net, lo = net;
      hi.w2(i, j) += h;
      lo.w2(i, j) -= h;
      const double fd = (agop_trace(hi, x) - agop_trace(lo, x)) / (2 * h);
      max_rel = std::max(max_rel, std::abs(fd - g.dw2(i, j)) / scale);
    }
  CHECK(max_rel < 1e-4);
}

TEST_CASE("nfm is the first-layer gram matrix") {
  const QuadMlp net = tiny_net(6, 9, 3, 61);
  const Matrix f = nfm(net);
  CHECK((f - net.w1.transpose() * net.w1).norm() == 0.0);
  const SymEig e = sym_eig(f);
  CHECK(e.values.minCoeff() >= -1e-12 * std::abs(e.values.maxCoeff()));
}

TEST_CASE("adamw and sgd agree in the small-gradient limit") {
  // With residuals far below adam's epsilon, the adaptive step is linear in
  // the gradient, so one step of each optimizer moves in the same direction.
  const QuadMlp net = tiny_net(6, 5, 3, 71);
  const Matrix x = random_rows(8, 6, 72);
  Matrix y = mlp_forward(net, x);
  Xoshiro256ss rng(73);
  for (int i = 0; i < y.rows(); ++i)
    for (int j = 0; j < y.cols(); ++j) y(i, j) += 1e-9 * rng.uniform(-1, 1);
  const MlpGrads g = mlp_backward(net, x, y);

  // one adamw step, wd = 0, lr = 1e-6, fresh moments (t = 1)
  const double lr = 1e-6;
  Matrix adam1 = -lr * (g.dw1.array() / (g.dw1.array().abs() + 1e-8)).matrix();
  Matrix sgd1 = -lr * g.dw1;
  const double cos1 = adam1.cwiseProduct(sgd1).sum() / (adam1.norm() * sgd1.norm());
  CHECK(cos1 > 0.99);
}

TEST_CASE("training is deterministic and records metrics") {
  const Dataset data = split(ModTask(Op::Add, 5), 0.8, 1);
  TrainConfig cfg;
  cfg.optimizer = Optimizer::AdamW;
  cfg.learning_rate = 1e-3;
  cfg.weight_decay = 0.1;
  cfg.batch_size = 4;
  cfg.epochs = 3;
  cfg.width = 16;
  cfg.seed = 2;
  const TrainResult a = train(mlp_init(data.d, cfg.width, data.p, cfg.seed), data, cfg);
  const TrainResult b = train(mlp_init(data.d, cfg.width, data.p, cfg.seed), data, cfg);
  REQUIRE(a.history.size() == 3);
  for (int t = 0; t < 3; ++t) {
    CHECK(a.history[t].train_loss == b.history[t].train_loss);
    CHECK(a.history[t].test_loss == b.history[t].test_loss);
    CHECK(*a.history[t].nfa_correlation == *b.history[t].nfa_correlation);
  }
  CHECK((a.net.w1 - b.net.w1).norm() == 0.0);
  CHECK(a.history.back().agop_alignment == doctest::Approx(1.0));

  // sgd with the agop penalty also runs and stays finite
  TrainConfig sgd = cfg;
  sgd.optimizer = Optimizer::SGD;
  sgd.learning_rate = 0.05;
  sgd.weight_decay = 1e-5;
  sgd.agop_reg_weight = 1e-3;
  const TrainResult c = train(mlp_init(data.d, sgd.width, data.p, sgd.seed), data, sgd);
  CHECK(std::isfinite(c.history.back().train_loss));
}
