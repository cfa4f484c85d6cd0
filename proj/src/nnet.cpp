#include "grokbench/nnet.hpp"

#include <cmath>
#include <stdexcept>

#include "grokbench/measures.hpp"
#include "grokbench/rng.hpp"

namespace grokbench {

QuadMlp mlp_init(int d, int m, int p, std::uint64_t seed) {
  Xoshiro256ss rng(seed);
  QuadMlp net;
  net.w1.resize(m, d);
  net.w2.resize(p, m);
  const double b1 = 1.0 / std::sqrt(static_cast<double>(d));
  const double b2 = 1.0 / std::sqrt(static_cast<double>(m));
  // Row-major fill so the draw order is part of the reproducibility contract.
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < d; ++j) net.w1(i, j) = rng.uniform(-b1, b1);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < m; ++j) net.w2(i, j) = rng.uniform(-b2, b2);
  return net;
}

Matrix mlp_forward(const QuadMlp& net, const Matrix& x) {
  if (x.cols() != net.w1.cols()) throw std::invalid_argument("mlp_forward: dimension mismatch");
  const Matrix h = x * net.w1.transpose();
  return h.array().square().matrix() * net.w2.transpose();
}

MlpGrads mlp_backward(const QuadMlp& net, const Matrix& x, const Matrix& y) {
  if (x.cols() != net.w1.cols() || y.cols() != net.w2.rows() || x.rows() != y.rows())
    throw std::invalid_argument("mlp_backward: dimension mismatch");
  const Eigen::Index n = x.rows();
  const Eigen::Index p = y.cols();
  const Matrix h = x * net.w1.transpose();
  const Matrix u = h.array().square();
  const Matrix r = (2.0 / static_cast<double>(n * p)) * (u * net.w2.transpose() - y);
  MlpGrads g;
  g.dw2 = r.transpose() * u;
  const Matrix back = 2.0 * (r * net.w2).array() * h.array();
  g.dw1 = back.transpose() * x;
  return g;
}

Matrix agop_mlp(const QuadMlp& net, const Matrix& x) {
  if (x.rows() == 0) throw std::invalid_argument("agop_mlp: empty sample set");
  const Matrix h = x * net.w1.transpose();                       // n x m
  const Matrix q = (net.w2.transpose() * net.w2).cwiseProduct(h.transpose() * h);
  return (4.0 / static_cast<double>(x.rows())) * net.w1.transpose() * q * net.w1;
}

double agop_trace(const QuadMlp& net, const Matrix& x) {
  const Matrix h = x * net.w1.transpose();
  const Matrix sigma1 = net.w1 * net.w1.transpose();
  const Matrix sigma2 = net.w2.transpose() * net.w2;
  const double phi = sigma1.cwiseProduct(sigma2).cwiseProduct(h.transpose() * h).sum();
  return 4.0 / static_cast<double>(x.rows()) * phi;
}

MlpGrads agop_trace_grads(const QuadMlp& net, const Matrix& x, double* trace_out) {
  const Eigen::Index n = x.rows();
  const Matrix h = x * net.w1.transpose();
  const Matrix gh = h.transpose() * h;             // m x m
  const Matrix sigma1 = net.w1 * net.w1.transpose();
  const Matrix sigma2 = net.w2.transpose() * net.w2;
  const Matrix q = sigma1.cwiseProduct(sigma2);
  if (trace_out) *trace_out = 4.0 / static_cast<double>(n) * q.cwiseProduct(gh).sum();
  const double scale = 8.0 / static_cast<double>(n);
  MlpGrads g;
  g.dw1 = scale * (sigma2.cwiseProduct(gh) * net.w1 + q * (h.transpose() * x));
  g.dw2 = scale * (net.w2 * sigma1.cwiseProduct(gh));
  return g;
}

Matrix nfm(const QuadMlp& net) { return net.w1.transpose() * net.w1; }

double nfa_correlation(const QuadMlp& net, const Matrix& xtrain) {
  return pearson(nfm(net), psd_power(agop_mlp(net, xtrain), 0.5));
}

namespace {

struct AdamState {
  Matrix m, v;
  explicit AdamState(const Matrix& w) : m(Matrix::Zero(w.rows(), w.cols())),
                                        v(Matrix::Zero(w.rows(), w.cols())) {}
};

void adamw_step(Matrix& w, AdamState& st, const Matrix& grad, double lr, double wd,
                long step) {
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  w *= (1.0 - lr * wd);  // decoupled decay, applied before the moment step
  st.m = beta1 * st.m + (1.0 - beta1) * grad;
  st.v = beta2 * st.v + (1.0 - beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
  w.array() -= lr * (st.m.array() / bc1) / ((st.v.array() / bc2).sqrt() + eps);
}

}  // namespace

TrainResult train(QuadMlp net, const Dataset& data, const TrainConfig& cfg) {
  if (cfg.epochs < 1 || cfg.batch_size < 1) throw std::invalid_argument("train: bad config");
  const Matrix xtr = data.train_x();
  const Matrix ytr = data.train_y();
  const Matrix xte = data.test_x();
  const Matrix yte = data.test_y();
  const int n = static_cast<int>(xtr.rows());
  const int p = data.p;

  Xoshiro256ss rng(cfg.seed);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;

  const bool dlog_dev =
      data.ops.size() == 1 && (data.ops[0] == Op::Mul || data.ops[0] == Op::Div);
  Generator gen;
  if (dlog_dev) gen = find_generator(p);

  AdamState st1(net.w1), st2(net.w2);
  long step = 0;

  TrainResult result;
  std::vector<Matrix> feature_snapshots;  // sqrt-AGOP at metric epochs

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (int start = 0; start < n; start += cfg.batch_size) {
      const int c = std::min(cfg.batch_size, n - start);
      Matrix xb(c, xtr.cols()), yb(c, p);
      for (int i = 0; i < c; ++i) {
        xb.row(i) = xtr.row(order[start + i]);
        yb.row(i) = ytr.row(order[start + i]);
      }
      MlpGrads g = mlp_backward(net, xb, yb);
      double batch_loss = mse(mlp_forward(net, xb), yb);
      if (cfg.agop_reg_weight > 0.0) {
        double tr = 0.0;
        const MlpGrads rg = agop_trace_grads(net, xb, &tr);
        g.dw1 += cfg.agop_reg_weight * rg.dw1;
        g.dw2 += cfg.agop_reg_weight * rg.dw2;
        batch_loss += cfg.agop_reg_weight * tr;
      }
      if (!std::isfinite(batch_loss))
        throw std::runtime_error("train: loss diverged at epoch " + std::to_string(epoch));
      ++step;
      if (cfg.optimizer == Optimizer::AdamW) {
        adamw_step(net.w1, st1, g.dw1, cfg.learning_rate, cfg.weight_decay, step);
        adamw_step(net.w2, st2, g.dw2, cfg.learning_rate, cfg.weight_decay, step);
      } else {
        net.w1 -= cfg.learning_rate * (g.dw1 + cfg.weight_decay * net.w1);
        net.w2 -= cfg.learning_rate * (g.dw2 + cfg.weight_decay * net.w2);
      }
    }

    if (epoch % cfg.metrics_every == 0 || epoch == cfg.epochs) {
      MetricsRecord rec;
      rec.iter = epoch;
      const Matrix ptr = mlp_forward(net, xtr);
      rec.train_loss = mse(ptr, ytr);
      rec.train_acc = accuracy(ptr, ytr);
      if (xte.rows() > 0) {
        const Matrix pte = mlp_forward(net, xte);
        rec.test_loss = mse(pte, yte);
        rec.test_acc = accuracy(pte, yte);
        rec.correct_class_test_loss = correct_class_loss(pte, yte);
      }
      const Matrix features = psd_power(agop_mlp(net, xtr), 0.5);
      const Matrix block = features.block(p, 0, p, p);
      rec.circulant_deviation = dlog_dev ? circulant_deviation_reordered(block, gen)
                                         : circulant_deviation(block);
      rec.nfa_correlation = pearson(nfm(net), features);
      if (!std::isfinite(rec.train_loss))
        throw std::runtime_error("train: loss diverged at epoch " + std::to_string(epoch));
      result.history.push_back(rec);
      feature_snapshots.push_back(features);
    }
  }

  const Matrix& final_features = feature_snapshots.back();
  for (std::size_t i = 0; i < result.history.size(); ++i)
    result.history[i].agop_alignment = agop_alignment(feature_snapshots[i], final_features);

  result.net = std::move(net);
  result.epochs_run = cfg.epochs;
  return result;
}

}  // namespace grokbench
