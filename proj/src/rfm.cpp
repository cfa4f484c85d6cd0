#include "grokbench/rfm.hpp"

#include <cmath>
#include <stdexcept>

#include "grokbench/rng.hpp"

namespace grokbench {

namespace {

bool needs_dlog(const std::vector<Op>& ops) {
  return ops.size() == 1 && (ops[0] == Op::Mul || ops[0] == Op::Div);
}

double feature_deviation(const Matrix& m, int p, const std::vector<Op>& ops,
                         const Generator* gen) {
  const Matrix block = m.block(p, 0, p, p);
  if (gen && needs_dlog(ops)) return circulant_deviation_reordered(block, *gen);
  return circulant_deviation(block);
}

MetricsRecord evaluate_fit(const Dataset& data, const KernelMachine& km, int iter) {
  MetricsRecord r;
  r.iter = iter;
  const Matrix pred_tr = predict(km, data.train_x());
  const Matrix ytr = data.train_y();
  r.train_loss = mse(pred_tr, ytr);
  r.train_acc = accuracy(pred_tr, ytr);
  const Matrix xte = data.test_x();
  if (xte.rows() > 0) {
    const Matrix pred_te = predict(km, xte);
    const Matrix yte = data.test_y();
    r.test_loss = mse(pred_te, yte);
    r.test_acc = accuracy(pred_te, yte);
    r.correct_class_test_loss = correct_class_loss(pred_te, yte);
    if (data.multitask) {
      // Test rows come in two equal halves, task 0 first.
      const Eigen::Index half = xte.rows() / 2;
      r.task0_loss = mse(pred_te.topRows(half), yte.topRows(half));
      r.task0_acc = accuracy(pred_te.topRows(half), yte.topRows(half));
      r.task1_loss = mse(pred_te.bottomRows(half), yte.bottomRows(half));
      r.task1_acc = accuracy(pred_te.bottomRows(half), yte.bottomRows(half));
    }
  }
  return r;
}

}  // namespace

RfmResult rfm_run(const Dataset& data, const RfmConfig& cfg) {
  if (cfg.iterations < 1) throw std::invalid_argument("rfm_run: iterations must be >= 1");
  if (!(cfg.matrix_power > 0)) throw std::invalid_argument("rfm_run: matrix power must be > 0");
  if (data.train_idx.empty()) throw std::invalid_argument("rfm_run: empty train split");

  const Matrix xtr = data.train_x();
  const Matrix ytr = data.train_y();
  Generator gen;
  const bool dlog = needs_dlog(data.ops);
  if (dlog) gen = find_generator(data.p);

  RfmResult res;
  Matrix m = Matrix::Identity(data.d, data.d);
  res.snapshots.push_back(m);
  for (int t = 0; t < cfg.iterations; ++t) {
    KernelMachine km;
    try {
      km = fit(cfg.kernel, m, xtr, ytr);
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("rfm_run: iteration " + std::to_string(t + 1) + ": " + e.what());
    }
    if (km.jitter_retried) ++res.jitter_events;
    MetricsRecord rec = evaluate_fit(data, km, t + 1);
    const Matrix g = agop(km, xtr);
    m = psd_power(g, cfg.matrix_power);
    if (cfg.normalize_m) {
      const double r = spectral_radius_sym(m);
      if (r > 0) m /= r;
    }
    rec.circulant_deviation = feature_deviation(m, data.p, data.ops, dlog ? &gen : nullptr);
    res.history.push_back(rec);
    res.snapshots.push_back(m);
    if (t + 1 == cfg.iterations) res.machine = std::move(km);
  }
  res.m = m;
  for (int t = 0; t < cfg.iterations; ++t)
    res.history[t].agop_alignment = agop_alignment(res.snapshots[t + 1], res.m);
  return res;
}

std::vector<MetricsRecord> rfm_replay(const Dataset& data, const RfmConfig& cfg,
                                      const std::vector<Matrix>& feature_matrices) {
  const Matrix xtr = data.train_x();
  const Matrix ytr = data.train_y();
  Generator gen;
  const bool dlog = needs_dlog(data.ops);
  if (dlog) gen = find_generator(data.p);
  std::vector<MetricsRecord> history;
  for (std::size_t t = 0; t < feature_matrices.size(); ++t) {
    const KernelMachine km = fit(cfg.kernel, feature_matrices[t], xtr, ytr);
    MetricsRecord rec = evaluate_fit(data, km, static_cast<int>(t + 1));
    rec.circulant_deviation =
        feature_deviation(feature_matrices[t], data.p, data.ops, dlog ? &gen : nullptr);
    history.push_back(rec);
  }
  if (!history.empty()) {
    const Matrix& final_m = feature_matrices.back();
    for (std::size_t t = 0; t < feature_matrices.size(); ++t)
      history[t].agop_alignment = agop_alignment(feature_matrices[t], final_m);
  }
  return history;
}

Matrix enforce_circulant(const Matrix& m, int p) {
  if (m.rows() != 2 * p || m.cols() != 2 * p)
    throw std::invalid_argument("enforce_circulant: M must be 2p x 2p");
  Vector d = m.diagonal();
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d[i] == 0.0) throw std::runtime_error("enforce_circulant: zero diagonal entry");
  const Vector dinv = d.array().abs().sqrt().inverse();
  Matrix tilde = dinv.asDiagonal() * m * dinv.asDiagonal();

  const Matrix a = Matrix::Identity(p, p) - Matrix::Constant(p, p, 1.0 / p);
  tilde.block(0, 0, p, p) = a;
  tilde.block(p, p, p, p) = a;
  const Vector c = tilde.block(p, 0, p, p).col(0);
  Matrix circ(p, p);
  for (int l = 0; l < p; ++l)
    for (int j = 0; j < p; ++j) circ(((j + l) % p), l) = c[j];  // column l = sigma^l(c)
  tilde.block(p, 0, p, p) = circ;
  tilde.block(0, p, p, p) = circ.transpose();
  return symmetrize(tilde);
}

namespace {

Vector uniform_vector(int n, std::uint64_t seed) {
  Xoshiro256ss rng(seed);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform();
  return v;
}

Matrix circulant_from_first_column(const Vector& col, BlockKind kind) {
  // circulant() takes a first row; a circulant with first column c has first
  // row (c_0, c_{p-1}, ..., c_1).
  const int p = static_cast<int>(col.size());
  if (kind == BlockKind::Hankel) return circulant({col, BlockKind::Hankel});
  Vector row(p);
  row[0] = col[0];
  for (int j = 1; j < p; ++j) row[j] = col[p - j];
  return circulant({row, BlockKind::Circulant});
}

Matrix assemble_observation1(const Matrix& c_block, int p, double c1, double c2) {
  Matrix m = Matrix::Zero(2 * p, 2 * p);
  const Matrix a = c1 * Matrix::Identity(p, p) + c2 * Matrix::Constant(p, p, 1.0);
  m.block(0, 0, p, p) = a;
  m.block(p, p, p, p) = a;
  m.block(p, 0, p, p) = c_block;
  m.block(0, p, p, p) = c_block.transpose();
  return m;
}

}  // namespace

Matrix random_circulant_m(int p, std::uint64_t seed, double c1, double c2, BlockKind kind) {
  if (std::isnan(c2)) c2 = -1.0 / p;
  const Matrix c = circulant_from_first_column(uniform_vector(p, seed), kind);
  return assemble_observation1(c, p, c1, c2);
}

Matrix random_circulant_m_dlog(int p, std::uint64_t seed, const Generator& gen,
                               double c1, double c2, BlockKind kind) {
  if (std::isnan(c2)) c2 = -1.0 / p;
  const Matrix small = circulant_from_first_column(uniform_vector(p - 1, seed), kind);
  Matrix block = Matrix::Zero(p, p);
  // Entry (r, c) in residue coordinates reads the circulant at the dlog image.
  for (int r = 1; r < p; ++r)
    for (int c = 1; c < p; ++c) block(r, c) = small(gen.phi(r) - 1, gen.phi(c) - 1);
  return assemble_observation1(block, p, c1, c2);
}

Matrix transform_inputs(const Matrix& m, const Matrix& x) {
  if (x.cols() != m.rows()) throw std::invalid_argument("transform_inputs: dimension mismatch");
  const Matrix quartic = positive_part_power(m, 0.25);
  return x * quartic.transpose();
}

}  // namespace grokbench
