#pragma once

#include <cstdint>
#include <vector>

#include "grokbench/dataset.hpp"
#include "grokbench/history.hpp"
#include "grokbench/linalg.hpp"

namespace grokbench {

/// One-hidden-layer network f(x) = W2 (W1 x)^2, no biases.
struct QuadMlp {
  Matrix w1;  // m x d
  Matrix w2;  // p x m
};

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) per layer, the default linear
/// initialization scheme, drawn from the seeded generator.
QuadMlp mlp_init(int d, int m, int p, std::uint64_t seed);

/// Row-per-sample forward pass, n x p.
Matrix mlp_forward(const QuadMlp& net, const Matrix& x);

struct MlpGrads {
  Matrix dw1, dw2;
};

/// Gradients of the mean-over-all-entries squared error on the batch.
MlpGrads mlp_backward(const QuadMlp& net, const Matrix& x, const Matrix& y);

/// AGOP of the network over the rows of x, via the closed form
/// (4/n) W1^T [(W2^T W2) . (H^T H)] W1 with H the hidden pre-activations.
Matrix agop_mlp(const QuadMlp& net, const Matrix& x);

/// tr AGOP over the batch.
double agop_trace(const QuadMlp& net, const Matrix& x);

/// Analytic gradients of agop_trace with respect to both weight matrices.
MlpGrads agop_trace_grads(const QuadMlp& net, const Matrix& x, double* trace_out = nullptr);

/// First-layer neural feature matrix W1^T W1.
Matrix nfm(const QuadMlp& net);

/// pearson(W1^T W1, AGOP^(1/2)) over the given sample rows.
double nfa_correlation(const QuadMlp& net, const Matrix& xtrain);

enum class Optimizer { AdamW, SGD };

struct TrainConfig {
  Optimizer optimizer = Optimizer::AdamW;
  double learning_rate = 1e-3;
  double weight_decay = 1.0;
  double agop_reg_weight = 0.0;
  int batch_size = 32;
  int epochs = 50;
  int width = 1024;
  std::uint64_t seed = 0;
  // Cadence for evaluation records; 1 = every epoch. Feature snapshots for
  // the post-hoc alignment column follow the same cadence.
  int metrics_every = 1;
};

struct TrainResult {
  QuadMlp net;
  std::vector<MetricsRecord> history;
  int epochs_run = 0;
};

/// Seeded epoch shuffling, mini-batch updates (last partial batch included),
/// AdamW with decoupled weight decay or vanilla SGD with coupled decay, and
/// an optional agop_reg_weight * tr AGOP(batch) penalty. Throws on non-finite
/// loss.
TrainResult train(QuadMlp net, const Dataset& data, const TrainConfig& cfg);

}  // namespace grokbench
