#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "grokbench/dataset.hpp"
#include "grokbench/history.hpp"
#include "grokbench/kernel.hpp"
#include "grokbench/measures.hpp"

namespace grokbench {

struct RfmConfig {
  KernelSpec kernel;
  int iterations = 30;
  double matrix_power = 0.5;
  std::uint64_t seed = 0;
  // Rescale each feature matrix to unit spectral radius after the power.
  // Off by default: the update applies the raw AGOP power.
  bool normalize_m = false;
};

struct RfmResult {
  KernelMachine machine;            // final fit
  Matrix m;                         // final feature matrix M_T
  std::vector<MetricsRecord> history;
  std::vector<Matrix> snapshots;    // M_0 = I, M_1, ..., M_T
  int jitter_events = 0;
};

/// Algorithm: alternate ridgeless fit with k(.,.;M_t) and M_{t+1} <-
/// [AGOP over the train split]^s. History row t carries the fit-t metrics and
/// the deviation/alignment of the feature matrix M_t it produced; alignment
/// is filled post-hoc against M_T.
RfmResult rfm_run(const Dataset& data, const RfmConfig& cfg);

/// Replays a feature-matrix sequence (typically a plain run's snapshots
/// M_1..M_T passed through enforce_circulant) with one ridgeless fit each.
std::vector<MetricsRecord> rfm_replay(const Dataset& data, const RfmConfig& cfg,
                                      const std::vector<Matrix>& feature_matrices);

/// Diagonal-normalizes M, resets both diagonal p x p blocks to I - (1/p)11^T,
/// replaces the bottom-left block by the exact circulant built from its first
/// column (column l = sigma^l(c)) and the top-right by its transpose.
Matrix enforce_circulant(const Matrix& m, int p);

/// Observation-1 feature matrix: diagonal blocks c1 I + c2 11^T, off-diagonal
/// blocks a random circulant (first column i.i.d. uniform on [0,1]) and its
/// transpose. c2 = NaN selects the default -1/p.
Matrix random_circulant_m(int p, std::uint64_t seed, double c1 = 1.0,
                          double c2 = std::numeric_limits<double>::quiet_NaN(),
                          BlockKind kind = BlockKind::Circulant);

/// Multiplication/division placement: the random circulant lives on the
/// (p-1)^2 block in discrete-log coordinates and is permuted back, with row
/// and column 0 left zero.
Matrix random_circulant_m_dlog(int p, std::uint64_t seed, const Generator& gen,
                               double c1 = 1.0,
                               double c2 = std::numeric_limits<double>::quiet_NaN(),
                               BlockKind kind = BlockKind::Circulant);

/// x -> M^(1/4) x for every row. Indefinite M is handled through its positive
/// part (the random block-circulant construction is indefinite).
Matrix transform_inputs(const Matrix& m, const Matrix& x);

}  // namespace grokbench
