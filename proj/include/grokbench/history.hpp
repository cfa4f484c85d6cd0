#pragma once

#include <optional>
#include <string>
#include <vector>

namespace grokbench {

/// One iteration (RFM) or epoch (network training) of progress metrics.
struct MetricsRecord {
  int iter = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double test_loss = 0.0;
  double test_acc = 0.0;
  double correct_class_test_loss = 0.0;
  double circulant_deviation = 0.0;
  double agop_alignment = 0.0;
  // Multitask decomposition, present only for two-task runs.
  std::optional<double> task0_loss, task0_acc, task1_loss, task1_acc;
  // Neural-feature correlation, present only for network runs.
  std::optional<double> nfa_correlation;
};

/// history.csv with the shared schema; optional column groups are emitted
/// when present on the first record.
void save_history_csv(const std::string& path, const std::vector<MetricsRecord>& records);

std::vector<MetricsRecord> load_history_csv(const std::string& path);

}  // namespace grokbench
