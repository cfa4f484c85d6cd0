#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grokbench/linalg.hpp"

namespace grokbench {

enum class Op { Add, Sub, Mul, Div, SumOfSquares };

std::string op_name(Op op);
Op op_from_name(const std::string& name);

bool is_prime(int p);

/// A modular arithmetic task g(a, b) mod p with prime modulus.
struct ModTask {
  Op op;
  int p;

  ModTask(Op op_, int p_);
  /// Label for the pair (a, b). Division uses b^(p-2) mod p as the inverse.
  int label(int a, int b) const;
  /// Number of discrete input pairs: p^2, or p(p-1) for division.
  int table_size() const;
};

struct TableRow {
  int a, b, label;
};

/// Full Cayley table of the task, rows ordered by (a, b) lexicographically.
std::vector<TableRow> make_table(const ModTask& task);

/// e_a concatenated with e_b in R^(2p).
Vector encode_pair(int a, int b, int p);

struct Dataset {
  int p = 0;
  int d = 0;              // 2p, or 2p+1 in multitask mode
  bool multitask = false;
  std::vector<Op> ops;    // one op, or two in multitask mode
  Matrix x;               // all rows (train and test)
  Matrix y;               // one-hot labels, n x p
  std::vector<int> train_idx;
  std::vector<int> test_idx;
  std::vector<TableRow> rows;   // per encoded row; multitask rows repeat per task
  std::vector<int> task_of_row; // 0/1 per row in multitask mode, else empty
  double fraction = 1.0;
  std::uint64_t seed = 0;

  Matrix train_x() const;
  Matrix train_y() const;
  Matrix test_x() const;
  Matrix test_y() const;
};

/// Seeded shuffle + split: the first round(r * N) shuffled rows are train.
Dataset split(const ModTask& task, double fraction, std::uint64_t seed);

/// Appendix-style two-task dataset: rows e_a + e_b + task bit in R^(2p+1),
/// both tasks sharing one (a, b) split and the label space R^p.
Dataset encode_multitask(const ModTask& task_a, const ModTask& task_b,
                         double fraction, std::uint64_t seed);

/// CSV dump with header a,b,label,split (plus task column in multitask mode).
void save_dataset_csv(const std::string& path, const Dataset& data);

}  // namespace grokbench
