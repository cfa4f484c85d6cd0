#include "grokbench/dataset.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "grokbench/rng.hpp"

namespace grokbench {

std::string op_name(Op op) {
  switch (op) {
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::SumOfSquares: return "x2+y2";
  }
  return "?";
}

Op op_from_name(const std::string& name) {
  if (name == "add") return Op::Add;
  if (name == "sub") return Op::Sub;
  if (name == "mul") return Op::Mul;
  if (name == "div") return Op::Div;
  if (name == "x2+y2" || name == "sumsq") return Op::SumOfSquares;
  throw std::invalid_argument("unknown op: " + name);
}

bool is_prime(int p) {
  if (p < 2) return false;
  for (int q = 2; q * q <= p; ++q)
    if (p % q == 0) return false;
  return true;
}

namespace {

int pow_mod(long long base, long long exp, long long mod) {
  long long r = 1;
  base %= mod;
  if (base < 0) base += mod;
  while (exp > 0) {
    if (exp & 1) r = r * base % mod;
    base = base * base % mod;
    exp >>= 1;
  }
  return static_cast<int>(r);
}

}  // namespace

ModTask::ModTask(Op op_, int p_) : op(op_), p(p_) {
  if (!is_prime(p)) throw std::invalid_argument("ModTask: modulus must be prime");
}

int ModTask::label(int a, int b) const {
  const long long aa = a, bb = b;
  switch (op) {
    case Op::Add: return static_cast<int>((aa + bb) % p);
    case Op::Sub: return static_cast<int>(((aa - bb) % p + p) % p);
    case Op::Mul: return static_cast<int>(aa * bb % p);
    case Op::Div:
      if (b == 0) throw std::invalid_argument("ModTask: division by zero residue");
      return static_cast<int>(aa * pow_mod(bb, p - 2, p) % p);
    case Op::SumOfSquares: return static_cast<int>((aa * aa + bb * bb) % p);
  }
  throw std::logic_error("ModTask: bad op");
}

int ModTask::table_size() const { return op == Op::Div ? p * (p - 1) : p * p; }

std::vector<TableRow> make_table(const ModTask& task) {
  std::vector<TableRow> rows;
  rows.reserve(task.table_size());
  for (int a = 0; a < task.p; ++a)
    for (int b = 0; b < task.p; ++b) {
      if (task.op == Op::Div && b == 0) continue;
      rows.push_back({a, b, task.label(a, b)});
    }
  return rows;
}

Vector encode_pair(int a, int b, int p) {
  if (a < 0 || a >= p || b < 0 || b >= p)
    throw std::invalid_argument("encode_pair: residue out of range");
  Vector x = Vector::Zero(2 * p);
  x[a] = 1.0;
  x[p + b] = 1.0;
  return x;
}

Matrix Dataset::train_x() const {
  Matrix m(static_cast<Eigen::Index>(train_idx.size()), d);
  for (std::size_t i = 0; i < train_idx.size(); ++i) m.row(i) = x.row(train_idx[i]);
  return m;
}
Matrix Dataset::train_y() const {
  Matrix m(static_cast<Eigen::Index>(train_idx.size()), p);
  for (std::size_t i = 0; i < train_idx.size(); ++i) m.row(i) = y.row(train_idx[i]);
  return m;
}
Matrix Dataset::test_x() const {
  Matrix m(static_cast<Eigen::Index>(test_idx.size()), d);
  for (std::size_t i = 0; i < test_idx.size(); ++i) m.row(i) = x.row(test_idx[i]);
  return m;
}
Matrix Dataset::test_y() const {
  Matrix m(static_cast<Eigen::Index>(test_idx.size()), p);
  for (std::size_t i = 0; i < test_idx.size(); ++i) m.row(i) = y.row(test_idx[i]);
  return m;
}

namespace {

std::vector<int> shuffled_indices(int n, std::uint64_t seed) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  Xoshiro256ss rng(seed);
  rng.shuffle(idx);
  return idx;
}

int train_count(double fraction, int n) {
  if (!(fraction > 0.0) || fraction > 1.0)
    throw std::invalid_argument("split: fraction must be in (0, 1]");
  return static_cast<int>(std::llround(fraction * n));
}

}  // namespace

Dataset split(const ModTask& task, double fraction, std::uint64_t seed) {
  const auto rows = make_table(task);
  const int n = static_cast<int>(rows.size());
  const int ntr = train_count(fraction, n);
  const auto idx = shuffled_indices(n, seed);

  Dataset data;
  data.p = task.p;
  data.d = 2 * task.p;
  data.ops = {task.op};
  data.fraction = fraction;
  data.seed = seed;
  data.rows = rows;
  data.x = Matrix::Zero(n, data.d);
  data.y = Matrix::Zero(n, task.p);
  for (int i = 0; i < n; ++i) {
    data.x(i, rows[i].a) = 1.0;
    data.x(i, task.p + rows[i].b) = 1.0;
    data.y(i, rows[i].label) = 1.0;
  }
  data.train_idx.assign(idx.begin(), idx.begin() + ntr);
  data.test_idx.assign(idx.begin() + ntr, idx.end());
  return data;
}

Dataset encode_multitask(const ModTask& task_a, const ModTask& task_b,
                         double fraction, std::uint64_t seed) {
  if (task_a.p != task_b.p)
    throw std::invalid_argument("encode_multitask: modulus mismatch");
  if (task_a.table_size() != task_b.table_size())
    throw std::invalid_argument("encode_multitask: tasks must share the same pair table");
  const int p = task_a.p;
  const auto rows_a = make_table(task_a);
  const auto rows_b = make_table(task_b);
  const int n_pairs = static_cast<int>(rows_a.size());
  const int ntr = train_count(fraction, n_pairs);
  const auto idx = shuffled_indices(n_pairs, seed);

  Dataset data;
  data.p = p;
  data.d = 2 * p + 1;
  data.multitask = true;
  data.ops = {task_a.op, task_b.op};
  data.fraction = fraction;
  data.seed = seed;
  data.x = Matrix::Zero(2 * n_pairs, data.d);
  data.y = Matrix::Zero(2 * n_pairs, p);
  data.rows.reserve(2 * n_pairs);
  data.task_of_row.reserve(2 * n_pairs);
  for (int t = 0; t < 2; ++t) {
    const auto& rows = t == 0 ? rows_a : rows_b;
    for (int i = 0; i < n_pairs; ++i) {
      const int r = t * n_pairs + i;
      data.x(r, rows[i].a) = 1.0;
      data.x(r, p + rows[i].b) = 1.0;
      data.x(r, 2 * p) = static_cast<double>(t);
      data.y(r, rows[i].label) = 1.0;
      data.rows.push_back(rows[i]);
      data.task_of_row.push_back(t);
    }
  }
  // Both tasks share the (a, b) split.
  for (int i = 0; i < ntr; ++i) data.train_idx.push_back(idx[i]);
  for (int i = 0; i < ntr; ++i) data.train_idx.push_back(n_pairs + idx[i]);
  for (int i = ntr; i < n_pairs; ++i) data.test_idx.push_back(idx[i]);
  for (int i = ntr; i < n_pairs; ++i) data.test_idx.push_back(n_pairs + idx[i]);
  return data;
}

void save_dataset_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  std::vector<char> is_train(data.rows.size(), 0);
  for (int i : data.train_idx) is_train[i] = 1;
  out << (data.multitask ? "a,b,task,label,split\n" : "a,b,label,split\n");
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const auto& r = data.rows[i];
    out << r.a << ',' << r.b << ',';
    if (data.multitask) out << data.task_of_row[i] << ',';
    out << r.label << ',' << (is_train[i] ? "train" : "test") << '\n';
  }
}

}  // namespace grokbench
