#include "grokbench/history.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "grokbench/matrix_io.hpp"

namespace grokbench {

void save_history_csv(const std::string& path, const std::vector<MetricsRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const bool per_task = !records.empty() && records.front().task0_loss.has_value();
  const bool nfa = !records.empty() && records.front().nfa_correlation.has_value();
  out << "iter,train_loss,train_acc,test_loss,test_acc,correct_class_test_loss,"
         "circulant_deviation,agop_alignment";
  if (per_task) out << ",task0_loss,task0_acc,task1_loss,task1_acc";
  if (nfa) out << ",nfa_correlation";
  out << '\n';
  for (const auto& r : records) {
    out << r.iter << ',' << format_double(r.train_loss) << ',' << format_double(r.train_acc)
        << ',' << format_double(r.test_loss) << ',' << format_double(r.test_acc) << ','
        << format_double(r.correct_class_test_loss) << ','
        << format_double(r.circulant_deviation) << ',' << format_double(r.agop_alignment);
    if (per_task)
      out << ',' << format_double(*r.task0_loss) << ',' << format_double(*r.task0_acc) << ','
          << format_double(*r.task1_loss) << ',' << format_double(*r.task1_acc);
    if (nfa) out << ',' << format_double(*r.nfa_correlation);
    out << '\n';
  }
}

std::vector<MetricsRecord> load_history_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::invalid_argument("empty history file: " + path);
  std::vector<std::string> cols;
  {
    std::stringstream ss(header);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  std::vector<MetricsRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    MetricsRecord r;
    for (const auto& col : cols) {
      if (!std::getline(ss, cell, ',')) throw std::runtime_error("short row in " + path);
      const double v = std::stod(cell);
      if (col == "iter") r.iter = static_cast<int>(v);
      else if (col == "train_loss") r.train_loss = v;
      else if (col == "train_acc") r.train_acc = v;
      else if (col == "test_loss") r.test_loss = v;
      else if (col == "test_acc") r.test_acc = v;
      else if (col == "correct_class_test_loss") r.correct_class_test_loss = v;
      else if (col == "circulant_deviation") r.circulant_deviation = v;
      else if (col == "agop_alignment") r.agop_alignment = v;
      else if (col == "task0_loss") r.task0_loss = v;
      else if (col == "task0_acc") r.task0_acc = v;
      else if (col == "task1_loss") r.task1_loss = v;
      else if (col == "task1_acc") r.task1_acc = v;
      else if (col == "nfa_correlation") r.nfa_correlation = v;
      else throw std::runtime_error("unknown history column: " + col);
    }
    records.push_back(r);
  }
  return records;
}

}  // namespace grokbench
