#include <CLI11.hpp>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "grokbench/config.hpp"
#include "grokbench/experiments.hpp"

namespace {

using grokbench::Config;

struct SubcommandState {
  CLI::App* app = nullptr;
  std::string config_file;
  bool print_config = false;
  // (option, config key, storage) triples; applied in order after parsing
  std::vector<std::tuple<CLI::Option*, std::string, std::shared_ptr<std::string>>> options;
};

void add_key(SubcommandState& st, const std::string& flag, const std::string& key,
             const std::string& help) {
  auto storage = std::make_shared<std::string>();
  CLI::Option* opt = st.app->add_option(flag, *storage, help);
  st.options.emplace_back(opt, key, storage);
}

Config collect(const SubcommandState& st) {
  Config cfg;
  if (!st.config_file.empty()) cfg = Config::load(st.config_file);
  for (const auto& [opt, key, storage] : st.options)
    if (opt->count() > 0) cfg.set(key, *storage);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grokbench: modular-arithmetic feature-learning experiments"};
  app.require_subcommand(1);

  std::vector<std::shared_ptr<SubcommandState>> states;
  const auto make_sub = [&](const std::string& name, const std::string& desc) {
    auto st = std::make_shared<SubcommandState>();
    st->app = app.add_subcommand(name, desc);
    st->app->add_option("--config", st->config_file, "flat key=value config file");
    st->app->add_flag("--print-config", st->print_config,
                      "print the effective config and exit");
    states.push_back(st);
    return st;
  };

  const auto add_task_keys = [](SubcommandState& st) {
    add_key(st, "--op", "op", "modular operation (add|sub|mul|div|x2+y2)");
    add_key(st, "--p", "p", "prime modulus");
    add_key(st, "--fraction", "fraction", "training fraction in (0,1]");
    add_key(st, "--seed", "seed", "split / run seed");
    add_key(st, "--outdir", "outdir", "artifact directory");
    add_key(st, "--dump-dataset", "dump_dataset", "also write dataset.csv (on|off)");
  };
  const auto add_kernel_keys = [](SubcommandState& st) {
    add_key(st, "--kernel", "kernel", "quadratic|gaussian");
    add_key(st, "--bandwidth", "bandwidth", "Gaussian bandwidth L");
    add_key(st, "--iters", "iters", "iterations T");
    add_key(st, "--power", "power", "matrix power s");
    add_key(st, "--normalize-m", "normalize_m", "rescale M to unit spectral radius (on|off)");
  };
  const auto add_nn_keys = [](SubcommandState& st) {
    add_key(st, "--optimizer", "optimizer", "adamw|sgd");
    add_key(st, "--width", "width", "hidden width");
    add_key(st, "--batch", "batch", "batch size");
    add_key(st, "--lr", "lr", "learning rate");
    add_key(st, "--weight-decay", "weight_decay", "weight decay");
    add_key(st, "--agop-reg", "agop_reg", "AGOP trace penalty weight");
    add_key(st, "--epochs", "epochs", "training epochs");
    add_key(st, "--metrics-every", "metrics_every", "evaluation cadence in epochs");
  };

  auto rfm = make_sub("rfm", "kernel RFM run with history and feature snapshots");
  add_task_keys(*rfm);
  add_kernel_keys(*rfm);

  auto multi = make_sub("rfm-multitask", "two-task RFM with per-task metrics");
  add_task_keys(*multi);
  add_kernel_keys(*multi);
  add_key(*multi, "--op-a", "op_a", "task-0 operation");
  add_key(*multi, "--op-b", "op_b", "task-1 operation");

  auto rand = make_sub("random-circulant", "one kernel fit on random block-circulant features");
  add_task_keys(*rand);
  add_key(*rand, "--kernel", "kernel", "quadratic|gaussian");
  add_key(*rand, "--bandwidth", "bandwidth", "Gaussian bandwidth L");
  add_key(*rand, "--circulant-seed", "circulant_seed", "seed for the circulant first column");
  add_key(*rand, "--block-kind", "block_kind", "circulant|hankel");
  add_key(*rand, "--normalize-m", "normalize_m", "rescale M* to unit spectral radius (on|off)");

  auto enf = make_sub("enforce-circulant", "plain RFM vs per-iteration enforced circulant");
  add_task_keys(*enf);
  add_kernel_keys(*enf);

  auto nn = make_sub("nn", "quadratic-activation network training");
  add_task_keys(*nn);
  add_nn_keys(*nn);

  auto abl = make_sub("nn-ablate-reg", "none / weight-decay / AGOP-trace regularization arms");
  add_task_keys(*abl);
  add_nn_keys(*abl);

  auto fma = make_sub("fma-verify", "FMA, Theorem-1 ensemble and low-rank checks");
  add_key(*fma, "--p", "p", "modulus for the ensemble checks");
  add_key(*fma, "--all", "all", "run the p in {3,5,7} sweep (on|off)");
  add_key(*fma, "--table-p", "table_p", "largest modulus for the table check");
  add_key(*fma, "--lowrank-p", "lowrank_p", "modulus for the low-rank construction");
  add_key(*fma, "--tolerance", "tolerance", "max abs error per check");
  add_key(*fma, "--outdir", "outdir", "artifact directory");

  auto reorder = make_sub("reorder", "apply discrete-log reordering to a saved matrix");
  add_key(*reorder, "--input", "input", "matrix CSV to reorder");
  add_key(*reorder, "--output", "output", "where to write the reordered matrix");
  add_key(*reorder, "--p", "p", "modulus (0 = infer from a 2p x 2p matrix)");

  auto plot = make_sub("plot", "emit SVG charts for a history CSV and sibling snapshots");
  add_key(*plot, "--history", "history", "history.csv path");
  add_key(*plot, "--hide-diagonal", "hide_diagonal", "blank heatmap diagonals (on|off)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    for (const auto& st : states) {
      if (st->app->parsed()) {
        Config cfg = collect(*st);
        if (st->print_config) {
          std::cout << grokbench::with_defaults(name, cfg).serialize();
          return 0;
        }
        using Runner = int (*)(Config);
        static const std::map<std::string, Runner> runners = {
            {"rfm", grokbench::run_rfm_experiment},
            {"rfm-multitask", grokbench::run_multitask_experiment},
            {"random-circulant", grokbench::run_random_circulant_experiment},
            {"enforce-circulant", grokbench::run_enforce_circulant_experiment},
            {"nn", grokbench::run_nn_experiment},
            {"nn-ablate-reg", grokbench::run_nn_ablation_experiment},
            {"fma-verify", grokbench::run_fma_verify},
            {"reorder", grokbench::run_reorder},
            {"plot", grokbench::run_plot},
        };
        return runners.at(name)(std::move(cfg));
      }
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
