#include "grokbench/experiments.hpp"

#include <Eigen/Core>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <nlohmann/json.hpp>

#include "grokbench/dataset.hpp"
#include "grokbench/fma.hpp"
#include "grokbench/history.hpp"
#include "grokbench/matrix_io.hpp"
#include "grokbench/nnet.hpp"
#include "grokbench/rfm.hpp"
#include "grokbench/svg.hpp"

namespace grokbench {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

void common_defaults(Config& cfg) {
  const char* env_seed = std::getenv("GROKBENCH_SEED");
  cfg.set_default("seed", env_seed ? env_seed : "0");
  cfg.set_default("outdir", "out");
  cfg.set_default("dump_dataset", "off");
}

void rfm_defaults(Config& cfg) {
  cfg.set_default("experiment", "rfm");
  cfg.set_default("op", "add");
  cfg.set_default("p", "61");
  cfg.set_default("fraction", "0.5");
  cfg.set_default("kernel", "quadratic");
  cfg.set_default("bandwidth", "2.5");
  cfg.set_default("iters", "30");
  cfg.set_default("power", "0.5");
  cfg.set_default("normalize_m", "off");
  common_defaults(cfg);
}

void multitask_defaults(Config& cfg) {
  cfg.set_default("experiment", "rfm-multitask");
  cfg.set_default("op_a", "add");
  cfg.set_default("op_b", "x2+y2");
  cfg.set_default("p", "61");
  cfg.set_default("fraction", "0.8");
  cfg.set_default("kernel", "gaussian");
  cfg.set_default("bandwidth", "2.5");
  cfg.set_default("iters", "30");
  cfg.set_default("power", "0.5");
  cfg.set_default("normalize_m", "off");
  common_defaults(cfg);
}

void random_circulant_defaults(Config& cfg) {
  cfg.set_default("experiment", "random-circulant");
  cfg.set_default("op", "add");
  cfg.set_default("p", "61");
  cfg.set_default("fraction", "0.5");
  cfg.set_default("kernel", "gaussian");
  cfg.set_default("bandwidth", "2.5");
  cfg.set_default("circulant_seed", "0");
  cfg.set_default("block_kind", "circulant");
  // Rescale M* to unit spectral radius before the quartic-root transform;
  // without it the uniform-[0,1] circulant mass swamps the fixed bandwidth.
  cfg.set_default("normalize_m", "on");
  common_defaults(cfg);
}

void enforce_defaults(Config& cfg) {
  cfg.set_default("experiment", "enforce-circulant");
  cfg.set_default("op", "add");
  cfg.set_default("p", "97");
  cfg.set_default("fraction", "0.5");
  cfg.set_default("kernel", "gaussian");
  cfg.set_default("bandwidth", "2.5");
  cfg.set_default("iters", "30");
  cfg.set_default("power", "0.5");
  cfg.set_default("normalize_m", "off");
  common_defaults(cfg);
}

void nn_defaults(Config& cfg) {
  cfg.set_default("experiment", "nn");
  cfg.set_default("op", "add");
  cfg.set_default("p", "61");
  cfg.set_default("fraction", "0.5");
  cfg.set_default("optimizer", "adamw");
  cfg.set_default("width", "1024");
  cfg.set_default("batch", "32");
  cfg.set_default("lr", "0.001");
  cfg.set_default("weight_decay", "1.0");
  cfg.set_default("agop_reg", "0");
  cfg.set_default("epochs", "50");
  cfg.set_default("metrics_every", "1");
  common_defaults(cfg);
}

void ablation_defaults(Config& cfg) {
  cfg.set_default("experiment", "nn-ablate-reg");
  cfg.set_default("op", "add");
  cfg.set_default("p", "61");
  cfg.set_default("fraction", "0.4");
  cfg.set_default("optimizer", "sgd");
  cfg.set_default("width", "512");
  cfg.set_default("batch", "128");
  cfg.set_default("lr", "1.0");
  cfg.set_default("weight_decay", "1e-05");
  cfg.set_default("agop_reg", "0.001");
  cfg.set_default("epochs", "2000");
  cfg.set_default("metrics_every", "5");
  common_defaults(cfg);
}

void fma_defaults(Config& cfg) {
  cfg.set_default("experiment", "fma-verify");
  cfg.set_default("p", "5");
  cfg.set_default("all", "off");         // run the full p in {3,5,7} sweep
  cfg.set_default("lowrank_p", "61");
  cfg.set_default("table_p", "61");      // largest modulus for the table check
  cfg.set_default("tolerance", "1e-8");
  common_defaults(cfg);
}

void reorder_defaults(Config& cfg) {
  cfg.set_default("experiment", "reorder");
  cfg.set_default("p", "0");  // 0 = infer from matrix size (2p x 2p)
  common_defaults(cfg);
}

void plot_defaults(Config& cfg) {
  cfg.set_default("experiment", "plot");
  cfg.set_default("hide_diagonal", "off");
  common_defaults(cfg);
}

KernelSpec kernel_from(const Config& cfg) {
  const std::string k = cfg.get("kernel");
  if (k == "quadratic") return KernelSpec(KernelKind::Quadratic);
  if (k == "gaussian") return KernelSpec(KernelKind::Gaussian, cfg.get_double("bandwidth"));
  throw std::invalid_argument("config: unknown kernel '" + k + "'");
}

fs::path prepare_outdir(const Config& cfg) {
  fs::path dir(cfg.get("outdir"));
  fs::create_directories(dir);
  return dir;
}

void write_metadata(const fs::path& dir, const Config& cfg) {
  cfg.save((dir / "config.txt").string());
  nlohmann::json j;
  for (const auto& [k, v] : cfg.entries()) j[k] = v;
  j["grokbench_version"] = kVersion;
  j["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                       std::to_string(EIGEN_MAJOR_VERSION) + "." +
                       std::to_string(EIGEN_MINOR_VERSION);
  std::ofstream out(dir / "run.json");
  out << j.dump(2) << '\n';
}

void write_snapshots(const fs::path& dir, const std::vector<Matrix>& snapshots) {
  for (std::size_t t = 0; t < snapshots.size(); ++t)
    save_matrix_csv((dir / ("M_" + std::to_string(t) + ".csv")).string(), snapshots[t]);
}

RfmConfig rfm_config_from(const Config& cfg) {
  RfmConfig rc;
  rc.kernel = kernel_from(cfg);
  rc.iterations = cfg.get_int("iters");
  rc.matrix_power = cfg.get_double("power");
  rc.seed = cfg.get_u64("seed");
  rc.normalize_m = cfg.get_bool("normalize_m");
  return rc;
}

int guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const std::runtime_error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace

Config with_defaults(const std::string& experiment, Config cfg) {
  if (experiment == "rfm") rfm_defaults(cfg);
  else if (experiment == "rfm-multitask") multitask_defaults(cfg);
  else if (experiment == "random-circulant") random_circulant_defaults(cfg);
  else if (experiment == "enforce-circulant") enforce_defaults(cfg);
  else if (experiment == "nn") nn_defaults(cfg);
  else if (experiment == "nn-ablate-reg") ablation_defaults(cfg);
  else if (experiment == "fma-verify") fma_defaults(cfg);
  else if (experiment == "reorder") reorder_defaults(cfg);
  else if (experiment == "plot") plot_defaults(cfg);
  else throw std::invalid_argument("unknown experiment: " + experiment);
  return cfg;
}

int run_rfm_experiment(Config cfg) {
  rfm_defaults(cfg);
  const fs::path dir = prepare_outdir(cfg);
  write_metadata(dir, cfg);
  return guarded([&] {
    const ModTask task(op_from_name(cfg.get("op")), cfg.get_int("p"));
    const Dataset data = split(task, cfg.get_double("fraction"), cfg.get_u64("seed"));
    if (cfg.get_bool("dump_dataset")) save_dataset_csv((dir / "dataset.csv").string(), data);
    const RfmResult res = rfm_run(data, rfm_config_from(cfg));
    save_history_csv((dir / "history.csv").string(), res.history);
    write_snapshots(dir, res.snapshots);
    std::cout << "final test_acc=" << res.history.back().test_acc
              << " test_loss=" << res.history.back().test_loss << '\n';
  });
}

int run_multitask_experiment(Config cfg) {
  multitask_defaults(cfg);
  const fs::path dir = prepare_outdir(cfg);
  write_metadata(dir, cfg);
  return guarded([&] {
    const int p = cfg.get_int("p");
    const ModTask task_a(op_from_name(cfg.get("op_a")), p);
    const ModTask task_b(op_from_name(cfg.get("op_b")), p);
    const Dataset data =
        encode_multitask(task_a, task_b, cfg.get_double("fraction"), cfg.get_u64("seed"));
    if (cfg.get_bool("dump_dataset")) save_dataset_csv((dir / "dataset.csv").string(), data);
    const RfmResult res = rfm_run(data, rfm_config_from(cfg));
    save_history_csv((dir / "history.csv").string(), res.history);
    write_snapshots(dir, res.snapshots);
    std::cout << "final task0_acc=" << *res.history.back().task0_acc
              << " task1_acc=" << *res.history.back().task1_acc << '\n';
  });
}

int run_random_circulant_experiment(Config cfg) {
  random_circulant_defaults(cfg);
  const fs::path dir = prepare_outdir(cfg);
  write_metadata(dir, cfg);
  return guarded([&] {
    const int p = cfg.get_int("p");
    const Op op = op_from_name(cfg.get("op"));
    const ModTask task(op, p);
    const Dataset data = split(task, cfg.get_double("fraction"), cfg.get_u64("seed"));
    const BlockKind kind =
        cfg.get("block_kind") == "hankel" ? BlockKind::Hankel : BlockKind::Circulant;
    Matrix mstar;
    if (op == Op::Mul || op == Op::Div) {
      const Generator gen = find_generator(p);
      mstar = random_circulant_m_dlog(p, cfg.get_u64("circulant_seed"), gen, 1.0,
                                      std::numeric_limits<double>::quiet_NaN(), kind);
    } else {
      mstar = random_circulant_m(p, cfg.get_u64("circulant_seed"), 1.0,
                                 std::numeric_limits<double>::quiet_NaN(), kind);
    }
    if (cfg.get_bool("normalize_m")) mstar /= spectral_radius_sym(mstar);
    save_matrix_csv((dir / "M_star.csv").string(), mstar);

    const KernelSpec spec = kernel_from(cfg);
    const Matrix xt_all = transform_inputs(mstar, data.x);
    const auto rows_of = [&](const std::vector<int>& idx) {
      Matrix m(static_cast<Eigen::Index>(idx.size()), xt_all.cols());
      for (std::size_t i = 0; i < idx.size(); ++i) m.row(i) = xt_all.row(idx[i]);
      return m;
    };
    const Matrix eye = Matrix::Identity(data.d, data.d);
    const KernelMachine km = fit(spec, eye, rows_of(data.train_idx), data.train_y());
    const double acc_tr = accuracy(predict(km, rows_of(data.train_idx)), data.train_y());
    const double acc_te = accuracy(predict(km, rows_of(data.test_idx)), data.test_y());
    const double loss_te = mse(predict(km, rows_of(data.test_idx)), data.test_y());

    // baseline: same kernel, untransformed inputs, M = I
    const KernelMachine base = fit(spec, eye, data.train_x(), data.train_y());
    const double base_acc = accuracy(predict(base, data.test_x()), data.test_y());

    std::ofstream out(dir / "result.txt");
    out << "train_acc=" << format_double(acc_tr) << "\ntest_acc=" << format_double(acc_te)
        << "\ntest_loss=" << format_double(loss_te)
        << "\nbaseline_identity_test_acc=" << format_double(base_acc) << '\n';
    std::cout << "test_acc=" << acc_te << " baseline_identity_test_acc=" << base_acc << '\n';
  });
}

int run_enforce_circulant_experiment(Config cfg) {
  enforce_defaults(cfg);
  const fs::path dir = prepare_outdir(cfg);
  write_metadata(dir, cfg);
  return guarded([&] {
    const ModTask task(op_from_name(cfg.get("op")), cfg.get_int("p"));
    const Dataset data = split(task, cfg.get_double("fraction"), cfg.get_u64("seed"));
    const RfmConfig rc = rfm_config_from(cfg);
    const RfmResult plain = rfm_run(data, rc);
    save_history_csv((dir / "history.csv").string(), plain.history);
    write_snapshots(dir, plain.snapshots);

    std::vector<Matrix> enforced;
    for (std::size_t t = 1; t < plain.snapshots.size(); ++t)
      enforced.push_back(enforce_circulant(plain.snapshots[t], data.p));
    const auto replay = rfm_replay(data, rc, enforced);
    save_history_csv((dir / "history_enforced.csv").string(), replay);
    std::cout << "plain final test_acc=" << plain.history.back().test_acc
              << " enforced final test_acc=" << replay.back().test_acc << '\n';
  });
}

int run_nn_experiment(Config cfg) {
  nn_defaults(cfg);
  const fs::path dir = prepare_outdir(cfg);
  write_metadata(dir, cfg);
  return guarded([&] {
    const ModTask task(op_from_name(cfg.get("op")), cfg.get_int("p"));
    const Dataset data = split(task, cfg.get_double("fraction"), cfg.get_u64("seed"));
    if (cfg.get_bool("dump_dataset")) save_dataset_csv((dir / "dataset.csv").string(), data);
    TrainConfig tc;
    tc.optimizer = cfg.get("optimizer") == "sgd" ? Optimizer::SGD : Optimizer::AdamW;
    tc.learning_rate = cfg.get_double("lr");
    tc.weight_decay = cfg.get_double("weight_decay");
    tc.agop_reg_weight = cfg.get_double("agop_reg");
    tc.batch_size = cfg.get_int("batch");
    tc.epochs = cfg.get_int("epochs");
    tc.width = cfg.get_int("width");
    tc.seed = cfg.get_u64("seed");
    tc.metrics_every = cfg.get_int("metrics_every");
    QuadMlp net = mlp_init(data.d, tc.width, data.p, tc.seed);
    const TrainResult res = train(std::move(net), data, tc);
    save_history_csv((dir / "history.csv").string(), res.history);
    save_matrix_csv((dir / "nfm.csv").string(), nfm(res.net));
    save_matrix_csv((dir / "agop_sqrt.csv").string(),
                    psd_power(agop_mlp(res.net, data.train_x()), 0.5));
    std::cout << "final test_acc=" << res.history.back().test_acc
              << " nfa_correlation=" << *res.history.back().nfa_correlation << '\n';
  });
}

int run_nn_ablation_experiment(Config cfg) {
  ablation_defaults(cfg);
  const fs::path dir = prepare_outdir(cfg);
  write_metadata(dir, cfg);
  return guarded([&] {
    const ModTask task(op_from_name(cfg.get("op")), cfg.get_int("p"));
    const Dataset data = split(task, cfg.get_double("fraction"), cfg.get_u64("seed"));
    TrainConfig base;
    base.optimizer = cfg.get("optimizer") == "sgd" ? Optimizer::SGD : Optimizer::AdamW;
    base.learning_rate = cfg.get_double("lr");
    base.batch_size = cfg.get_int("batch");
    base.epochs = cfg.get_int("epochs");
    base.width = cfg.get_int("width");
    base.seed = cfg.get_u64("seed");
    base.metrics_every = cfg.get_int("metrics_every");

    struct Arm { const char* name; double wd; double agop; };
    const Arm arms[] = {{"none", 0.0, 0.0},
                        {"wd", cfg.get_double("weight_decay"), 0.0},
                        {"agop", 0.0, cfg.get_double("agop_reg")}};
    for (const Arm& arm : arms) {
      TrainConfig tc = base;
      tc.weight_decay = arm.wd;
      tc.agop_reg_weight = arm.agop;
      QuadMlp net = mlp_init(data.d, tc.width, data.p, tc.seed);
      const TrainResult res = train(std::move(net), data, tc);
      save_history_csv((dir / ("history_" + std::string(arm.name) + ".csv")).string(),
                       res.history);
      std::cout << arm.name << ": final test_acc=" << res.history.back().test_acc << '\n';
    }
  });
}

int run_fma_verify(Config cfg) {
  fma_defaults(cfg);
  const fs::path dir = prepare_outdir(cfg);
  write_metadata(dir, cfg);
  const double tol = cfg.get_double("tolerance");
  bool all_ok = true;
  const int rc = guarded([&] {
    std::vector<int> ps;
    if (cfg.get_bool("all")) ps = {3, 5, 7};
    else ps = {cfg.get_int("p")};

    std::printf("%-34s %-12s %s\n", "check", "max_error", "status");
    const auto report_line = [&](const std::string& name, double err) {
      const bool ok = err < tol;
      all_ok = all_ok && ok;
      std::printf("%-34s %-12.3e %s\n", name.c_str(), err, ok ? "ok" : "FAIL");
    };

    for (int p : ps) {
      for (FmaMode mode : {FmaMode::Add, FmaMode::Sub}) {
        const char* mn = mode == FmaMode::Add ? "add" : "sub";
        double err = 0.0;
        fma_table_check(make_fma(p, mode), ModTask(mode == FmaMode::Add ? Op::Add : Op::Sub, p),
                        tol, &err);
        report_line("fma_table p=" + std::to_string(p) + " " + mn, err);
      }
      const auto sub = theorem1_build(p);
      const auto rep = theorem1_verify(sub);
      report_line("thm1 sub bilinear p=" + std::to_string(p), rep.bilinear_discrete_err);
      report_line("thm1 sub fma_discrete p=" + std::to_string(p), rep.fma_discrete_err);
      report_line("thm1 sub fma_random p=" + std::to_string(p), rep.fma_random_err);
      report_line("thm1 sub system p=" + std::to_string(p), rep.system_residual);
      std::printf("%-34s %.6f (matches %s, residual %.3e)\n",
                  ("thm1 lambda p=" + std::to_string(p)).c_str(), rep.lambda_fit,
                  rep.lambda_match.c_str(), rep.lambda_fit_residual);
      const auto add = theorem1_addition_variant(p);
      const auto repa = theorem1_verify(add);
      report_line("thm1 add bilinear p=" + std::to_string(p), repa.bilinear_discrete_err);
      report_line("thm1 add fma_discrete p=" + std::to_string(p), repa.fma_discrete_err);
      report_line("thm1 add fma_random p=" + std::to_string(p), repa.fma_random_err);
    }

    const int tp = cfg.get_int("table_p");
    for (FmaMode mode : {FmaMode::Add, FmaMode::Sub}) {
      double err = 0.0;
      fma_table_check(make_fma(tp, mode), ModTask(mode == FmaMode::Add ? Op::Add : Op::Sub, tp),
                      tol, &err);
      report_line("fma_table p=" + std::to_string(tp) +
                      (mode == FmaMode::Add ? " add" : " sub"),
                  err);
    }

    const int lp = cfg.get_int("lowrank_p");
    for (Op op : {Op::Add, Op::Mul}) {
      const LowRankModel lr = lowrank_build(lp, op);
      const ModTask task(op, lp);
      int wrong = 0;
      for (const TableRow& row : make_table(task))
        if (lowrank_predict(lr, row.a, row.b) != row.label) ++wrong;
      report_line("lowrank " + op_name(op) + " p=" + std::to_string(lp),
                  static_cast<double>(wrong));
      const Vector sv = encoder_singular_values(lr, 5);
      const bool rank4 = sv[3] > 1e-8 && sv[4] < 1e-10;
      all_ok = all_ok && rank4;
      std::printf("%-34s s4=%.3e s5=%.3e %s\n",
                  ("lowrank rank " + op_name(op)).c_str(), sv[3], sv[4],
                  rank4 ? "ok" : "FAIL");
    }
  });
  if (rc != 0) return rc;
  return all_ok ? 0 : 3;
}

int run_reorder(Config cfg) {
  reorder_defaults(cfg);
  return guarded([&] {
    const std::string in_path = cfg.get("input");
    const std::string out_path = cfg.get("output");
    const Matrix m = load_matrix_csv(in_path);
    int p = cfg.get_int("p");
    if (p == 0) p = static_cast<int>(m.rows()) / 2;
    const Generator gen = find_generator(p);
    Matrix out;
    if (m.rows() == 2 * p) {
      // reorder both halves of a full feature matrix
      std::vector<int> perm(2 * p);
      for (int r = 0; r < p; ++r) {
        perm[r] = r == 0 ? 0 : gen.phi(r);
        perm[p + r] = r == 0 ? p : p + gen.phi(r);
      }
      out = Matrix(2 * p, 2 * p);
      for (int r = 0; r < 2 * p; ++r)
        for (int c = 0; c < 2 * p; ++c) out(perm[r], perm[c]) = m(r, c);
    } else if (m.rows() == p) {
      out = dlog_reorder(m, gen);
    } else {
      throw std::invalid_argument("reorder: matrix must be p x p or 2p x 2p");
    }
    save_matrix_csv(out_path, out);
    std::cout << "reordered by generator g=" << gen.g << '\n';
  });
}

int run_plot(Config cfg) {
  plot_defaults(cfg);
  const std::string history_path = cfg.get("history");
  const auto records = load_history_csv(history_path);
  if (records.empty()) throw std::invalid_argument("plot: history has no rows");
  return guarded([&] {
    const fs::path dir = fs::path(history_path).parent_path();
    std::vector<double> xs;
    for (const auto& r : records) xs.push_back(r.iter);

    const auto emit = [&](const std::string& name, auto getter, bool log_y) {
      std::vector<double> ys;
      for (const auto& r : records) ys.push_back(getter(r));
      LineChartOptions opts;
      opts.title = name;
      opts.y_label = name;
      opts.log_y = log_y;
      std::ofstream out(dir / (name + ".svg"));
      out << line_chart_svg(xs, ys, opts);
    };
    emit("train_loss", [](const MetricsRecord& r) { return r.train_loss; }, true);
    emit("train_acc", [](const MetricsRecord& r) { return r.train_acc; }, false);
    emit("test_loss", [](const MetricsRecord& r) { return r.test_loss; }, true);
    emit("test_acc", [](const MetricsRecord& r) { return r.test_acc; }, false);
    emit("correct_class_test_loss",
         [](const MetricsRecord& r) { return r.correct_class_test_loss; }, true);
    emit("circulant_deviation", [](const MetricsRecord& r) { return r.circulant_deviation; },
         false);
    emit("agop_alignment", [](const MetricsRecord& r) { return r.agop_alignment; }, false);
    if (records.front().task0_loss) {
      emit("task0_loss", [](const MetricsRecord& r) { return *r.task0_loss; }, true);
      emit("task0_acc", [](const MetricsRecord& r) { return *r.task0_acc; }, false);
      emit("task1_loss", [](const MetricsRecord& r) { return *r.task1_loss; }, true);
      emit("task1_acc", [](const MetricsRecord& r) { return *r.task1_acc; }, false);
    }
    if (records.front().nfa_correlation)
      emit("nfa_correlation", [](const MetricsRecord& r) { return *r.nfa_correlation; }, false);

    HeatmapOptions hopts;
    hopts.hide_diagonal = cfg.get_bool("hide_diagonal");
    for (const auto& entry : fs::directory_iterator(dir.empty() ? "." : dir)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("M_", 0) == 0 && entry.path().extension() == ".csv") {
        hopts.title = name;
        std::ofstream out(entry.path().parent_path() / (entry.path().stem().string() + ".svg"));
        out << heatmap_svg(load_matrix_csv(entry.path().string()), hopts);
      }
    }
  });
}

}  // namespace grokbench
