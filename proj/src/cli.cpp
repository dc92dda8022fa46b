#include "kacdp/cli.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "kacdp/baseline.hpp"
#include "kacdp/checkpoint.hpp"
#include "kacdp/data.hpp"
#include "kacdp/error.hpp"
#include "kacdp/explain.hpp"
#include "kacdp/metrics.hpp"

namespace kacdp::cli {

namespace fs = std::filesystem;

namespace {

struct SplitData {
  std::size_t records = 0;
  Dataset train;
  Dataset test;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path.string());
  out << text;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io_error, "cannot create " + dir.string() + ": " + ec.message());
}

SplitData load_split(const RunConfig& cfg) {
  if (cfg.data_path.empty()) throw Error(ErrorKind::invalid_config, "--data is required");
  if (!fs::exists(cfg.data_path)) throw Error(ErrorKind::io_error, "data file not found: " + cfg.data_path.string());
  const std::vector<RawRecord> records = load_gmsc_csv(cfg.data_path);
  const Dataset all = preprocess(records);
  auto [train, test] = split(all, cfg.test_fraction, cfg.train.seed);
  return {records.size(), std::move(train), std::move(test)};
}

std::string join_widths(const std::vector<int>& widths) {
  std::string s;
  for (std::size_t i = 0; i < widths.size(); ++i) s += (i ? "," : "") + std::to_string(widths[i]);
  return s;
}

std::string data_summary(const SplitData& d) {
  return fmt::format("records={}\ntrain_rows={}\ntest_rows={}\ntrain_positives={}\ntest_positives={}\n"
                     "train_fingerprint={}\ntest_fingerprint={}\n",
                     d.records, d.train.size(), d.test.size(),
                     std::count(d.train.labels.begin(), d.train.labels.end(), std::uint8_t{1}),
                     std::count(d.test.labels.begin(), d.test.labels.end(), std::uint8_t{1}),
                     dataset_fingerprint(d.train), dataset_fingerprint(d.test));
}

constexpr const char* kF1Note =
    "f1_convention=positive class 0 (majority) at threshold 0.5; class-1 metrics reported alongside\n";

KanNetwork load_checked_model(const RunConfig& cfg) {
  const fs::path path = cfg.resolved_model_path();
  if (!fs::exists(path)) throw Error(ErrorKind::io_error, "checkpoint not found: " + path.string());
  KanNetwork net = load_network(path);
  if (cfg.width_given && net.widths != cfg.train.widths) {
    throw Error(ErrorKind::checkpoint_mismatch, fmt::format("checkpoint widths {} differ from --width {}",
                                                            join_widths(net.widths), join_widths(cfg.train.widths)));
  }
  if (cfg.grid_given && net.grid_count != cfg.train.grid_count) {
    throw Error(ErrorKind::checkpoint_mismatch, fmt::format("checkpoint grid {} differs from --grid {}",
                                                            net.grid_count, cfg.train.grid_count));
  }
  if (cfg.degree_given && net.degree != cfg.train.degree) {
    throw Error(ErrorKind::checkpoint_mismatch,
                fmt::format("checkpoint k {} differs from --k {}", net.degree, cfg.train.degree));
  }
  return net;
}

struct CellResult {
  MetricReport test;
  double seconds = 0.0;
  double final_loss = 0.0;
};

CellResult run_cell(const SplitData& data, const TrainConfig& tc, const fs::path& dir, const RunConfig& base) {
  ensure_dir(dir);
  RunConfig cell = base;
  cell.command = "sweep-cell";
  cell.train = tc;
  cell.out_dir = dir;
  cell.model_path = dir / "model.json";
  write_text(dir / "manifest.txt", manifest_text(cell));
  const TrainResult result = train(data.train, tc);
  save_network(result.net, cell.model_path);
  write_loss_csv(result.report, (dir / "loss.csv").string());
  const std::vector<double> scores = [&] {
    std::vector<double> s = omp::batch_logits(result.net, data.test.features);
    for (double& v : s) v = sigmoid(v);
    return s;
  }();
  CellResult out;
  out.test = evaluate_scores(scores, data.test.labels);
  out.seconds = result.report.seconds;
  out.final_loss = result.report.loss_history.back();
  write_text(dir / "metrics.txt", format_metric_report(out.test, "test.") +
                                      fmt::format("train.final_loss={}\n", out.final_loss));
  write_text(dir / "timing.txt", fmt::format("seconds={}\n", out.seconds));
  return out;
}

std::vector<double> probabilities(const KanNetwork& net, const Matrix& x) {
  std::vector<double> s = omp::batch_logits(net, x);
  for (double& v : s) v = sigmoid(v);
  return s;
}

}  // namespace

fs::path RunConfig::resolved_model_path() const {
  return model_path.empty() ? out_dir / "model.json" : model_path;
}

std::vector<int> parse_widths(const std::string& text) {
  // accepts "10,4,1" and the bracketed "[10, 4, 1]"
  std::string bare;
  for (char c : text) {
    if (c != '[' && c != ']' && c != ' ') bare += c;
  }
  std::vector<int> widths;
  std::stringstream ss(bare);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int w = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      widths.push_back(w);
    } catch (const std::exception&) {
      throw Error(ErrorKind::invalid_widths, "cannot parse width list '" + text + "'");
    }
  }
  if (widths.size() < 2 || widths.back() != 1) {
    throw Error(ErrorKind::invalid_widths, "width list must have >= 2 entries and end in 1: '" + text + "'");
  }
  for (int w : widths) {
    if (w < 1) throw Error(ErrorKind::invalid_widths, "widths must be positive: '" + text + "'");
  }
  return widths;
}

std::string manifest_text(const RunConfig& cfg) {
  const TrainConfig& t = cfg.train;
  std::string s;
  s += fmt::format("command={}\n", cfg.command);
  s += fmt::format("data={}\n", cfg.data_path.string());
  s += fmt::format("model={}\n", cfg.resolved_model_path().string());
  s += fmt::format("out={}\n", cfg.out_dir.string());
  s += fmt::format("width={}\ngrid={}\nk={}\nlr={}\nsteps={}\nbatch_size={}\nseed={}\n", join_widths(t.widths),
                   t.grid_count, t.degree, t.learning_rate, t.steps, t.batch_size, t.seed);
  s += fmt::format("adam_beta1={}\nadam_beta2={}\nadam_epsilon={}\n", t.adam_beta1, t.adam_beta2, t.adam_epsilon);
  s += fmt::format("test_fraction={}\nsplit=stratified\n", cfg.test_fraction);
  s += "preprocess=median income, dependents 0, winsorize p1/p99, minmax [-1,1]\n";
  s += fmt::format("baseline={}\nbaseline_lr={}\nbaseline_steps={}\n", cfg.with_baseline, cfg.baseline_lr,
                   cfg.baseline_steps);
  if (cfg.sample) s += fmt::format("sample={}\n", *cfg.sample);
  s += fmt::format("points={}\n", cfg.points);
  if (cfg.command == "sweep") {
    std::string grids;
    for (std::size_t i = 0; i < cfg.sweep_grids.size(); ++i) grids += fmt::format("{}{}", i ? "," : "", cfg.sweep_grids[i]);
    std::string lrs;
    for (std::size_t i = 0; i < cfg.sweep_lrs.size(); ++i) lrs += fmt::format("{}{}", i ? "," : "", cfg.sweep_lrs[i]);
    s += fmt::format("sweep={}\nsweep_grids={}\nsweep_lrs={}\ngrid_sweep_steps={}\nlr_sweep_steps={}\n"
                     "lr_sweep_grid={}\n",
                     cfg.sweep, grids, lrs, cfg.grid_sweep_steps, cfg.lr_sweep_steps, cfg.lr_sweep_grid);
  }
  return s;
}

int cmd_train(const RunConfig& cfg, std::ostream& out) {
  cfg.train.validate();
  const SplitData data = load_split(cfg);
  ensure_dir(cfg.out_dir);
  write_text(cfg.out_dir / "manifest.txt", manifest_text(cfg) + data_summary(data));

  const TrainResult result = train(data.train, cfg.train);
  for (const auto& w : result.report.warnings) std::cerr << "warning: " << w << '\n';
  const fs::path model_path = cfg.resolved_model_path();
  save_network(result.net, model_path);
  write_loss_csv(result.report, (cfg.out_dir / "loss.csv").string());

  const MetricReport train_metrics = evaluate_scores(probabilities(result.net, data.train.features), data.train.labels);
  const std::vector<double> test_scores = probabilities(result.net, data.test.features);
  const MetricReport test_metrics = evaluate_scores(test_scores, data.test.labels);
  write_roc_csv(roc_curve(test_scores, data.test.labels), (cfg.out_dir / "roc_test.csv").string());

  std::string metrics = format_metric_report(train_metrics, "train.") + format_metric_report(test_metrics, "test.");
  metrics += fmt::format("train.final_loss={}\n", result.report.loss_history.back());
  metrics += kF1Note;
  if (cfg.with_baseline) {
    const LogisticModel lm = train_logistic(data.train, cfg.baseline_lr, cfg.baseline_steps, cfg.train.seed);
    save_logistic(lm, cfg.out_dir / "baseline.json");
    metrics += format_metric_report(evaluate_scores(logistic_predict_batch(lm, data.test.features), data.test.labels),
                                    "baseline.test.");
  }
  write_text(cfg.out_dir / "metrics.txt", metrics);
  write_text(cfg.out_dir / "metrics.csv",
             fmt::format("split,roc_auc,f1,f1_class1\ntrain,{},{},{}\ntest,{},{},{}\n", train_metrics.roc_auc,
                         train_metrics.majority_prf.f1, train_metrics.minority_prf.f1, test_metrics.roc_auc,
                         test_metrics.majority_prf.f1, test_metrics.minority_prf.f1));
  write_text(cfg.out_dir / "timing.txt", fmt::format("train_seconds={}\n", result.report.seconds));

  out << fmt::format("model={}\nsteps={}\nfinal_loss={}\n", model_path.string(), cfg.train.steps,
                     result.report.loss_history.back());
  out << format_metric_report(test_metrics, "test.");
  return 0;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out) {
  const KanNetwork net = load_checked_model(cfg);
  const SplitData data = load_split(cfg);
  ensure_dir(cfg.out_dir);
  write_text(cfg.out_dir / "eval_manifest.txt", manifest_text(cfg) + data_summary(data));

  const std::vector<double> test_scores = probabilities(net, data.test.features);
  const MetricReport test_metrics = evaluate_scores(test_scores, data.test.labels);
  const MetricReport train_metrics = evaluate_scores(probabilities(net, data.train.features), data.train.labels);
  write_roc_csv(roc_curve(test_scores, data.test.labels), (cfg.out_dir / "roc_curve.csv").string());
  const std::string report = format_metric_report(test_metrics, "test.") +
                             format_metric_report(train_metrics, "train.") +
                             fmt::format("model_fingerprint={}\n", model_fingerprint(net)) + kF1Note;
  write_text(cfg.out_dir / "eval_metrics.txt", report);
  out << report;
  return 0;
}

int cmd_explain(const RunConfig& cfg, std::ostream& out) {
  const KanNetwork net = load_checked_model(cfg);
  const SplitData data = load_split(cfg);
  if (cfg.sample && *cfg.sample >= data.test.size()) {
    throw Error(ErrorKind::index_out_of_range,
                fmt::format("sample {} outside test split of {} rows", *cfg.sample, data.test.size()));
  }
  ensure_dir(cfg.out_dir);
  write_text(cfg.out_dir / "explain_manifest.txt", manifest_text(cfg) + data_summary(data));

  const EdgeScoreMatrix scores = edge_scores(net, data.train.features);
  AttributionReport report = attribution_from_scores(net, scores);
  report.dataset_fingerprint = dataset_fingerprint(data.train);
  write_text(cfg.out_dir / "attribution.csv", attribution_csv(report));
  write_text(cfg.out_dir / "structure.dot", export_dot(net, scores));
  write_text(cfg.out_dir / "curves.csv", curves_csv(sample_activation_curves(net, cfg.points)));

  out << fmt::format("model_fingerprint={}\ndataset_fingerprint={}\n", report.model_fingerprint,
                     report.dataset_fingerprint);
  for (std::size_t r = 0; r < report.ranking.size(); ++r) {
    const std::size_t p = report.ranking[r];
    out << fmt::format("rank{}={} score={} normalized={}\n", r + 1, report.feature_names[p], report.scores[p],
                       report.normalized_scores[p]);
  }
  if (cfg.sample) {
    const DecisionPath path = decision_path(net, data.test.features.row(*cfg.sample));
    write_text(cfg.out_dir / "decision_path.txt", decision_path_text(net, path));
    write_text(cfg.out_dir / "decision_path.csv", decision_path_csv(path));
    out << fmt::format("sample={}\nlabel={}\nlogit={}\nprobability={}\n", *cfg.sample,
                       static_cast<int>(data.test.labels[*cfg.sample]), path.logit, path.probability);
  }
  return 0;
}

int cmd_export_dot(const RunConfig& cfg, std::ostream& out) {
  const KanNetwork net = load_checked_model(cfg);
  const SplitData data = load_split(cfg);
  const std::string dot = export_dot(net, edge_scores(net, data.train.features));
  ensure_dir(cfg.out_dir);
  write_text(cfg.out_dir / "structure.dot", dot);
  out << dot;
  return 0;
}

int cmd_curves(const RunConfig& cfg, std::ostream& out) {
  const KanNetwork net = load_checked_model(cfg);
  const std::string csv = curves_csv(sample_activation_curves(net, cfg.points));
  ensure_dir(cfg.out_dir);
  write_text(cfg.out_dir / "curves.csv", csv);
  out << fmt::format("rows={}\nfile={}\n", std::count(csv.begin(), csv.end(), '\n') - 1,
                     (cfg.out_dir / "curves.csv").string());
  return 0;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  if (cfg.sweep != "grid" && cfg.sweep != "lr" && cfg.sweep != "both") {
    throw Error(ErrorKind::invalid_config, "--sweep must be grid, lr or both");
  }
  if (cfg.parallel < 1) throw Error(ErrorKind::invalid_config, "--parallel must be >= 1");
  const SplitData data = load_split(cfg);
  ensure_dir(cfg.out_dir);
  write_text(cfg.out_dir / "manifest.txt", manifest_text(cfg) + data_summary(data));

  struct Cell {
    std::string kind;
    std::string key;
    TrainConfig tc;
    CellResult result;
  };
  std::vector<Cell> cells;
  if (cfg.sweep != "lr") {
    for (int g : cfg.sweep_grids) {
      TrainConfig tc = cfg.train;
      if (!cfg.width_given) tc.widths = {10, 1};
      tc.grid_count = g;
      if (!cfg.degree_given) tc.degree = 4;
      tc.learning_rate = 0.1;
      tc.steps = cfg.grid_sweep_steps;
      tc.batch_size = -1;
      cells.push_back({"grid", std::to_string(g), tc, {}});
    }
  }
  if (cfg.sweep != "grid") {
    for (double lr : cfg.sweep_lrs) {
      TrainConfig tc = cfg.train;
      if (!cfg.width_given) tc.widths = {10, 1};
      tc.grid_count = cfg.lr_sweep_grid;
      if (!cfg.degree_given) tc.degree = 4;
      tc.learning_rate = lr;
      tc.steps = cfg.lr_sweep_steps;
      tc.batch_size = -1;
      cells.push_back({"lr", fmt::format("{}", lr), tc, {}});
    }
  }
  for (const auto& c : cells) c.tc.validate();

  // Each cell is self-contained and writes only to its own directory.
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(cells.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        cells[i].result = run_cell(data, cells[i].tc, cfg.out_dir / (cells[i].kind + "_" + cells[i].key), cfg);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.parallel), cells.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  std::string grid_csv = "grid,roc_auc,f1,seconds\n";
  std::string lr_csv = "lr,roc_auc,f1,seconds\n";
  for (const auto& c : cells) {
    std::string& target = c.kind == "grid" ? grid_csv : lr_csv;
    target += fmt::format("{},{},{},{:.3f}\n", c.key, c.result.test.roc_auc, c.result.test.majority_prf.f1,
                          c.result.seconds);
    out << fmt::format("{}={} roc_auc={} f1={} final_loss={} seconds={:.3f}\n", c.kind, c.key,
                       c.result.test.roc_auc, c.result.test.majority_prf.f1, c.result.final_loss, c.result.seconds);
  }
  if (cfg.sweep != "lr") write_text(cfg.out_dir / "grid_sweep.csv", grid_csv);
  if (cfg.sweep != "grid") write_text(cfg.out_dir / "lr_sweep.csv", lr_csv);
  write_text(cfg.out_dir / "sweep_reference.txt",
             "# published reference values for the same sweeps, for context only\n"
             "reference.grid.3.roc_auc=0.8498\nreference.grid.10.roc_auc=0.8584\n"
             "reference.grid.50.roc_auc=0.8613\nreference.grid.80.roc_auc=0.8640\n"
             "reference.grid.3.f1=0.9673\nreference.grid.10.f1=0.9675\n"
             "reference.grid.50.f1=0.9675\nreference.grid.80.f1=0.9675\n"
             "reference.lr.0.1.roc_auc=0.8632\nreference.lr.0.01.roc_auc=0.8553\nreference.lr.0.001.roc_auc=0.3788\n"
             "reference.lr.0.1.f1=0.9674\nreference.lr.0.01.f1=0.9672\nreference.lr.0.001.f1=0.3788\n"
             "reference.optimizer.adam.seconds=9.98\nreference.optimizer.adam.roc_auc=0.8584\n"
             "reference.optimizer.adam.f1=0.9675\n"
             "reference.optimizer.lbfgs.seconds=143.15\nreference.optimizer.lbfgs.roc_auc=0.8637\n"
             "reference.optimizer.lbfgs.f1=0.9673\n"
             "note.lbfgs=not run by this tool; Adam only\n");
  return 0;
}

namespace {

// Appends `--key value` for every entry of a flat key=value file whose flag
// was not given on the command line, so explicit flags win.
std::vector<std::string> merge_config_file(std::vector<std::string> args) {
  auto it = std::find(args.begin(), args.end(), "--config");
  if (it == args.end() || std::next(it) == args.end()) return args;
  const std::string path = *std::next(it);
  args.erase(it, it + 2);
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open config " + path);
  static const std::set<std::string> kFlags{"baseline"};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::invalid_config, fmt::format("{}:{}: expected key=value", path, line_no));
    }
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    const std::string flag = "--" + key;
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (given) continue;
    if (kFlags.count(key) != 0) {
      if (value == "true" || value == "1") args.push_back(flag);
      continue;
    }
    args.push_back(flag);
    args.push_back(value);
  }
  return args;
}

void add_model_options(CLI::App* sub, RunConfig& cfg, std::string& width_text) {
  sub->add_option("--data", cfg.data_path, "GMSC CSV file");
  sub->add_option("--model", cfg.model_path, "checkpoint path (default <out>/model.json)");
  sub->add_option("--out", cfg.out_dir, "output directory");
  sub->add_option("--width", width_text, "layer widths, e.g. 10,4,1");
  sub->add_option("--grid", cfg.train.grid_count, "spline grid intervals");
  sub->add_option("--k", cfg.train.degree, "spline degree");
  sub->add_option("--lr", cfg.train.learning_rate, "Adam learning rate");
  sub->add_option("--steps", cfg.train.steps, "optimizer steps");
  sub->add_option("--batch-size", cfg.train.batch_size, "-1 for full batch");
  sub->add_option("--seed", cfg.train.seed, "seed for initialization, split and batching");
  sub->add_option("--test-fraction", cfg.test_fraction, "held-out fraction for the stratified split");
  sub->add_option("--points", cfg.points, "samples per edge for activation curves");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::string width_text = "10,4,1";
  std::string grids_text;
  std::string lrs_text;
  std::size_t sample = 0;

  CLI::App app{"Kolmogorov-Arnold network credit default prediction", "kacdp"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");
  std::string config_path;  // consumed by merge_config_file before parsing
  app.add_option("--config", config_path, "flat key=value file; explicit flags override its entries");

  std::map<std::string, CLI::App*> subs;
  for (const char* name : {"train", "eval", "explain", "sweep", "export-dot", "curves"}) {
    subs[name] = app.add_subcommand(name);
    add_model_options(subs[name], cfg, width_text);
  }
  subs["train"]->description("train a network and report metrics on both splits");
  subs["train"]->add_flag("--baseline", cfg.with_baseline, "also fit the logistic regression baseline");
  subs["train"]->add_option("--baseline-lr", cfg.baseline_lr, "baseline Adam learning rate");
  subs["train"]->add_option("--baseline-steps", cfg.baseline_steps, "baseline optimizer steps");
  subs["eval"]->description("evaluate a checkpoint on the held-out split");
  subs["explain"]->description("feature attribution, structure graph, curves and decision paths");
  subs["explain"]->add_option("--sample", sample, "test-split row for a decision path");
  subs["export-dot"]->description("write the structure graph");
  subs["curves"]->description("sample every learned activation");
  subs["sweep"]->description("grid and learning-rate sensitivity sweeps");
  subs["sweep"]->add_option("--sweep", cfg.sweep, "grid, lr or both");
  subs["sweep"]->add_option("--grids", grids_text, "comma-separated grid values");
  subs["sweep"]->add_option("--lrs", lrs_text, "comma-separated learning rates");
  subs["sweep"]->add_option("--grid-sweep-steps", cfg.grid_sweep_steps, "steps per grid cell");
  subs["sweep"]->add_option("--lr-sweep-steps", cfg.lr_sweep_steps, "steps per learning-rate cell");
  subs["sweep"]->add_option("--lr-sweep-grid", cfg.lr_sweep_grid, "grid used by the learning-rate cells");
  subs["sweep"]->add_option("--parallel", cfg.parallel, "sweep cells run concurrently");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = merge_config_file(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);

    for (const auto& [name, sub] : subs) {
      if (!sub->parsed()) continue;
      cfg.command = name;
      cfg.width_given = sub->count("--width") > 0;
      cfg.grid_given = sub->count("--grid") > 0;
      cfg.degree_given = sub->count("--k") > 0;
      const CLI::Option* opt = sub->get_option_no_throw("--sample");
      if (opt != nullptr && opt->count() > 0) cfg.sample = sample;
    }
    cfg.train.widths = parse_widths(width_text);
    if (!grids_text.empty()) {
      cfg.sweep_grids.clear();
      std::stringstream ss(grids_text);
      for (std::string item; std::getline(ss, item, ',');) cfg.sweep_grids.push_back(std::stoi(item));
    }
    if (!lrs_text.empty()) {
      cfg.sweep_lrs.clear();
      std::stringstream ss(lrs_text);
      for (std::string item; std::getline(ss, item, ',');) cfg.sweep_lrs.push_back(std::stod(item));
    }
    if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0)) {
      throw Error(ErrorKind::invalid_fraction, "--test-fraction must lie strictly between 0 and 1");
    }

    if (cfg.command == "train") return cmd_train(cfg, out);
    if (cfg.command == "eval") return cmd_eval(cfg, out);
    if (cfg.command == "explain") return cmd_explain(cfg, out);
    if (cfg.command == "sweep") return cmd_sweep(cfg, out);
    if (cfg.command == "export-dot") return cmd_export_dot(cfg, out);
    return cmd_curves(cfg, out);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::numerical_failure ? 1 : 2;
  } catch (const std::invalid_argument& e) {
    err << "error: usage: cannot parse number: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace kacdp::cli
