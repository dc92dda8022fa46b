#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kacdp/training.hpp"

namespace kacdp::cli {

struct RunConfig {
  std::string command;
  std::filesystem::path data_path;
  std::filesystem::path model_path;  // defaults to <out>/model.json
  std::filesystem::path out_dir = "kacdp-run";
  TrainConfig train;
  bool width_given = false;
  bool grid_given = false;
  bool degree_given = false;
  double test_fraction = 0.2;
  std::optional<std::size_t> sample;
  int points = 101;
  bool with_baseline = false;
  double baseline_lr = 0.1;
  int baseline_steps = 500;
  // sweep
  std::string sweep = "both";  // grid | lr | both
  std::vector<int> sweep_grids{3, 10, 50, 80};
  std::vector<double> sweep_lrs{0.1, 0.01, 0.001};
  int grid_sweep_steps = 100;
  int lr_sweep_steps = 200;
  int lr_sweep_grid = 10;
  int parallel = 1;

  std::filesystem::path resolved_model_path() const;
};

std::vector<int> parse_widths(const std::string& text);

/// Full resolved configuration as key=value lines.
std::string manifest_text(const RunConfig& cfg);

int cmd_train(const RunConfig& cfg, std::ostream& out);
int cmd_eval(const RunConfig& cfg, std::ostream& out);
int cmd_explain(const RunConfig& cfg, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, std::ostream& out);
int cmd_export_dot(const RunConfig& cfg, std::ostream& out);
int cmd_curves(const RunConfig& cfg, std::ostream& out);

/// Parses arguments and dispatches. Exit codes: 0 success, 1 internal error,
/// 2 usage or data error. Failures print one `error: <kind>: <detail>` line.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kacdp::cli
