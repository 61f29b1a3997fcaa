#pragma once
// Experiment orchestration: runs method arms across seeds on a prepared
// dataset directory, evaluates on the test split with and without
// largest-component post-processing, and emits per-run metrics, a summary
// table, and paired significance tests.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aide/config.hpp"
#include "aide/types.hpp"

namespace aide::exp {

enum class Method { aide, fully_supervised, pseudo_label_static };

Method parse_method(const std::string& s);
const char* to_string(Method m);

struct Arm {
  std::string name;
  Method method = Method::aide;
  TrainConfig config;
};

struct ExperimentSpec {
  std::filesystem::path dataset_dir;  // holds train/ and test/
  std::vector<Arm> arms;
  std::vector<std::uint64_t> seeds;
  std::vector<std::pair<std::string, std::string>> t_test_pairs;
  bool ensemble = false;
};

ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

struct EvalSummary {
  double dsc = 0.0;
  std::optional<double> ravd, assd, mssd;
  std::vector<double> per_sample_dsc;
};

// Evaluates probability predictions against test labels; postprocess
// applies largest_connected_component to the binarized predictions.
EvalSummary evaluate_predictions(const std::vector<ProbMap>& probs,
                                 const Dataset& test, bool postprocess);

struct SeedRunResult {
  std::string arm;
  std::uint64_t seed = 0;
  EvalSummary np, pp;  // better of N1/N2 for the aide method
  std::optional<EvalSummary> ensemble_np, ensemble_pp;
  std::optional<double> initial_lq_label_dsc;  // vs truth, aide arms
  std::optional<double> final_lq_label_dsc;
  bool hq_labels_intact = true;
  std::filesystem::path run_dir;
};

struct ExperimentResult {
  std::vector<SeedRunResult> runs;
  // (arm_a, arm_b) -> two-sided p over seed-averaged per-sample DSC (pp)
  std::map<std::pair<std::string, std::string>, double> p_values;
};

ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const std::filesystem::path& out_dir);

// Self-contained SVG line chart of DSC vs epoch, one polyline per
// (model_id, split) series found in the metrics CSV.
void emit_plot(const std::filesystem::path& metrics_csv,
               const std::filesystem::path& out_svg);

// Fixed plot geometry, exposed for coordinate tests.
struct PlotGeometry {
  int width = 640, height = 420;
  int margin_left = 50, margin_right = 15, margin_top = 15,
      margin_bottom = 35;
  double x(double epoch, double e_min, double e_max) const;
  double y(double dsc) const;  // dsc domain fixed to [0,1]
};

void write_metrics_csv(const std::filesystem::path& path,
                       const MetricsReport& report);
MetricsReport read_metrics_csv(const std::filesystem::path& path);

}  // namespace aide::exp
