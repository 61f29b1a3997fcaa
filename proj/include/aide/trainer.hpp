#pragma once
// Cross-model self-correcting training loop: two networks trained in
// parallel with per-batch small-loss filtering (each model's trusted
// subset is chosen by itself and consumed by the other), consistency
// regularization against augmentation-distilled pseudo-labels on the
// suspected subset, a quadratic warm-up schedule for the consistency
// weight, and periodic global label correction that rewrites the
// lowest-ranked labels with the counterpart model's predictions.

#include <memory>
#include <span>
#include <vector>

#include "aide/config.hpp"
#include "aide/optim.hpp"
#include "aide/rng.hpp"
#include "aide/types.hpp"
#include "aide/unet.hpp"

namespace aide::trainer {

// min(lambda_max * (q/q_w)^2, lambda_max)
double lambda_schedule(int q, int q_w, double lambda_max);

// Indices of the floor(fraction*n) (minimum 1) smallest losses; ties keep
// the lower index.
std::vector<std::size_t> select_small_loss(
    std::span<const double> per_sample_losses, double fraction);

// True during warm-up (q < q_w) and every `period` epochs thereafter.
bool update_criterion(int q, int q_w, int period);

struct CorrectionOutcome {
  int corrected_into_n1 = 0;  // labels of N1's map rewritten (by N2)
  int corrected_into_n2 = 0;
};

// Ranks every sample by DSC between a model's prediction and that model's
// own current label; the lowest floor(R*|D|) (minimum 1) per model are
// selected, and for each selected sample that is not HQ the *other*
// model's label is replaced with the selecting model's binarized
// prediction. Both selections are computed before either map is written.
CorrectionOutcome global_label_correction(
    const std::vector<BinaryMask>& preds_n1,
    const std::vector<BinaryMask>& preds_n2,
    std::vector<LabelRecord>& labels_n1, std::vector<LabelRecord>& labels_n2,
    double ratio, int epoch);

struct IterationStats {
  double loss_n1 = 0.0;
  double loss_n2 = 0.0;
  double consistency_term_n1 = 0.0;  // lambda-weighted contribution
  double consistency_term_n2 = 0.0;
  std::vector<std::size_t> selected_by_n1;  // batch-local indices
  std::vector<std::size_t> selected_by_n2;
};

// One optimization step on one batch. Both gradients are computed against
// pre-update parameters; both updates are then applied.
IterationStats iteration_step(
    net::UNet& n1, net::UNet& n2, net::Optimizer& opt1, net::Optimizer& opt2,
    const Dataset& data, const std::vector<LabelRecord>& labels_n1,
    const std::vector<LabelRecord>& labels_n2,
    std::span<const std::size_t> batch, const TrainConfig& cfg,
    double lambda_q, RngStream& aug_rng1, RngStream& aug_rng2);

struct TrainResult {
  std::unique_ptr<net::UNet> best_n1;
  std::unique_ptr<net::UNet> best_n2;
  int best_epoch = -1;
  double best_dsc_train = -1.0;
  MetricsReport report;
  std::vector<LabelRecord> labels_n1;
  std::vector<LabelRecord> labels_n2;
};

TrainResult train(const TrainConfig& cfg, const Dataset& train_set,
                  const Dataset* test_set);

// As train(), with explicit model seeds (the default derives them from
// cfg.seed). Swapping the seeds swaps the two models' roles exactly.
TrainResult train_with_seeds(const TrainConfig& cfg, const Dataset& train_set,
                             const Dataset* test_set, std::uint64_t seed_n1,
                             std::uint64_t seed_n2);

struct SupervisedOptions {
  // pseudo-label comparator: replace every LQ label with the current
  // argmax prediction after each epoch
  bool refresh_lq_labels = false;
  int epochs_override = -1;
  std::string model_id = "N1";
};

struct SupervisedResult {
  std::unique_ptr<net::UNet> model;
  MetricsReport report;
  std::vector<LabelRecord> labels;
};

// Plain fully-supervised training on whatever labels exist.
SupervisedResult train_supervised(const TrainConfig& cfg,
                                  const Dataset& train_set,
                                  const Dataset* test_set,
                                  const SupervisedOptions& opts);

// Per-sample (DSC(prediction, label), DSC(label, truth)) pairs; requires
// ground truth on every sample.
std::vector<std::pair<double, double>> memorization_probe(
    net::UNet& model, const Dataset& data);

// Batched evaluation-mode prediction over a dataset.
std::vector<ProbMap> predict_probs(net::UNet& model, const Dataset& data,
                                   int batch_size);
std::vector<BinaryMask> predict_masks(net::UNet& model, const Dataset& data,
                                      int batch_size);

std::unique_ptr<net::UNet> clone_model(net::UNet& model);

std::vector<LabelRecord> initial_label_records(const Dataset& data);

}  // namespace aide::trainer
