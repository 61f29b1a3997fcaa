#include "aide/standardize.hpp"

#include <set>
#include <stdexcept>

#include "aide/trainer.hpp"

namespace aide::standardize {

std::unique_ptr<net::UNet> pretrain_baseline(const Dataset& labeled,
                                             const TrainConfig& cfg) {
  if (labeled.samples.empty())
    throw std::invalid_argument("pretrain_baseline: empty labeled subset");
  trainer::SupervisedOptions opts;
  opts.epochs_override = cfg.pretrain_epochs;
  opts.model_id = "pretrain";
  auto result = trainer::train_supervised(cfg, labeled, nullptr, opts);
  return std::move(result.model);
}

std::vector<LabelRecord> generate_lq_labels(net::UNet& model,
                                            const Dataset& unlabeled) {
  std::vector<LabelRecord> records;
  if (unlabeled.samples.empty()) return records;
  const auto masks = trainer::predict_masks(model, unlabeled, 8);
  records.reserve(unlabeled.samples.size());
  for (std::size_t i = 0; i < unlabeled.samples.size(); ++i) {
    LabelRecord r;
    r.sample_id = unlabeled.samples[i].id;
    r.mask = masks[i];
    r.quality = Quality::LQ;
    r.source = LabelSource::pretrain_pseudolabel;
    records.push_back(std::move(r));
  }
  return records;
}

Dataset build_nll_dataset(const Dataset& hq_subset, const Dataset& unlabeled,
                          const std::vector<LabelRecord>& lq_records) {
  if (lq_records.size() != unlabeled.samples.size())
    throw std::invalid_argument("build_nll_dataset: record count mismatch");
  std::set<std::string> ids;
  Dataset out;
  out.split = Split::train;
  for (const auto& s : hq_subset.samples) {
    if (!s.label)
      throw std::invalid_argument("HQ sample missing label: " + s.id);
    if (!ids.insert(s.id).second)
      throw std::invalid_argument("duplicate sample id: " + s.id);
    Sample copy = s;
    copy.quality = Quality::HQ;
    out.samples.push_back(std::move(copy));
  }
  for (std::size_t i = 0; i < unlabeled.samples.size(); ++i) {
    const Sample& s = unlabeled.samples[i];
    if (lq_records[i].sample_id != s.id)
      throw std::invalid_argument("build_nll_dataset: record order mismatch");
    if (!ids.insert(s.id).second)
      throw std::invalid_argument("duplicate sample id: " + s.id);
    Sample copy = s;
    copy.label = lq_records[i].mask;
    copy.quality = Quality::LQ;
    out.samples.push_back(std::move(copy));
  }
  return out;
}

}  // namespace aide::standardize
