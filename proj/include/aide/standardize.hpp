#pragma once
// Task standardization: pretrain a baseline on whatever labeled data
// exists, pseudo-label the unlabeled remainder as low-quality annotations,
// and merge into one noisily-labeled training set.

#include <memory>

#include "aide/config.hpp"
#include "aide/types.hpp"
#include "aide/unet.hpp"

namespace aide::standardize {

// Fully-supervised pretraining (segmentation loss only) for
// cfg.pretrain_epochs on the labeled subset.
std::unique_ptr<net::UNet> pretrain_baseline(const Dataset& labeled,
                                             const TrainConfig& cfg);

// Argmax predictions become LQ labels; returns one record per sample.
std::vector<LabelRecord> generate_lq_labels(net::UNet& model,
                                            const Dataset& unlabeled);

// Merge: HQ subset keeps its annotations, LQ records attach to the
// unlabeled samples. Throws on id collisions.
Dataset build_nll_dataset(const Dataset& hq_subset, const Dataset& unlabeled,
                          const std::vector<LabelRecord>& lq_records);

}  // namespace aide::standardize
