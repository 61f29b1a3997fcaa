#include "aide/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "aide/augment.hpp"
#include "aide/losses.hpp"
#include "aide/metrics.hpp"

namespace aide::trainer {

namespace {

using net::Mode;
using net::Tensor;
using net::UNet;

std::span<const double> fg_span(const Tensor& probs, std::size_t b) {
  const std::size_t hw = std::size_t(probs.dim(2)) * probs.dim(3);
  return {probs.ptr() + (b * 2 + 1) * hw, hw};
}

std::span<double> fg_grad_span(Tensor& dprobs, std::size_t b) {
  const std::size_t hw = std::size_t(dprobs.dim(2)) * dprobs.dim(3);
  return {dprobs.ptr() + (b * 2 + 1) * hw, hw};
}

std::span<const std::uint8_t> mask_span(const BinaryMask& m) {
  return {m.values.data(), m.values.size()};
}

// Batched distillation over a subset of samples; draws the per-sample
// transform sequence sample-major from rng, which matches calling
// augment::distill_pseudo_label once per sample with the same stream.
std::vector<ProbMap> distill_subset(UNet& model, const Dataset& data,
                                    const std::vector<std::size_t>& subset,
                                    int k, double temperature,
                                    SharpenForm form, RngStream& rng) {
  using augment::TransformDescriptor;
  const std::size_t n = subset.size();
  std::vector<std::vector<TransformDescriptor>> transforms(n);
  for (std::size_t i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j)
      transforms[i].push_back(augment::sample_transform(rng));

  std::vector<ProbMap> means(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Image& img = data.samples[subset[i]].image;
    means[i] = ProbMap(img.height, img.width);
    std::fill(means[i].data.begin(), means[i].data.end(), 0.0);
  }

  std::vector<Image> holders(n);
  for (int j = 0; j < k; ++j) {
    std::vector<const Image*> batch(n);
    for (std::size_t i = 0; i < n; ++i) {
      holders[i] =
          augment::apply(transforms[i][std::size_t(j)],
                         data.samples[subset[i]].image);
      batch[i] = &holders[i];
    }
    const Tensor probs = model.forward(net::images_to_tensor(batch),
                                       Mode::eval);
    for (std::size_t i = 0; i < n; ++i) {
      const ProbMap aligned =
          augment::apply(augment::inverse(transforms[i][std::size_t(j)]),
                         net::tensor_to_probmap(probs, int(i)));
      for (std::size_t p = 0; p < means[i].data.size(); ++p)
        means[i].data[p] += aligned.data[p];
    }
  }

  std::vector<ProbMap> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double inv_k = 1.0 / double(k);
    for (auto& v : means[i].data) v *= inv_k;
    out[i] = losses::sharpen(means[i], temperature, form);
  }
  return out;
}

struct EpochEval {
  std::vector<BinaryMask> masks;
  std::vector<double> dsc_vs_label;
};

EpochEval evaluate_against_labels(UNet& model, const Dataset& data,
                                  const std::vector<LabelRecord>& labels,
                                  int batch_size) {
  EpochEval ev;
  ev.masks = predict_masks(model, data, batch_size);
  ev.dsc_vs_label.resize(ev.masks.size());
  for (std::size_t i = 0; i < ev.masks.size(); ++i)
    ev.dsc_vs_label[i] = metrics::dsc(ev.masks[i], labels[i].mask);
  return ev;
}

struct AggregatedMetrics {
  double dsc = 0.0;
  std::optional<double> ravd, assd, mssd;
};

AggregatedMetrics aggregate_metrics(const std::vector<BinaryMask>& preds,
                                    const std::vector<const BinaryMask*>& refs) {
  AggregatedMetrics agg;
  double dsc_sum = 0.0, ravd_sum = 0.0, assd_sum = 0.0, mssd_sum = 0.0;
  std::size_t ravd_n = 0, surf_n = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    dsc_sum += metrics::dsc(preds[i], *refs[i]);
    if (!refs[i]->empty_fg()) {
      ravd_sum += metrics::ravd(preds[i], *refs[i]);
      ++ravd_n;
      if (!preds[i].empty_fg()) {
        assd_sum += metrics::assd(preds[i], *refs[i]);
        mssd_sum += metrics::mssd(preds[i], *refs[i]);
        ++surf_n;
      }
    }
  }
  agg.dsc = dsc_sum / double(preds.size());
  if (ravd_n > 0) agg.ravd = ravd_sum / double(ravd_n);
  if (surf_n > 0) {
    agg.assd = assd_sum / double(surf_n);
    agg.mssd = mssd_sum / double(surf_n);
  }
  return agg;
}

std::optional<double> mean_label_dsc_vs_truth(
    const Dataset& data, const std::vector<LabelRecord>& labels) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    if (!data.samples[i].truth) continue;
    sum += metrics::dsc(labels[i].mask, *data.samples[i].truth);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / double(n);
}

MetricsRow make_train_row(int epoch, const std::string& model_id,
                          const AggregatedMetrics& agg, double lambda_q,
                          int n_corrected,
                          std::optional<double> label_dsc_vs_truth) {
  MetricsRow row;
  row.epoch = epoch;
  row.model_id = model_id;
  row.split = "train";
  row.dsc = agg.dsc;
  row.ravd = agg.ravd;
  row.assd = agg.assd;
  row.mssd = agg.mssd;
  row.lambda_q = lambda_q;
  row.n_labels_corrected = n_corrected;
  row.train_label_dsc_vs_truth = label_dsc_vs_truth;
  return row;
}

MetricsRow make_test_row(int epoch, const std::string& model_id,
                         UNet& model, const Dataset& test_set,
                         double lambda_q, int batch_size) {
  const auto masks = predict_masks(model, test_set, batch_size);
  std::vector<const BinaryMask*> refs;
  refs.reserve(test_set.samples.size());
  for (const auto& s : test_set.samples) {
    if (!s.label)
      throw std::runtime_error("test sample missing label: " + s.id);
    refs.push_back(&*s.label);
  }
  const AggregatedMetrics agg = aggregate_metrics(masks, refs);
  MetricsRow row;
  row.epoch = epoch;
  row.model_id = model_id;
  row.split = "test";
  row.dsc = agg.dsc;
  row.ravd = agg.ravd;
  row.assd = agg.assd;
  row.mssd = agg.mssd;
  row.lambda_q = lambda_q;
  return row;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, RngStream& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.uniform_int(i);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

void require_all_labeled(const Dataset& data) {
  for (const auto& s : data.samples)
    if (!s.label)
      throw std::invalid_argument(
          "training sample missing label (run task standardization): " +
          s.id);
}

}  // namespace

double lambda_schedule(int q, int q_w, double lambda_max) {
  if (q < 0 || q_w <= 0)
    throw std::invalid_argument("lambda_schedule: bad arguments");
  const double ramp = double(q) / double(q_w);
  return std::min(lambda_max * ramp * ramp, lambda_max);
}

std::vector<std::size_t> select_small_loss(
    std::span<const double> per_sample_losses, double fraction) {
  if (per_sample_losses.empty())
    throw std::invalid_argument("select_small_loss: empty loss list");
  if (fraction <= 0.0 || fraction > 1.0)
    throw std::invalid_argument("select_small_loss: bad fraction");
  const std::size_t n = per_sample_losses.size();
  std::size_t count = std::size_t(fraction * double(n));
  if (count < 1) count = 1;
  if (count > n) count = n;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return per_sample_losses[a] < per_sample_losses[b];
                   });
  order.resize(count);
  std::sort(order.begin(), order.end());
  return order;
}

bool update_criterion(int q, int q_w, int period) {
  if (period <= 0) throw std::invalid_argument("update period must be > 0");
  if (q < q_w) return true;
  return (q - q_w) % period == 0;
}

CorrectionOutcome global_label_correction(
    const std::vector<BinaryMask>& preds_n1,
    const std::vector<BinaryMask>& preds_n2,
    std::vector<LabelRecord>& labels_n1, std::vector<LabelRecord>& labels_n2,
    double ratio, int epoch) {
  const std::size_t n = labels_n1.size();
  if (preds_n1.size() != n || preds_n2.size() != n || labels_n2.size() != n)
    throw std::invalid_argument("global_label_correction: size mismatch");

  auto rank_lowest = [&](const std::vector<BinaryMask>& preds,
                         const std::vector<LabelRecord>& labels) {
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i)
      scores[i] = metrics::dsc(preds[i], labels[i].mask);
    std::size_t count = std::size_t(ratio * double(n));
    if (count < 1) count = 1;
    if (count > n) count = n;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return scores[a] < scores[b];
                     });
    order.resize(count);
    return order;
  };

  // both selections from pre-correction labels
  const auto sel_n1 = rank_lowest(preds_n1, labels_n1);
  const auto sel_n2 = rank_lowest(preds_n2, labels_n2);

  CorrectionOutcome out;
  for (const std::size_t i : sel_n1) {
    if (labels_n2[i].quality == Quality::HQ) continue;
    labels_n2[i].set_mask(preds_n1[i], LabelSource::global_correction, epoch);
    ++out.corrected_into_n2;
  }
  for (const std::size_t i : sel_n2) {
    if (labels_n1[i].quality == Quality::HQ) continue;
    labels_n1[i].set_mask(preds_n2[i], LabelSource::global_correction, epoch);
    ++out.corrected_into_n1;
  }
  return out;
}

IterationStats iteration_step(
    UNet& n1, UNet& n2, net::Optimizer& opt1, net::Optimizer& opt2,
    const Dataset& data, const std::vector<LabelRecord>& labels_n1,
    const std::vector<LabelRecord>& labels_n2,
    std::span<const std::size_t> batch, const TrainConfig& cfg,
    double lambda_q, RngStream& aug_rng1, RngStream& aug_rng2) {
  const std::size_t bsz = batch.size();
  if (bsz == 0) throw std::invalid_argument("iteration_step: empty batch");

  std::vector<const Image*> imgs(bsz);
  for (std::size_t b = 0; b < bsz; ++b)
    imgs[b] = &data.samples[batch[b]].image;
  const Tensor x = net::images_to_tensor(imgs);

  Tensor probs1 = n1.forward(x, Mode::train);
  Tensor probs2 = n2.forward(x, Mode::train);

  std::vector<double> loss1(bsz), loss2(bsz);
  for (std::size_t b = 0; b < bsz; ++b) {
    loss1[b] = losses::seg_loss(fg_span(probs1, b),
                                mask_span(labels_n1[batch[b]].mask),
                                cfg.alpha, cfg.epsilon);
    loss2[b] = losses::seg_loss(fg_span(probs2, b),
                                mask_span(labels_n2[batch[b]].mask),
                                cfg.alpha, cfg.epsilon);
  }

  IterationStats stats;
  stats.selected_by_n1 = select_small_loss(loss1, cfg.select_fraction);
  stats.selected_by_n2 = select_small_loss(loss2, cfg.select_fraction);

  // each model's trusted subset is the one selected by the counterpart
  std::vector<char> trusted1(bsz, 0), trusted2(bsz, 0);
  for (const std::size_t i : stats.selected_by_n2) trusted1[i] = 1;
  for (const std::size_t i : stats.selected_by_n1) trusted2[i] = 1;

  std::vector<std::size_t> suspected1, suspected2;  // batch-local
  for (std::size_t b = 0; b < bsz; ++b) {
    if (!trusted1[b]) suspected1.push_back(b);
    if (!trusted2[b]) suspected2.push_back(b);
  }

  // own-model pseudo-labels for the suspected subsets
  std::vector<ProbMap> pseudo1, pseudo2;
  const bool need_pseudo = lambda_q > 0.0;
  if (need_pseudo && !suspected1.empty()) {
    std::vector<std::size_t> global_idx;
    for (const std::size_t b : suspected1) global_idx.push_back(batch[b]);
    pseudo1 = distill_subset(n1, data, global_idx, cfg.augmentations,
                             cfg.sharpen_temperature, cfg.sharpen_form,
                             aug_rng1);
  }
  if (need_pseudo && !suspected2.empty()) {
    std::vector<std::size_t> global_idx;
    for (const std::size_t b : suspected2) global_idx.push_back(batch[b]);
    pseudo2 = distill_subset(n2, data, global_idx, cfg.augmentations,
                             cfg.sharpen_temperature, cfg.sharpen_form,
                             aug_rng2);
  }

  Tensor dprobs1(probs1.dims), dprobs2(probs2.dims);
  const double inv_b = 1.0 / double(bsz);
  double total1 = 0.0, total2 = 0.0;

  for (std::size_t b = 0; b < bsz; ++b) {
    const double w1 = trusted1[b] ? 1.0 : (1.0 - lambda_q);
    total1 += w1 * loss1[b];
    losses::seg_loss_grad(fg_span(probs1, b),
                          mask_span(labels_n1[batch[b]].mask), cfg.alpha,
                          cfg.epsilon, w1 * inv_b, fg_grad_span(dprobs1, b));
    const double w2 = trusted2[b] ? 1.0 : (1.0 - lambda_q);
    total2 += w2 * loss2[b];
    losses::seg_loss_grad(fg_span(probs2, b),
                          mask_span(labels_n2[batch[b]].mask), cfg.alpha,
                          cfg.epsilon, w2 * inv_b, fg_grad_span(dprobs2, b));
  }
  if (need_pseudo) {
    for (std::size_t i = 0; i < suspected1.size(); ++i) {
      const std::size_t b = suspected1[i];
      const std::span<const double> ps(pseudo1[i].fg(),
                                       pseudo1[i].plane_size());
      const double lcon = losses::consistency_loss(fg_span(probs1, b), ps);
      total1 += lambda_q * lcon;
      stats.consistency_term_n1 += lambda_q * lcon * inv_b;
      losses::consistency_loss_grad(fg_span(probs1, b), ps,
                                    lambda_q * inv_b,
                                    fg_grad_span(dprobs1, b));
    }
    for (std::size_t i = 0; i < suspected2.size(); ++i) {
      const std::size_t b = suspected2[i];
      const std::span<const double> ps(pseudo2[i].fg(),
                                       pseudo2[i].plane_size());
      const double lcon = losses::consistency_loss(fg_span(probs2, b), ps);
      total2 += lambda_q * lcon;
      stats.consistency_term_n2 += lambda_q * lcon * inv_b;
      losses::consistency_loss_grad(fg_span(probs2, b), ps,
                                    lambda_q * inv_b,
                                    fg_grad_span(dprobs2, b));
    }
  }

  stats.loss_n1 = total1 * inv_b;
  stats.loss_n2 = total2 * inv_b;
  if (!std::isfinite(stats.loss_n1) || !std::isfinite(stats.loss_n2))
    throw std::runtime_error("non-finite training loss");

  // both gradients against pre-update parameters, then both updates
  n1.zero_grad();
  n1.backward(dprobs1);
  n2.zero_grad();
  n2.backward(dprobs2);
  opt1.step(n1.params());
  opt2.step(n2.params());
  return stats;
}

std::vector<ProbMap> predict_probs(UNet& model, const Dataset& data,
                                   int batch_size) {
  std::vector<ProbMap> out;
  out.reserve(data.samples.size());
  const std::size_t n = data.samples.size();
  for (std::size_t start = 0; start < n; start += std::size_t(batch_size)) {
    const std::size_t stop = std::min(n, start + std::size_t(batch_size));
    std::vector<const Image*> imgs;
    for (std::size_t i = start; i < stop; ++i)
      imgs.push_back(&data.samples[i].image);
    const Tensor probs =
        model.forward(net::images_to_tensor(imgs), Mode::eval);
    for (std::size_t i = start; i < stop; ++i)
      out.push_back(net::tensor_to_probmap(probs, int(i - start)));
  }
  return out;
}

std::vector<BinaryMask> predict_masks(UNet& model, const Dataset& data,
                                      int batch_size) {
  const auto probs = predict_probs(model, data, batch_size);
  std::vector<BinaryMask> masks;
  masks.reserve(probs.size());
  for (const auto& p : probs) masks.push_back(p.binarize());
  return masks;
}

std::unique_ptr<UNet> clone_model(UNet& model) {
  auto copy = std::make_unique<UNet>(model.arch(), model.seed());
  const auto src_params = model.params();
  const auto dst_params = copy->params();
  for (std::size_t i = 0; i < src_params.size(); ++i)
    dst_params[i].value->data = src_params[i].value->data;
  const auto src_buf = model.buffers();
  const auto dst_buf = copy->buffers();
  for (std::size_t i = 0; i < src_buf.size(); ++i)
    dst_buf[i].value->data = src_buf[i].value->data;
  return copy;
}

std::vector<LabelRecord> initial_label_records(const Dataset& data) {
  require_all_labeled(data);
  std::vector<LabelRecord> records;
  records.reserve(data.samples.size());
  for (const auto& s : data.samples) {
    LabelRecord r;
    r.sample_id = s.id;
    r.mask = *s.label;
    r.quality = s.quality;
    r.source = LabelSource::annotator;
    records.push_back(std::move(r));
  }
  return records;
}

TrainResult train_with_seeds(const TrainConfig& cfg, const Dataset& train_set,
                             const Dataset* test_set, std::uint64_t seed_n1,
                             std::uint64_t seed_n2) {
  cfg.validate();
  require_all_labeled(train_set);
  if (train_set.samples.empty())
    throw std::invalid_argument("empty training set");

  RngStream root = seeded_rng(cfg.seed);
  UNet n1(cfg.arch, seed_n1);
  UNet n2(cfg.arch, seed_n2);
  auto opt1 = net::make_optimizer(cfg.optimizer, cfg.learning_rate);
  auto opt2 = net::make_optimizer(cfg.optimizer, cfg.learning_rate);

  TrainResult result;
  // both label maps start as the provided annotations
  result.labels_n1 = initial_label_records(train_set);
  result.labels_n2 = result.labels_n1;

  const int eval_batch = std::max(cfg.batch_size, 8);

  for (int q = 0; q < cfg.total_epochs; ++q) {
    const double lambda_q =
        lambda_schedule(q, cfg.warmup_epochs, cfg.lambda_max);
    RngStream shuffle_rng = root.split("shuffle", std::uint64_t(q));
    const auto order = shuffled_indices(train_set.samples.size(),
                                        shuffle_rng);
    RngStream aug1 = seeded_rng(seed_n1).split("augment", std::uint64_t(q));
    RngStream aug2 = seeded_rng(seed_n2).split("augment", std::uint64_t(q));

    for (std::size_t start = 0; start < order.size();
         start += std::size_t(cfg.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + std::size_t(cfg.batch_size));
      const std::span<const std::size_t> batch(order.data() + start,
                                               stop - start);
      try {
        iteration_step(n1, n2, *opt1, *opt2, train_set, result.labels_n1,
                       result.labels_n2, batch, cfg, lambda_q, aug1, aug2);
      } catch (const std::runtime_error& e) {
        throw std::runtime_error("epoch " + std::to_string(q) + ", batch at " +
                                 std::to_string(start) + ": " + e.what());
      }
    }

    // post-epoch evaluation over the whole training set
    EpochEval ev1 = evaluate_against_labels(n1, train_set, result.labels_n1,
                                            eval_batch);
    EpochEval ev2 = evaluate_against_labels(n2, train_set, result.labels_n2,
                                            eval_batch);

    CorrectionOutcome corrections;
    if (update_criterion(q, cfg.warmup_epochs, cfg.update_period)) {
      corrections = global_label_correction(ev1.masks, ev2.masks,
                                            result.labels_n1,
                                            result.labels_n2,
                                            cfg.correction_ratio, q);
      // refresh label-dependent scores for the corrected entries
      for (std::size_t i = 0; i < train_set.samples.size(); ++i) {
        ev1.dsc_vs_label[i] =
            metrics::dsc(ev1.masks[i], result.labels_n1[i].mask);
        ev2.dsc_vs_label[i] =
            metrics::dsc(ev2.masks[i], result.labels_n2[i].mask);
      }
    }

    const double dsc_train_1 =
        std::accumulate(ev1.dsc_vs_label.begin(), ev1.dsc_vs_label.end(),
                        0.0) /
        double(ev1.dsc_vs_label.size());
    const double dsc_train_2 =
        std::accumulate(ev2.dsc_vs_label.begin(), ev2.dsc_vs_label.end(),
                        0.0) /
        double(ev2.dsc_vs_label.size());
    const double dsc_train = 0.5 * (dsc_train_1 + dsc_train_2);

    if (dsc_train > result.best_dsc_train) {
      result.best_dsc_train = dsc_train;
      result.best_epoch = q;
      result.best_n1 = clone_model(n1);
      result.best_n2 = clone_model(n2);
    }

    {
      std::vector<const BinaryMask*> refs1, refs2;
      for (std::size_t i = 0; i < train_set.samples.size(); ++i) {
        refs1.push_back(&result.labels_n1[i].mask);
        refs2.push_back(&result.labels_n2[i].mask);
      }
      result.report.rows.push_back(make_train_row(
          q, "N1", aggregate_metrics(ev1.masks, refs1), lambda_q,
          corrections.corrected_into_n1,
          mean_label_dsc_vs_truth(train_set, result.labels_n1)));
      result.report.rows.push_back(make_train_row(
          q, "N2", aggregate_metrics(ev2.masks, refs2), lambda_q,
          corrections.corrected_into_n2,
          mean_label_dsc_vs_truth(train_set, result.labels_n2)));
    }

    if (test_set && cfg.eval_test_every > 0 &&
        (q % cfg.eval_test_every == 0 || q == cfg.total_epochs - 1)) {
      result.report.rows.push_back(
          make_test_row(q, "N1", n1, *test_set, lambda_q, eval_batch));
      result.report.rows.push_back(
          make_test_row(q, "N2", n2, *test_set, lambda_q, eval_batch));
    }
  }
  return result;
}

TrainResult train(const TrainConfig& cfg, const Dataset& train_set,
                  const Dataset* test_set) {
  RngStream root = seeded_rng(cfg.seed);
  return train_with_seeds(cfg, train_set, test_set,
                          root.split("model-n1").origin(),
                          root.split("model-n2").origin());
}

SupervisedResult train_supervised(const TrainConfig& cfg,
                                  const Dataset& train_set,
                                  const Dataset* test_set,
                                  const SupervisedOptions& opts) {
  cfg.validate();
  require_all_labeled(train_set);
  if (train_set.samples.empty())
    throw std::invalid_argument("empty training set");

  const int epochs =
      opts.epochs_override > 0 ? opts.epochs_override : cfg.total_epochs;
  RngStream root = seeded_rng(cfg.seed);
  SupervisedResult result;
  auto model = std::make_unique<UNet>(cfg.arch,
                                      root.split("model-fs").origin());
  auto opt = net::make_optimizer(cfg.optimizer, cfg.learning_rate);
  result.labels = initial_label_records(train_set);

  const int eval_batch = std::max(cfg.batch_size, 8);

  for (int q = 0; q < epochs; ++q) {
    RngStream shuffle_rng = root.split("shuffle", std::uint64_t(q));
    const auto order = shuffled_indices(train_set.samples.size(),
                                        shuffle_rng);
    for (std::size_t start = 0; start < order.size();
         start += std::size_t(cfg.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + std::size_t(cfg.batch_size));
      const std::size_t bsz = stop - start;
      std::vector<const Image*> imgs(bsz);
      for (std::size_t b = 0; b < bsz; ++b)
        imgs[b] = &train_set.samples[order[start + b]].image;
      const Tensor x = net::images_to_tensor(imgs);
      Tensor probs = model->forward(x, Mode::train);
      Tensor dprobs(probs.dims);
      const double inv_b = 1.0 / double(bsz);
      double total = 0.0;
      for (std::size_t b = 0; b < bsz; ++b) {
        const auto ref = mask_span(result.labels[order[start + b]].mask);
        total += losses::seg_loss(fg_span(probs, b), ref, cfg.alpha,
                                  cfg.epsilon);
        losses::seg_loss_grad(fg_span(probs, b), ref, cfg.alpha, cfg.epsilon,
                              inv_b, fg_grad_span(dprobs, b));
      }
      if (!std::isfinite(total))
        throw std::runtime_error("non-finite supervised loss at epoch " +
                                 std::to_string(q));
      model->zero_grad();
      model->backward(dprobs);
      opt->step(model->params());
    }

    EpochEval ev = evaluate_against_labels(*model, train_set, result.labels,
                                           eval_batch);
    int replaced = 0;
    if (opts.refresh_lq_labels) {
      for (std::size_t i = 0; i < train_set.samples.size(); ++i) {
        if (result.labels[i].quality == Quality::HQ) continue;
        result.labels[i].set_mask(ev.masks[i],
                                  LabelSource::pretrain_pseudolabel, q);
        ++replaced;
      }
      for (std::size_t i = 0; i < train_set.samples.size(); ++i)
        ev.dsc_vs_label[i] =
            metrics::dsc(ev.masks[i], result.labels[i].mask);
    }

    std::vector<const BinaryMask*> refs;
    for (std::size_t i = 0; i < train_set.samples.size(); ++i)
      refs.push_back(&result.labels[i].mask);
    result.report.rows.push_back(make_train_row(
        q, opts.model_id, aggregate_metrics(ev.masks, refs), 0.0, replaced,
        mean_label_dsc_vs_truth(train_set, result.labels)));

    if (test_set && cfg.eval_test_every > 0 &&
        (q % cfg.eval_test_every == 0 || q == epochs - 1)) {
      result.report.rows.push_back(make_test_row(q, opts.model_id, *model,
                                                 *test_set, 0.0, eval_batch));
    }
  }
  result.model = std::move(model);
  return result;
}

std::vector<std::pair<double, double>> memorization_probe(
    UNet& model, const Dataset& data) {
  for (const auto& s : data.samples) {
    if (!s.truth)
      throw std::invalid_argument("memorization probe needs ground truth: " +
                                  s.id);
    if (!s.label)
      throw std::invalid_argument("memorization probe needs labels: " + s.id);
  }
  const auto masks = predict_masks(model, data, 8);
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(data.samples.size());
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    pairs.emplace_back(metrics::dsc(masks[i], *data.samples[i].label),
                       metrics::dsc(*data.samples[i].label,
                                    *data.samples[i].truth));
  }
  return pairs;
}

}  // namespace aide::trainer
