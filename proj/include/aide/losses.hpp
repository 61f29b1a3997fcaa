#pragma once
// Training objectives: smoothed Dice loss, binary cross-entropy, their
// weighted combination, the MSE consistency loss, and temperature
// sharpening. Values come with per-sample breakdowns; gradients are
// analytic w.r.t. the predicted foreground probabilities.

#include <span>
#include <vector>

#include "aide/config.hpp"
#include "aide/types.hpp"

namespace aide::losses {

struct LossValue {
  double scalar = 0.0;                // mean of per_sample
  std::vector<double> per_sample;
};

// 1 - (2*sum(p*y) + eps) / (sum(p) + sum(y) + eps) over one image.
double dice_loss(std::span<const double> pred_fg,
                 std::span<const std::uint8_t> ref, double epsilon);
// d(dice_loss)/d(pred_fg) added into grad with weight.
void dice_loss_grad(std::span<const double> pred_fg,
                    std::span<const std::uint8_t> ref, double epsilon,
                    double weight, std::span<double> grad);

// Mean binary cross-entropy; predictions clipped to [1e-7, 1-1e-7].
double cross_entropy_loss(std::span<const double> pred_fg,
                          std::span<const std::uint8_t> ref);
void cross_entropy_loss_grad(std::span<const double> pred_fg,
                             std::span<const std::uint8_t> ref, double weight,
                             std::span<double> grad);

// dice + alpha * cross-entropy.
double seg_loss(std::span<const double> pred_fg,
                std::span<const std::uint8_t> ref, double alpha,
                double epsilon);
void seg_loss_grad(std::span<const double> pred_fg,
                   std::span<const std::uint8_t> ref, double alpha,
                   double epsilon, double weight, std::span<double> grad);

// (1/2N) * sum (pred - pseudo)^2 over the foreground channel.
double consistency_loss(std::span<const double> pred_fg,
                        std::span<const double> pseudo_fg);
void consistency_loss_grad(std::span<const double> pred_fg,
                           std::span<const double> pseudo_fg, double weight,
                           std::span<double> grad);

// Batched convenience wrappers over ProbMap/BinaryMask.
LossValue dice_loss(const ProbMap& pred, const BinaryMask& ref,
                    double epsilon);
LossValue cross_entropy_loss(const ProbMap& pred, const BinaryMask& ref);
LossValue seg_loss(const ProbMap& pred, const BinaryMask& ref, double alpha,
                   double epsilon);
LossValue consistency_loss(const ProbMap& pred, const ProbMap& pseudo);

// Temperature sharpening of a probability map. softmax form follows the
// straight exponential definition; power form raises channels to 1/T.
ProbMap sharpen(const ProbMap& p, double temperature, SharpenForm form);

}  // namespace aide::losses
