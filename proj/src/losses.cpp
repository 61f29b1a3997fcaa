#include "aide/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace aide::losses {

namespace {

constexpr double kClip = 1e-7;

void require_same_size(std::size_t a, std::size_t b, const char* who) {
  if (a != b)
    throw std::invalid_argument(std::string(who) + ": size mismatch");
}

}  // namespace

double dice_loss(std::span<const double> pred_fg,
                 std::span<const std::uint8_t> ref, double epsilon) {
  require_same_size(pred_fg.size(), ref.size(), "dice_loss");
  if (epsilon <= 0.0) throw std::invalid_argument("dice_loss: epsilon <= 0");
  double inter = 0.0, sum_p = 0.0, sum_y = 0.0;
  for (std::size_t i = 0; i < pred_fg.size(); ++i) {
    inter += pred_fg[i] * ref[i];
    sum_p += pred_fg[i];
    sum_y += ref[i];
  }
  return 1.0 - (2.0 * inter + epsilon) / (sum_p + sum_y + epsilon);
}

void dice_loss_grad(std::span<const double> pred_fg,
                    std::span<const std::uint8_t> ref, double epsilon,
                    double weight, std::span<double> grad) {
  double inter = 0.0, sum_p = 0.0, sum_y = 0.0;
  for (std::size_t i = 0; i < pred_fg.size(); ++i) {
    inter += pred_fg[i] * ref[i];
    sum_p += pred_fg[i];
    sum_y += ref[i];
  }
  const double num = 2.0 * inter + epsilon;
  const double den = sum_p + sum_y + epsilon;
  // d/dp_i [1 - num/den] = (num - 2*y_i*den) / den^2
  const double inv_den2 = 1.0 / (den * den);
  for (std::size_t i = 0; i < pred_fg.size(); ++i)
    grad[i] += weight * (num - 2.0 * ref[i] * den) * inv_den2;
}

double cross_entropy_loss(std::span<const double> pred_fg,
                          std::span<const std::uint8_t> ref) {
  require_same_size(pred_fg.size(), ref.size(), "cross_entropy_loss");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred_fg.size(); ++i) {
    const double p = std::clamp(pred_fg[i], kClip, 1.0 - kClip);
    acc += ref[i] ? std::log(p) : std::log(1.0 - p);
  }
  return -acc / double(pred_fg.size());
}

void cross_entropy_loss_grad(std::span<const double> pred_fg,
                             std::span<const std::uint8_t> ref, double weight,
                             std::span<double> grad) {
  const double inv_n = 1.0 / double(pred_fg.size());
  for (std::size_t i = 0; i < pred_fg.size(); ++i) {
    // zero gradient where the clip is active
    if (pred_fg[i] < kClip || pred_fg[i] > 1.0 - kClip) continue;
    const double p = pred_fg[i];
    grad[i] += weight * inv_n * (ref[i] ? -1.0 / p : 1.0 / (1.0 - p));
  }
}

double seg_loss(std::span<const double> pred_fg,
                std::span<const std::uint8_t> ref, double alpha,
                double epsilon) {
  return dice_loss(pred_fg, ref, epsilon) +
         alpha * cross_entropy_loss(pred_fg, ref);
}

void seg_loss_grad(std::span<const double> pred_fg,
                   std::span<const std::uint8_t> ref, double alpha,
                   double epsilon, double weight, std::span<double> grad) {
  dice_loss_grad(pred_fg, ref, epsilon, weight, grad);
  cross_entropy_loss_grad(pred_fg, ref, weight * alpha, grad);
}

double consistency_loss(std::span<const double> pred_fg,
                        std::span<const double> pseudo_fg) {
  require_same_size(pred_fg.size(), pseudo_fg.size(), "consistency_loss");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred_fg.size(); ++i) {
    const double d = pred_fg[i] - pseudo_fg[i];
    acc += d * d;
  }
  return acc / (2.0 * double(pred_fg.size()));
}

void consistency_loss_grad(std::span<const double> pred_fg,
                           std::span<const double> pseudo_fg, double weight,
                           std::span<double> grad) {
  const double scale = weight / double(pred_fg.size());
  for (std::size_t i = 0; i < pred_fg.size(); ++i)
    grad[i] += scale * (pred_fg[i] - pseudo_fg[i]);
}

namespace {

void require_same_dims(const ProbMap& p, int h, int w, const char* who) {
  if (p.height != h || p.width != w)
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

LossValue single(double v) {
  LossValue lv;
  lv.scalar = v;
  lv.per_sample = {v};
  return lv;
}

}  // namespace

LossValue dice_loss(const ProbMap& pred, const BinaryMask& ref,
                    double epsilon) {
  require_same_dims(pred, ref.height, ref.width, "dice_loss");
  return single(dice_loss(
      std::span(pred.fg(), pred.plane_size()),
      std::span(ref.values.data(), ref.values.size()), epsilon));
}

LossValue cross_entropy_loss(const ProbMap& pred, const BinaryMask& ref) {
  require_same_dims(pred, ref.height, ref.width, "cross_entropy_loss");
  return single(cross_entropy_loss(
      std::span(pred.fg(), pred.plane_size()),
      std::span(ref.values.data(), ref.values.size())));
}

LossValue seg_loss(const ProbMap& pred, const BinaryMask& ref, double alpha,
                   double epsilon) {
  require_same_dims(pred, ref.height, ref.width, "seg_loss");
  return single(seg_loss(std::span(pred.fg(), pred.plane_size()),
                         std::span(ref.values.data(), ref.values.size()),
                         alpha, epsilon));
}

LossValue consistency_loss(const ProbMap& pred, const ProbMap& pseudo) {
  require_same_dims(pred, pseudo.height, pseudo.width, "consistency_loss");
  return single(consistency_loss(std::span(pred.fg(), pred.plane_size()),
                                 std::span(pseudo.fg(), pseudo.plane_size())));
}

ProbMap sharpen(const ProbMap& p, double temperature, SharpenForm form) {
  if (temperature <= 0.0)
    throw std::invalid_argument("sharpen: temperature must be > 0");
  ProbMap out(p.height, p.width);
  const std::size_t n = p.plane_size();
  const double* bg = p.bg();
  const double* fg = p.fg();
  double* obg = out.bg();
  double* ofg = out.fg();
  if (form == SharpenForm::softmax) {
    const double inv_t = 1.0 / temperature;
    for (std::size_t i = 0; i < n; ++i) {
      const double m = std::max(bg[i], fg[i]);
      const double eb = std::exp((bg[i] - m) * inv_t);
      const double ef = std::exp((fg[i] - m) * inv_t);
      const double s = eb + ef;
      obg[i] = eb / s;
      ofg[i] = ef / s;
    }
  } else {
    const double exponent = 1.0 / temperature;
    for (std::size_t i = 0; i < n; ++i) {
      const double pb = std::pow(std::max(bg[i], 0.0), exponent);
      const double pf = std::pow(std::max(fg[i], 0.0), exponent);
      const double s = pb + pf;
      if (s <= 0.0) {
        obg[i] = 0.5;
        ofg[i] = 0.5;
      } else {
        obg[i] = pb / s;
        ofg[i] = pf / s;
      }
    }
  }
  return out;
}

}  // namespace aide::losses
