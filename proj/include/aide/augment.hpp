#pragma once
// Exact-inverse geometric augmentation: the eight grid symmetries
// (90-degree rotations and flips), sampled uniformly, plus K-fold
// prediction distillation into sharpened pseudo-labels.

#include <functional>

#include "aide/config.hpp"
#include "aide/rng.hpp"
#include "aide/types.hpp"

namespace aide::augment {

// rotation applied first (k quarter-turns clockwise), then horizontal
// flip, then vertical flip.
struct TransformDescriptor {
  int rot_quarters = 0;  // 0..3
  bool hflip = false;
  bool vflip = false;

  bool operator==(const TransformDescriptor&) const = default;
};

TransformDescriptor sample_transform(RngStream& rng);
TransformDescriptor inverse(const TransformDescriptor& t);
bool is_identity_action(const TransformDescriptor& t);

BinaryMask apply(const TransformDescriptor& t, const BinaryMask& grid);
Image apply(const TransformDescriptor& t, const Image& grid);
ProbMap apply(const TransformDescriptor& t, const ProbMap& grid);

// Averages K inverse-aligned predictions of transformed inputs, then
// sharpens. `forward` must be an evaluation-mode model call.
using ForwardFn = std::function<ProbMap(const Image&)>;
ProbMap distill_pseudo_label(const ForwardFn& forward, const Image& image,
                             int k, double temperature, SharpenForm form,
                             RngStream& rng);

}  // namespace aide::augment
