#pragma once
// Segmentation metrics: DSC, RAVD, average/maximum symmetric surface
// distance, largest-connected-component post-processing, and the
// multi-threshold DSC protocol for continuous references.
//
// Conventions (fixed here, asserted in tests):
//  - empty-vs-empty DSC = 1.0; empty-vs-nonempty DSC = 0.0
//  - boundary pixels: foreground with a background 4-neighbor; the image
//    border counts as outside
//  - connected components are 8-connected
//  - distances are in pixel units unless a per-axis spacing is given

#include <utility>
#include <vector>

#include "aide/types.hpp"

namespace aide::metrics {

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct PixelSpacing {
  double row = 1.0;
  double col = 1.0;
};

ConfusionCounts confusion_counts(const BinaryMask& pred,
                                 const BinaryMask& ref);

double dsc(const BinaryMask& pred, const BinaryMask& ref);

// (FP-FN)/(TP+FN); throws when the reference is empty.
double ravd(const BinaryMask& pred, const BinaryMask& ref);

struct BoundaryPoint {
  int row = 0;
  int col = 0;
};

std::vector<BoundaryPoint> extract_boundary(const BinaryMask& mask);

// Surface distances are computed through an exact Euclidean distance
// transform; throws when either mask has no foreground.
double assd(const BinaryMask& pred, const BinaryMask& ref,
            PixelSpacing spacing = {});
double mssd(const BinaryMask& pred, const BinaryMask& ref,
            PixelSpacing spacing = {});

// Keeps the largest 8-connected component; ties break toward the
// component whose first pixel appears earliest in row-major order.
BinaryMask largest_connected_component(const BinaryMask& mask);

// QUBIQ protocol: binarize prediction foreground and continuous reference
// at each threshold (>= t), average the per-threshold DSCs.
std::vector<double> default_thresholds();  // 0.1 .. 0.9
double multi_threshold_dsc(const ProbMap& pred,
                           const std::vector<double>& ref_continuous,
                           int height, int width,
                           const std::vector<double>& thresholds);

// Exact squared Euclidean distance transform (Felzenszwalb-Huttenlocher)
// to the set of "on" pixels. Exposed for reuse by morphology.
std::vector<double> squared_edt(const std::vector<std::uint8_t>& on,
                                int height, int width,
                                PixelSpacing spacing = {});

}  // namespace aide::metrics
