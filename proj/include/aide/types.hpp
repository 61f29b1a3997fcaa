#pragma once
// Domain types shared across modules.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aide {

// Hard {0,1} pixel grid, row-major.
struct BinaryMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> values;  // 0 or 1

  BinaryMask() = default;
  BinaryMask(int h, int w) : height(h), width(w), values(size_t(h) * w, 0) {
    if (h <= 0 || w <= 0) throw std::invalid_argument("mask dims must be > 0");
  }

  std::uint8_t at(int r, int c) const { return values[size_t(r) * width + c]; }
  std::uint8_t& at(int r, int c) { return values[size_t(r) * width + c]; }
  std::size_t pixel_count() const { return values.size(); }

  std::size_t area() const {
    std::size_t a = 0;
    for (auto v : values) a += v;
    return a;
  }
  bool empty_fg() const { return area() == 0; }

  bool operator==(const BinaryMask& o) const = default;
};

// Two-channel per-pixel class probabilities (background, foreground).
// Stored channel-major: plane 0 = background, plane 1 = foreground.
struct ProbMap {
  int height = 0;
  int width = 0;
  std::vector<double> data;  // 2 * H * W

  ProbMap() = default;
  ProbMap(int h, int w) : height(h), width(w), data(size_t(2) * h * w, 0.5) {
    if (h <= 0 || w <= 0)
      throw std::invalid_argument("probmap dims must be > 0");
  }

  std::size_t plane_size() const { return size_t(height) * width; }
  double* bg() { return data.data(); }
  const double* bg() const { return data.data(); }
  double* fg() { return data.data() + plane_size(); }
  const double* fg() const { return data.data() + plane_size(); }

  double fg_at(int r, int c) const { return fg()[size_t(r) * width + c]; }

  // argmax binarization; exact ties go to background.
  BinaryMask binarize() const {
    BinaryMask m(height, width);
    const double* f = fg();
    const double* b = bg();
    for (std::size_t i = 0; i < plane_size(); ++i)
      m.values[i] = f[i] > b[i] ? 1 : 0;
    return m;
  }

  void validate(double tol = 1e-6) const {
    const double* f = fg();
    const double* b = bg();
    for (std::size_t i = 0; i < plane_size(); ++i) {
      if (f[i] < -tol || f[i] > 1 + tol || b[i] < -tol || b[i] > 1 + tol)
        throw std::runtime_error("probmap value outside [0,1]");
      const double s = f[i] + b[i];
      if (s < 1 - tol || s > 1 + tol)
        throw std::runtime_error("probmap channels do not sum to 1");
    }
  }
};

// Multi-modality intensity image, values in [0,1], channel-major M*H*W.
struct Image {
  int height = 0;
  int width = 0;
  int modalities = 0;
  std::vector<double> data;

  Image() = default;
  Image(int h, int w, int m)
      : height(h), width(w), modalities(m), data(size_t(m) * h * w, 0.0) {
    if (h <= 0 || w <= 0 || m <= 0)
      throw std::invalid_argument("image dims must be > 0");
  }

  std::size_t plane_size() const { return size_t(height) * width; }
  double* plane(int m) { return data.data() + size_t(m) * plane_size(); }
  const double* plane(int m) const {
    return data.data() + size_t(m) * plane_size();
  }
};

enum class Quality : std::uint8_t { HQ, LQ };
enum class LabelSource : std::uint8_t {
  annotator,
  pretrain_pseudolabel,
  global_correction,
};

inline const char* to_string(Quality q) {
  return q == Quality::HQ ? "HQ" : "LQ";
}

// A training sample's current mask plus its provenance. HQ records are
// immutable: set_mask throws on them.
struct LabelRecord {
  std::string sample_id;
  BinaryMask mask;
  Quality quality = Quality::LQ;
  LabelSource source = LabelSource::annotator;
  std::vector<int> corrected_at_epochs;

  void set_mask(BinaryMask new_mask, LabelSource new_source, int epoch) {
    if (quality == Quality::HQ)
      throw std::logic_error("attempted to rewrite an HQ label: " + sample_id);
    mask = std::move(new_mask);
    source = new_source;
    corrected_at_epochs.push_back(epoch);
  }
};

enum class Split : std::uint8_t { train, test };

struct ManifestEntry {
  std::string id;
  std::vector<std::string> image_paths;  // one per modality
  std::optional<std::string> label_path;
  Quality quality = Quality::LQ;
  std::optional<std::string> truth_path;
};

struct DatasetManifest {
  Split split = Split::train;
  std::vector<ManifestEntry> samples;
};

// Fully loaded sample. `truth` is evaluation-only and must never feed
// training objectives.
struct Sample {
  std::string id;
  Image image;
  std::optional<BinaryMask> label;
  Quality quality = Quality::LQ;
  std::optional<BinaryMask> truth;
};

struct Dataset {
  Split split = Split::train;
  std::vector<Sample> samples;
};

// One evaluation row; unset optionals mean "undefined for this row".
struct MetricsRow {
  int epoch = 0;
  std::string model_id;  // "N1", "N2", or arm-specific
  std::string split;     // "train" | "test"
  double dsc = 0.0;
  std::optional<double> ravd;  // fraction, not percent
  std::optional<double> assd;
  std::optional<double> mssd;
  double lambda_q = 0.0;
  int n_labels_corrected = 0;
  std::optional<double> train_label_dsc_vs_truth;
};

struct MetricsReport {
  std::vector<MetricsRow> rows;
};

}  // namespace aide
