#pragma once
// Synthetic scene generator with known ground truth and a parametric
// label-noise injector. Stands in for clinical data at desk scale.

#include <cstdint>
#include <filesystem>
#include <string>

#include "aide/rng.hpp"
#include "aide/types.hpp"

namespace aide::synth {

enum class ShapeFamily : std::uint8_t { disk, ellipse, blob_union };
enum class DomainPreset : std::uint8_t { A, B };

struct SceneParams {
  int image_size = 64;  // multiple of 16
  ShapeFamily shape = ShapeFamily::blob_union;
  double fg_intensity_lo = 0.65;
  double fg_intensity_hi = 0.9;
  double texture_amplitude = 0.08;
  int confounders = 2;  // distractor blobs sharing the foreground band
  DomainPreset domain = DomainPreset::A;
};

enum class NoiseMode : std::uint8_t {
  dilate,
  erode,
  translate,
  drop_region,
  add_blob,
  replace_with_model,
};

struct NoiseParams {
  NoiseMode mode = NoiseMode::dilate;
  int magnitude = 2;
  double apply_probability = 1.0;
};

NoiseMode parse_noise_mode(const std::string& s);
const char* to_string(NoiseMode m);

struct Scene {
  Image image;
  BinaryMask truth;
};

Scene generate_scene(const SceneParams& params, RngStream& rng);

struct CorruptResult {
  BinaryMask mask;
  double achieved_dsc = 1.0;  // measured against the input truth
};

CorruptResult corrupt_label(const BinaryMask& truth, const NoiseParams& noise,
                            RngStream& rng);

struct BenchmarkSpec {
  int n_train = 100;
  int n_test = 50;
  double hq_fraction = 0.1;
  NoiseParams noise;
  SceneParams scene;
  std::uint64_t seed = 0;
  // rotate through these per corrupted sample when non-empty
  std::vector<NoiseParams> noise_mix;
};

// dilate(3) / erode(3) / translate(6), cycled; lands labels around
// DSC 0.6-0.8 against truth on the default scene scale.
std::vector<NoiseParams> standard_noise_mix();

// Emits out/train and out/test dataset directories. HQ samples carry the
// truth as their label; LQ samples carry corrupted labels; every train
// sample keeps a truth sidecar for evaluation only.
void build_benchmark(const std::filesystem::path& out_dir,
                     const BenchmarkSpec& spec);

}  // namespace aide::synth
