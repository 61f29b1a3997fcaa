#include "aide/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "aide/manifest.hpp"
#include "aide/metrics.hpp"

namespace aide::synth {

namespace {

void rasterize_disk(BinaryMask& mask, int cy, int cx, double radius) {
  const double r2 = radius * radius;
  const int lo_y = std::max(0, int(std::floor(cy - radius)));
  const int hi_y = std::min(mask.height - 1, int(std::ceil(cy + radius)));
  const int lo_x = std::max(0, int(std::floor(cx - radius)));
  const int hi_x = std::min(mask.width - 1, int(std::ceil(cx + radius)));
  for (int y = lo_y; y <= hi_y; ++y)
    for (int x = lo_x; x <= hi_x; ++x)
      if (double(y - cy) * (y - cy) + double(x - cx) * (x - cx) <= r2)
        mask.at(y, x) = 1;
}

void rasterize_ellipse(BinaryMask& mask, double cy, double cx, double a,
                       double b, double theta) {
  const double ct = std::cos(theta), st = std::sin(theta);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      const double dy = y - cy, dx = x - cx;
      const double u = (dx * ct + dy * st) / a;
      const double v = (-dx * st + dy * ct) / b;
      if (u * u + v * v <= 1.0) mask.at(y, x) = 1;
    }
  }
}

BinaryMask draw_shape(const SceneParams& p, RngStream& rng) {
  const int s = p.image_size;
  BinaryMask mask(s, s);
  switch (p.shape) {
    case ShapeFamily::disk: {
      const int cy = int(rng.uniform_int(std::uint64_t(s / 2))) + s / 4;
      const int cx = int(rng.uniform_int(std::uint64_t(s / 2))) + s / 4;
      const double r = rng.uniform(s / 8.0, s / 5.0);
      rasterize_disk(mask, cy, cx, r);
      break;
    }
    case ShapeFamily::ellipse: {
      const double cy = rng.uniform(s / 3.0, 2.0 * s / 3.0);
      const double cx = rng.uniform(s / 3.0, 2.0 * s / 3.0);
      const double a = rng.uniform(s / 10.0, s / 4.5);
      const double b = rng.uniform(s / 10.0, s / 4.5);
      const double theta = rng.uniform(0.0, M_PI);
      rasterize_ellipse(mask, cy, cx, a, b, theta);
      break;
    }
    case ShapeFamily::blob_union: {
      const int blobs = 2 + int(rng.uniform_int(3));
      const double cy = rng.uniform(s / 3.0, 2.0 * s / 3.0);
      const double cx = rng.uniform(s / 3.0, 2.0 * s / 3.0);
      for (int i = 0; i < blobs; ++i) {
        const double oy = rng.uniform(-s / 10.0, s / 10.0);
        const double ox = rng.uniform(-s / 10.0, s / 10.0);
        const double r = rng.uniform(s / 12.0, s / 7.0);
        rasterize_disk(mask, int(std::lround(cy + oy)),
                       int(std::lround(cx + ox)), r);
      }
      break;
    }
  }
  return mask;
}

// Smooth low-frequency texture field, plus a little per-pixel grain.
std::vector<double> texture_field(int s, double amplitude, RngStream& rng) {
  std::vector<double> field(std::size_t(s) * s, 0.0);
  if (amplitude <= 0.0) return field;
  struct Wave {
    double fy, fx, phase, amp;
  };
  Wave waves[3];
  for (auto& wv : waves) {
    wv.fy = rng.uniform(1.0, 4.0);
    wv.fx = rng.uniform(1.0, 4.0);
    wv.phase = rng.uniform(0.0, 2.0 * M_PI);
    wv.amp = amplitude * rng.uniform(0.4, 1.0);
  }
  for (int y = 0; y < s; ++y)
    for (int x = 0; x < s; ++x) {
      double v = 0.0;
      for (const auto& wv : waves)
        v += wv.amp *
             std::cos(2.0 * M_PI * (wv.fy * y + wv.fx * x) / double(s) +
                      wv.phase);
      field[std::size_t(y) * s + x] = v;
    }
  for (auto& v : field) v += amplitude * 0.3 * (rng.uniform01() - 0.5);
  return field;
}

double quantize8(double v) {
  const double c = std::clamp(v, 0.0, 1.0);
  return std::round(c * 255.0) / 255.0;
}

}  // namespace

NoiseMode parse_noise_mode(const std::string& s) {
  if (s == "dilate") return NoiseMode::dilate;
  if (s == "erode") return NoiseMode::erode;
  if (s == "translate") return NoiseMode::translate;
  if (s == "drop_region") return NoiseMode::drop_region;
  if (s == "add_blob") return NoiseMode::add_blob;
  if (s == "replace_with_model") return NoiseMode::replace_with_model;
  throw std::invalid_argument("unknown noise mode: " + s);
}

const char* to_string(NoiseMode m) {
  switch (m) {
    case NoiseMode::dilate: return "dilate";
    case NoiseMode::erode: return "erode";
    case NoiseMode::translate: return "translate";
    case NoiseMode::drop_region: return "drop_region";
    case NoiseMode::add_blob: return "add_blob";
    default: return "replace_with_model";
  }
}

Scene generate_scene(const SceneParams& params, RngStream& rng) {
  const int s = params.image_size;
  if (s <= 0 || s % 16 != 0)
    throw std::invalid_argument("image_size must be a positive multiple of 16");

  const bool inverted = params.domain == DomainPreset::B;
  const double tex_amp =
      inverted ? params.texture_amplitude * 2.5 : params.texture_amplitude;

  BinaryMask truth;
  for (int attempt = 0;; ++attempt) {
    truth = draw_shape(params, rng);
    const std::size_t area = truth.area();
    if (area >= 1 && area <= truth.pixel_count() / 2) break;
    if (attempt > 32)
      throw std::runtime_error("could not generate a valid scene mask");
  }

  const double bg_base = rng.uniform(0.15, 0.3);
  const double fg_base =
      rng.uniform(params.fg_intensity_lo, params.fg_intensity_hi);
  const std::vector<double> texture = texture_field(s, tex_amp, rng);

  Image image(s, s, 1);
  double* plane = image.plane(0);
  for (std::size_t i = 0; i < truth.values.size(); ++i)
    plane[i] = truth.values[i] ? fg_base : bg_base;

  // confounders: foreground-intensity blobs kept out of the mask
  BinaryMask blocked = truth;
  {
    const auto d2 = metrics::squared_edt(truth.values, s, s);
    for (std::size_t i = 0; i < blocked.values.size(); ++i)
      if (d2[i] <= 9.0) blocked.values[i] = 1;  // 3 px clearance
  }
  for (int i = 0; i < params.confounders; ++i) {
    for (int attempt = 0; attempt < 16; ++attempt) {
      const int cy = int(rng.uniform_int(std::uint64_t(s)));
      const int cx = int(rng.uniform_int(std::uint64_t(s)));
      const double r = rng.uniform(s / 16.0, s / 10.0);
      if (blocked.at(cy, cx)) continue;
      BinaryMask blob(s, s);
      rasterize_disk(blob, cy, cx, r);
      bool clear = true;
      for (std::size_t j = 0; j < blob.values.size(); ++j)
        if (blob.values[j] && blocked.values[j]) {
          clear = false;
          break;
        }
      if (!clear) continue;
      for (std::size_t j = 0; j < blob.values.size(); ++j)
        if (blob.values[j]) {
          plane[j] = fg_base;
          blocked.values[j] = 1;
        }
      break;
    }
  }

  for (std::size_t i = 0; i < image.data.size(); ++i)
    plane[i] = quantize8(plane[i] + texture[i]);

  if (inverted)
    for (auto& v : image.data) v = quantize8(1.0 - v);

  return {std::move(image), std::move(truth)};
}

CorruptResult corrupt_label(const BinaryMask& truth, const NoiseParams& noise,
                            RngStream& rng) {
  if (noise.magnitude < 0)
    throw std::invalid_argument("noise magnitude must be >= 0");
  if (noise.mode == NoiseMode::replace_with_model)
    throw std::invalid_argument(
        "replace_with_model noise requires a pretrained model; use the "
        "standardize pipeline");

  const bool applies = rng.bernoulli(noise.apply_probability);
  if (!applies || noise.magnitude == 0)
    return {truth, 1.0};

  const int h = truth.height, w = truth.width;
  const double r = noise.magnitude;
  BinaryMask out(h, w);

  switch (noise.mode) {
    case NoiseMode::dilate: {
      const auto d2 = metrics::squared_edt(truth.values, h, w);
      for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = d2[i] <= r * r ? 1 : 0;
      break;
    }
    case NoiseMode::erode: {
      std::vector<std::uint8_t> bg(truth.values.size());
      for (std::size_t i = 0; i < bg.size(); ++i)
        bg[i] = truth.values[i] ? 0 : 1;
      const auto d2 = metrics::squared_edt(bg, h, w);
      for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = (truth.values[i] && d2[i] > r * r) ? 1 : 0;
      break;
    }
    case NoiseMode::translate: {
      int dy = 0, dx = 0;
      do {
        dy = int(rng.uniform_int(std::uint64_t(2 * noise.magnitude + 1))) -
             noise.magnitude;
        dx = int(rng.uniform_int(std::uint64_t(2 * noise.magnitude + 1))) -
             noise.magnitude;
      } while (dy == 0 && dx == 0);
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const int sy = y - dy, sx = x - dx;
          out.at(y, x) = (sy >= 0 && sy < h && sx >= 0 && sx < w)
                             ? truth.at(sy, sx)
                             : 0;
        }
      }
      break;
    }
    case NoiseMode::drop_region: {
      out = truth;
      std::vector<std::size_t> fg_idx;
      for (std::size_t i = 0; i < truth.values.size(); ++i)
        if (truth.values[i]) fg_idx.push_back(i);
      if (!fg_idx.empty()) {
        const std::size_t pick = fg_idx[rng.uniform_int(fg_idx.size())];
        const int cy = int(pick / w), cx = int(pick % w);
        for (int y = 0; y < h; ++y)
          for (int x = 0; x < w; ++x)
            if (double(y - cy) * (y - cy) + double(x - cx) * (x - cx) <=
                r * r)
              out.at(y, x) = 0;
      }
      break;
    }
    case NoiseMode::add_blob: {
      out = truth;
      const int cy = int(rng.uniform_int(std::uint64_t(h)));
      const int cx = int(rng.uniform_int(std::uint64_t(w)));
      rasterize_disk(out, cy, cx, r);
      break;
    }
    default:
      throw std::logic_error("unreachable noise mode");
  }

  CorruptResult res;
  res.achieved_dsc = metrics::dsc(out, truth);
  res.mask = std::move(out);
  return res;
}

std::vector<NoiseParams> standard_noise_mix() {
  // dilation-heavy on purpose: systematic over-segmentation does not
  // average out under a smoothness prior, unlike zero-mean jitter
  return {{NoiseMode::dilate, 5, 1.0},
          {NoiseMode::dilate, 4, 1.0},
          {NoiseMode::translate, 7, 1.0},
          {NoiseMode::dilate, 5, 1.0},
          {NoiseMode::erode, 3, 1.0}};
}

void build_benchmark(const std::filesystem::path& out_dir,
                     const BenchmarkSpec& spec) {
  if (spec.hq_fraction <= 0.0 || spec.hq_fraction > 1.0)
    throw std::invalid_argument("hq_fraction must be in (0, 1]");
  RngStream root = seeded_rng(spec.seed);

  const int n_hq = int(std::lround(spec.hq_fraction * spec.n_train));

  Dataset train;
  train.split = Split::train;
  for (int i = 0; i < spec.n_train; ++i) {
    RngStream scene_rng = root.split("train-scene", std::uint64_t(i));
    Scene scene = generate_scene(spec.scene, scene_rng);
    Sample s;
    s.id = "tr" + std::to_string(i);
    s.image = std::move(scene.image);
    s.truth = scene.truth;
    if (i < n_hq) {
      s.quality = Quality::HQ;
      s.label = scene.truth;
    } else {
      s.quality = Quality::LQ;
      RngStream noise_rng = root.split("train-noise", std::uint64_t(i));
      const NoiseParams& np =
          spec.noise_mix.empty()
              ? spec.noise
              : spec.noise_mix[std::size_t(i - n_hq) % spec.noise_mix.size()];
      s.label = corrupt_label(scene.truth, np, noise_rng).mask;
    }
    train.samples.push_back(std::move(s));
  }
  save_dataset(out_dir / "train", train);

  Dataset test;
  test.split = Split::test;
  for (int i = 0; i < spec.n_test; ++i) {
    RngStream scene_rng = root.split("test-scene", std::uint64_t(i));
    Scene scene = generate_scene(spec.scene, scene_rng);
    Sample s;
    s.id = "te" + std::to_string(i);
    s.image = std::move(scene.image);
    s.label = std::move(scene.truth);
    s.quality = Quality::HQ;
    test.samples.push_back(std::move(s));
  }
  save_dataset(out_dir / "test", test);
}

}  // namespace aide::synth
