#include "aide/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace aide::metrics {

namespace {

void require_same_dims(const BinaryMask& a, const BinaryMask& b) {
  if (a.height != b.height || a.width != b.width)
    throw std::invalid_argument("mask dimension mismatch");
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1-D lower envelope of parabolas (Felzenszwalb & Huttenlocher).
void edt_1d(const std::vector<double>& f, std::vector<double>& d,
            std::vector<int>& v, std::vector<double>& z, double spacing) {
  const int n = int(f.size());
  const double s2 = spacing * spacing;
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    if (f[q] == kInf) continue;
    while (true) {
      if (f[v[k]] == kInf) {
        // previous vertex never contributes
        if (k == 0) {
          v[0] = q;
          z[0] = -kInf;
          z[1] = kInf;
          break;
        }
        --k;
        continue;
      }
      const double s =
          ((f[q] + s2 * q * q) - (f[v[k]] + s2 * v[k] * v[k])) /
          (2.0 * s2 * q - 2.0 * s2 * v[k]);
      if (s <= z[k]) {
        --k;
        continue;
      }
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = kInf;
      break;
    }
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    if (f[v[0]] == kInf) {
      d[q] = kInf;
      continue;
    }
    while (z[k + 1] < q) ++k;
    const double dq = spacing * (q - v[k]);
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

std::vector<double> squared_edt(const std::vector<std::uint8_t>& on,
                                int height, int width, PixelSpacing spacing) {
  std::vector<double> dist(size_t(height) * width);
  for (std::size_t i = 0; i < dist.size(); ++i)
    dist[i] = on[i] ? 0.0 : kInf;

  // columns
  {
    std::vector<double> f(height), d(height), z(height + 1);
    std::vector<int> v(height);
    for (int c = 0; c < width; ++c) {
      for (int r = 0; r < height; ++r) f[r] = dist[size_t(r) * width + c];
      edt_1d(f, d, v, z, spacing.row);
      for (int r = 0; r < height; ++r) dist[size_t(r) * width + c] = d[r];
    }
  }
  // rows
  {
    std::vector<double> f(width), d(width), z(width + 1);
    std::vector<int> v(width);
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) f[c] = dist[size_t(r) * width + c];
      edt_1d(f, d, v, z, spacing.col);
      for (int c = 0; c < width; ++c) dist[size_t(r) * width + c] = d[c];
    }
  }
  return dist;
}

ConfusionCounts confusion_counts(const BinaryMask& pred,
                                 const BinaryMask& ref) {
  require_same_dims(pred, ref);
  ConfusionCounts c;
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    const bool p = pred.values[i] != 0;
    const bool r = ref.values[i] != 0;
    if (p && r) ++c.tp;
    else if (p && !r) ++c.fp;
    else if (!p && r) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double dsc(const BinaryMask& pred, const BinaryMask& ref) {
  const ConfusionCounts c = confusion_counts(pred, ref);
  const std::size_t denom = 2 * c.tp + c.fp + c.fn;
  if (denom == 0) return 1.0;  // both empty
  return 2.0 * double(c.tp) / double(denom);
}

double ravd(const BinaryMask& pred, const BinaryMask& ref) {
  const ConfusionCounts c = confusion_counts(pred, ref);
  if (c.tp + c.fn == 0)
    throw std::domain_error("undefined RAVD: empty reference mask");
  return (double(c.fp) - double(c.fn)) / double(c.tp + c.fn);
}

std::vector<BoundaryPoint> extract_boundary(const BinaryMask& mask) {
  std::vector<BoundaryPoint> pts;
  const int h = mask.height, w = mask.width;
  auto bg_or_outside = [&](int r, int c) {
    if (r < 0 || r >= h || c < 0 || c >= w) return true;
    return mask.at(r, c) == 0;
  };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (mask.at(r, c) == 0) continue;
      if (bg_or_outside(r - 1, c) || bg_or_outside(r + 1, c) ||
          bg_or_outside(r, c - 1) || bg_or_outside(r, c + 1))
        pts.push_back({r, c});
    }
  }
  return pts;
}

namespace {

// Directed stats: sum and max of distances from a's boundary points to the
// nearest boundary point of b, via the EDT of b's boundary set.
struct DirectedStats {
  double sum = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

DirectedStats directed_surface_stats(const std::vector<BoundaryPoint>& from,
                                     const std::vector<BoundaryPoint>& to,
                                     int height, int width,
                                     PixelSpacing spacing) {
  std::vector<std::uint8_t> on(size_t(height) * width, 0);
  for (const auto& p : to) on[size_t(p.row) * width + p.col] = 1;
  const std::vector<double> d2 = squared_edt(on, height, width, spacing);
  DirectedStats s;
  for (const auto& p : from) {
    const double d = std::sqrt(d2[size_t(p.row) * width + p.col]);
    s.sum += d;
    if (d > s.max) s.max = d;
    ++s.count;
  }
  return s;
}

std::pair<DirectedStats, DirectedStats> surface_stats(const BinaryMask& pred,
                                                      const BinaryMask& ref,
                                                      PixelSpacing spacing) {
  require_same_dims(pred, ref);
  if (pred.empty_fg() || ref.empty_fg())
    throw std::domain_error("undefined surface distance: empty mask");
  const auto sp = extract_boundary(pred);
  const auto sr = extract_boundary(ref);
  return {directed_surface_stats(sp, sr, pred.height, pred.width, spacing),
          directed_surface_stats(sr, sp, pred.height, pred.width, spacing)};
}

}  // namespace

double assd(const BinaryMask& pred, const BinaryMask& ref,
            PixelSpacing spacing) {
  const auto [fwd, bwd] = surface_stats(pred, ref, spacing);
  return (fwd.sum + bwd.sum) / double(fwd.count + bwd.count);
}

double mssd(const BinaryMask& pred, const BinaryMask& ref,
            PixelSpacing spacing) {
  const auto [fwd, bwd] = surface_stats(pred, ref, spacing);
  return std::max(fwd.max, bwd.max);
}

BinaryMask largest_connected_component(const BinaryMask& mask) {
  const int h = mask.height, w = mask.width;
  std::vector<int> label(size_t(h) * w, -1);
  std::vector<std::size_t> stack;
  int best_label = -1;
  std::size_t best_size = 0;
  int next_label = 0;

  for (std::size_t seed = 0; seed < mask.values.size(); ++seed) {
    if (mask.values[seed] == 0 || label[seed] >= 0) continue;
    const int cur = next_label++;
    std::size_t size = 0;
    stack.push_back(seed);
    label[seed] = cur;
    while (!stack.empty()) {
      const std::size_t idx = stack.back();
      stack.pop_back();
      ++size;
      const int r = int(idx / w), c = int(idx % w);
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const int nr = r + dr, nc = c + dc;
          if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
          const std::size_t nidx = size_t(nr) * w + nc;
          if (mask.values[nidx] == 0 || label[nidx] >= 0) continue;
          label[nidx] = cur;
          stack.push_back(nidx);
        }
      }
    }
    // strict > keeps the earliest-seeded component on ties
    if (size > best_size) {
      best_size = size;
      best_label = cur;
    }
  }

  BinaryMask out(h, w);
  if (best_label >= 0) {
    for (std::size_t i = 0; i < out.values.size(); ++i)
      out.values[i] = label[i] == best_label ? 1 : 0;
  }
  return out;
}

std::vector<double> default_thresholds() {
  std::vector<double> t;
  for (int i = 1; i <= 9; ++i) t.push_back(i / 10.0);
  return t;
}

double multi_threshold_dsc(const ProbMap& pred,
                           const std::vector<double>& ref_continuous,
                           int height, int width,
                           const std::vector<double>& thresholds) {
  if (pred.height != height || pred.width != width ||
      ref_continuous.size() != size_t(height) * width)
    throw std::invalid_argument("multi_threshold_dsc dimension mismatch");
  if (thresholds.empty())
    throw std::invalid_argument("multi_threshold_dsc needs thresholds");
  const double* fg = pred.fg();
  double total = 0.0;
  for (const double t : thresholds) {
    BinaryMask bp(height, width), br(height, width);
    for (std::size_t i = 0; i < bp.values.size(); ++i) {
      bp.values[i] = fg[i] >= t ? 1 : 0;
      br.values[i] = ref_continuous[i] >= t ? 1 : 0;
    }
    total += dsc(bp, br);
  }
  return total / double(thresholds.size());
}

}  // namespace aide::metrics
