#include "aide/augment.hpp"

#include <array>
#include <stdexcept>

#include "aide/losses.hpp"

namespace aide::augment {

namespace {

// Generic plane transform: rotation (clockwise quarter turns), then
// hflip, then vflip. Computes, for each destination pixel, the source
// pixel it came from.
struct PlaneMap {
  int out_h, out_w;
  // src = (r, c) for dst index
  int src_r(int r, int c) const {
    return sr0 + r * srr + c * src_;
  }
  int src_c(int r, int c) const {
    return sc0 + r * scr + c * scc;
  }
  int sr0, srr, src_, sc0, scr, scc;
};

// dst(r,c) = src(map...). Built by composing the three stages on index
// algebra; each stage is an affine permutation of coordinates.
PlaneMap make_map(const TransformDescriptor& t, int in_h, int in_w) {
  // start with identity: src = dst
  int h = in_h, w = in_w;
  // Represent current mapping dst->src as affine:
  // src_r = a0 + a1*r + a2*c ; src_c = b0 + b1*r + b2*c
  long a0 = 0, a1 = 1, a2 = 0, b0 = 0, b1 = 0, b2 = 1;

  auto compose = [&](long c0, long c1, long c2, long d0, long d1, long d2) {
    // new dst -> mid: mid_r = c0 + c1*r + c2*c, mid_c = d0 + d1*r + d2*c
    // existing mid -> src applied after
    const long na0 = a0 + a1 * c0 + a2 * d0;
    const long na1 = a1 * c1 + a2 * d1;
    const long na2 = a1 * c2 + a2 * d2;
    const long nb0 = b0 + b1 * c0 + b2 * d0;
    const long nb1 = b1 * c1 + b2 * d1;
    const long nb2 = b1 * c2 + b2 * d2;
    a0 = na0; a1 = na1; a2 = na2; b0 = nb0; b1 = nb1; b2 = nb2;
  };

  // One clockwise quarter turn: out is w x h, dst(r,c) = src(h-1-c, r).
  for (int q = 0; q < t.rot_quarters % 4; ++q) {
    compose(h - 1, 0, -1, 0, 1, 0);
    std::swap(h, w);
  }
  // hflip: dst(r,c) = src(r, w-1-c)
  if (t.hflip) compose(0, 1, 0, w - 1, 0, -1);
  // vflip: dst(r,c) = src(h-1-r, c)
  if (t.vflip) compose(h - 1, -1, 0, 0, 0, 1);

  PlaneMap m;
  m.out_h = h;
  m.out_w = w;
  m.sr0 = int(a0); m.srr = int(a1); m.src_ = int(a2);
  m.sc0 = int(b0); m.scr = int(b1); m.scc = int(b2);
  return m;
}

void apply_plane(const PlaneMap& m, const double* src, int in_w,
                 double* dst) {
  for (int r = 0; r < m.out_h; ++r)
    for (int c = 0; c < m.out_w; ++c)
      dst[std::size_t(r) * m.out_w + c] =
          src[std::size_t(m.src_r(r, c)) * in_w + m.src_c(r, c)];
}

void apply_plane_u8(const PlaneMap& m, const std::uint8_t* src, int in_w,
                    std::uint8_t* dst) {
  for (int r = 0; r < m.out_h; ++r)
    for (int c = 0; c < m.out_w; ++c)
      dst[std::size_t(r) * m.out_w + c] =
          src[std::size_t(m.src_r(r, c)) * in_w + m.src_c(r, c)];
}

}  // namespace

TransformDescriptor sample_transform(RngStream& rng) {
  TransformDescriptor t;
  t.rot_quarters = int(rng.uniform_int(4));
  t.hflip = rng.uniform_int(2) != 0;
  t.vflip = rng.uniform_int(2) != 0;
  return t;
}

bool is_identity_action(const TransformDescriptor& t) {
  // rot180 + both flips is also the identity action
  if (t.rot_quarters == 0 && !t.hflip && !t.vflip) return true;
  return t.rot_quarters == 2 && t.hflip && t.vflip;
}

TransformDescriptor inverse(const TransformDescriptor& t) {
  // Search the canonical 8 descriptors for the one whose composition with
  // t fixes a non-symmetric marker grid. Exact by construction.
  BinaryMask marker(2, 4);
  for (std::size_t i = 0; i < marker.values.size(); ++i)
    marker.values[i] = (i == 0 || i == 3 || i == 5) ? 1 : 0;
  const BinaryMask moved = apply(t, marker);
  for (int rot = 0; rot < 4; ++rot) {
    for (int flip = 0; flip < 2; ++flip) {
      TransformDescriptor cand{rot, flip != 0, false};
      if (apply(cand, moved) == marker) return cand;
    }
  }
  throw std::logic_error("no inverse found in dihedral group");
}

BinaryMask apply(const TransformDescriptor& t, const BinaryMask& grid) {
  const PlaneMap m = make_map(t, grid.height, grid.width);
  BinaryMask out(m.out_h, m.out_w);
  apply_plane_u8(m, grid.values.data(), grid.width, out.values.data());
  return out;
}

Image apply(const TransformDescriptor& t, const Image& grid) {
  const PlaneMap m = make_map(t, grid.height, grid.width);
  Image out(m.out_h, m.out_w, grid.modalities);
  for (int ch = 0; ch < grid.modalities; ++ch)
    apply_plane(m, grid.plane(ch), grid.width, out.plane(ch));
  return out;
}

ProbMap apply(const TransformDescriptor& t, const ProbMap& grid) {
  const PlaneMap m = make_map(t, grid.height, grid.width);
  ProbMap out(m.out_h, m.out_w);
  apply_plane(m, grid.bg(), grid.width, out.bg());
  apply_plane(m, grid.fg(), grid.width, out.fg());
  return out;
}

ProbMap distill_pseudo_label(const ForwardFn& forward, const Image& image,
                             int k, double temperature, SharpenForm form,
                             RngStream& rng) {
  if (k < 1) throw std::invalid_argument("distill: K must be >= 1");
  ProbMap mean(image.height, image.width);
  std::fill(mean.data.begin(), mean.data.end(), 0.0);
  for (int i = 0; i < k; ++i) {
    const TransformDescriptor t = sample_transform(rng);
    const Image aug = apply(t, image);
    const ProbMap pred = forward(aug);
    if (pred.height != aug.height || pred.width != aug.width)
      throw std::runtime_error("distill: model output shape mismatch");
    const ProbMap aligned = apply(inverse(t), pred);
    for (std::size_t j = 0; j < mean.data.size(); ++j)
      mean.data[j] += aligned.data[j];
  }
  const double inv_k = 1.0 / double(k);
  for (auto& v : mean.data) v *= inv_k;
  return losses::sharpen(mean, temperature, form);
}

}  // namespace aide::augment
