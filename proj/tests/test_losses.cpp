#include <doctest.h>

#include <cmath>

#include "aide/losses.hpp"
#include "aide/rng.hpp"

using namespace aide;
using namespace aide::losses;

namespace {

ProbMap random_probmap(int h, int w, RngStream& rng, double lo = 0.05,
                       double hi = 0.95) {
  ProbMap p(h, w);
  for (std::size_t i = 0; i < p.plane_size(); ++i) {
    const double f = rng.uniform(lo, hi);
    p.fg()[i] = f;
    p.bg()[i] = 1.0 - f;
  }
  return p;
}

BinaryMask random_mask(int h, int w, RngStream& rng) {
  BinaryMask m(h, w);
  for (auto& v : m.values) v = rng.bernoulli(0.5) ? 1 : 0;
  return m;
}

// Direct transcription of the loss formulas, kept separate from the
// implementation under test.
double dice_formula(const ProbMap& p, const BinaryMask& y, double eps) {
  double inter = 0, sp = 0, sy = 0;
  for (std::size_t i = 0; i < p.plane_size(); ++i) {
    inter += p.fg()[i] * y.values[i];
    sp += p.fg()[i];
    sy += y.values[i];
  }
  return 1.0 - (2.0 * inter + eps) / (sp + sy + eps);
}

double ce_formula(const ProbMap& p, const BinaryMask& y) {
  double acc = 0;
  const std::size_t n = p.plane_size();
  for (std::size_t i = 0; i < n; ++i) {
    const double pf = std::min(std::max(p.fg()[i], 1e-7), 1.0 - 1e-7);
    acc += y.values[i] * std::log(pf) + (1 - y.values[i]) * std::log(1 - pf);
  }
  return -acc / double(n);
}

double mse_formula(const ProbMap& a, const ProbMap& b) {
  double acc = 0;
  for (std::size_t i = 0; i < a.plane_size(); ++i) {
    const double d = a.fg()[i] - b.fg()[i];
    acc += d * d;
  }
  return acc / (2.0 * double(a.plane_size()));
}

// central finite differences on the foreground plane
template <typename Loss>
void check_gradient(ProbMap p, const Loss& value_of,
                    const std::vector<double>& analytic, double rtol) {
  const double h = 1e-6;
  for (std::size_t i = 0; i < p.plane_size(); ++i) {
    const double save = p.fg()[i];
    p.fg()[i] = save + h;
    const double up = value_of(p);
    p.fg()[i] = save - h;
    const double dn = value_of(p);
    p.fg()[i] = save;
    const double fd = (up - dn) / (2 * h);
    CHECK(analytic[i] ==
          doctest::Approx(fd).epsilon(rtol).scale(std::abs(fd) + 1e-8));
  }
}

}  // namespace

TEST_CASE("dice loss values") {
  // exact binary prediction -> 0 for any epsilon
  BinaryMask y(3, 3);
  y.at(0, 0) = 1;
  y.at(1, 2) = 1;
  ProbMap p(3, 3);
  for (std::size_t i = 0; i < 9; ++i) {
    p.fg()[i] = y.values[i];
    p.bg()[i] = 1.0 - y.values[i];
  }
  for (const double eps : {0.1, 1.0, 5.0})
    CHECK(dice_loss(p, y, eps).scalar == doctest::Approx(0.0));

  // all-zero prediction against all-zero reference with eps smoothing
  ProbMap z(2, 2);
  for (std::size_t i = 0; i < 4; ++i) {
    z.fg()[i] = 0;
    z.bg()[i] = 1;
  }
  CHECK(dice_loss(z, BinaryMask(2, 2), 1.0).scalar == doctest::Approx(0.0));

  // random case against the direct formula
  RngStream rng = seeded_rng(10);
  const ProbMap rp = random_probmap(4, 4, rng);
  const BinaryMask ry = random_mask(4, 4, rng);
  CHECK(dice_loss(rp, ry, 1.0).scalar ==
        doctest::Approx(dice_formula(rp, ry, 1.0)).epsilon(1e-12));

  CHECK_THROWS(dice_loss(rp, BinaryMask(2, 2), 1.0));
}

TEST_CASE("cross entropy values") {
  BinaryMask y(2, 2);
  y.at(0, 0) = 1;
  ProbMap exact(2, 2);
  for (std::size_t i = 0; i < 4; ++i) {
    exact.fg()[i] = y.values[i];
    exact.bg()[i] = 1.0 - y.values[i];
  }
  CHECK(cross_entropy_loss(exact, y).scalar <= 1e-6);

  ProbMap half(2, 2);  // constant 0.5 -> ln 2 regardless of reference
  CHECK(cross_entropy_loss(half, y).scalar ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(cross_entropy_loss(half, BinaryMask(2, 2)).scalar ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  RngStream rng = seeded_rng(11);
  const ProbMap rp = random_probmap(4, 4, rng);
  const BinaryMask ry = random_mask(4, 4, rng);
  CHECK(cross_entropy_loss(rp, ry).scalar ==
        doctest::Approx(ce_formula(rp, ry)).epsilon(1e-12));
}

TEST_CASE("seg loss composition") {
  RngStream rng = seeded_rng(12);
  const ProbMap rp = random_probmap(4, 4, rng);
  const BinaryMask ry = random_mask(4, 4, rng);

  // alpha = 0 degenerates to the dice term
  CHECK(seg_loss(rp, ry, 0.0, 1.0).scalar ==
        doctest::Approx(dice_loss(rp, ry, 1.0).scalar).epsilon(1e-12));

  CHECK(seg_loss(rp, ry, 1.0, 1.0).scalar ==
        doctest::Approx(dice_formula(rp, ry, 1.0) + ce_formula(rp, ry))
            .epsilon(1e-12));

  // perfect one-hot prediction: only the clip floor remains
  ProbMap exact(4, 4);
  for (std::size_t i = 0; i < 16; ++i) {
    exact.fg()[i] = ry.values[i];
    exact.bg()[i] = 1.0 - ry.values[i];
  }
  CHECK(seg_loss(exact, ry, 1.0, 1.0).scalar <= 1e-5);
}

TEST_CASE("consistency loss values") {
  RngStream rng = seeded_rng(13);
  const ProbMap a = random_probmap(4, 4, rng);
  CHECK(consistency_loss(a, a).scalar == 0.0);

  ProbMap one(1, 1), zero(1, 1);
  one.fg()[0] = 1.0;
  one.bg()[0] = 0.0;
  zero.fg()[0] = 0.0;
  zero.bg()[0] = 1.0;
  CHECK(consistency_loss(one, zero).scalar == doctest::Approx(0.5));

  const ProbMap b = random_probmap(4, 4, rng);
  CHECK(consistency_loss(a, b).scalar ==
        doctest::Approx(mse_formula(a, b)).epsilon(1e-12));
  CHECK(consistency_loss(a, b).scalar >= 0.0);

  CHECK_THROWS(consistency_loss(a, ProbMap(2, 2)));
}

TEST_CASE("loss gradients match central finite differences") {
  RngStream rng = seeded_rng(14);
  const ProbMap p = random_probmap(4, 4, rng);
  const BinaryMask y = random_mask(4, 4, rng);
  const ProbMap pseudo = random_probmap(4, 4, rng);
  const std::size_t n = p.plane_size();

  auto fg = [&](const ProbMap& q) {
    return std::span<const double>(q.fg(), n);
  };
  auto ref = [&] { return std::span<const std::uint8_t>(y.values); };

  {
    std::vector<double> g(n, 0.0);
    dice_loss_grad(fg(p), ref(), 1.0, 1.0, g);
    check_gradient(p, [&](const ProbMap& q) {
      return dice_loss(fg(q), ref(), 1.0);
    }, g, 1e-4);
  }
  {
    std::vector<double> g(n, 0.0);
    cross_entropy_loss_grad(fg(p), ref(), 1.0, g);
    check_gradient(p, [&](const ProbMap& q) {
      return cross_entropy_loss(fg(q), ref());
    }, g, 1e-4);
  }
  {
    std::vector<double> g(n, 0.0);
    seg_loss_grad(fg(p), ref(), 1.0, 1.0, 1.0, g);
    check_gradient(p, [&](const ProbMap& q) {
      return seg_loss(fg(q), ref(), 1.0, 1.0);
    }, g, 1e-4);
  }
  {
    std::vector<double> g(n, 0.0);
    consistency_loss_grad(fg(p), std::span<const double>(pseudo.fg(), n), 1.0,
                          g);
    check_gradient(p, [&](const ProbMap& q) {
      return consistency_loss(fg(q),
                              std::span<const double>(pseudo.fg(), n));
    }, g, 1e-4);
  }
}

TEST_CASE("improving one wrong pixel never increases the dice loss") {
  RngStream rng = seeded_rng(15);
  for (int trial = 0; trial < 25; ++trial) {
    ProbMap p = random_probmap(4, 4, rng);
    const BinaryMask y = random_mask(4, 4, rng);
    const double before =
        dice_loss(std::span<const double>(p.fg(), 16),
                  std::span<const std::uint8_t>(y.values), 1.0);
    // pick a wrong pixel and set it to the correct probability
    for (std::size_t i = 0; i < 16; ++i) {
      const double target = y.values[i] ? 1.0 : 0.0;
      if (std::abs(p.fg()[i] - target) < 0.25) continue;
      ProbMap q = p;
      q.fg()[i] = target;
      q.bg()[i] = 1.0 - target;
      const double after =
          dice_loss(std::span<const double>(q.fg(), 16),
                    std::span<const std::uint8_t>(y.values), 1.0);
      CHECK(after <= before + 1e-12);
      break;
    }
  }
}

TEST_CASE("sharpen: softmax and power forms") {
  // uniform input is a fixed point of both forms
  ProbMap uni(2, 2);
  for (const auto form : {SharpenForm::softmax, SharpenForm::power}) {
    for (const double t : {0.25, 0.5, 1.0, 2.0}) {
      const ProbMap out = sharpen(uni, t, form);
      for (std::size_t i = 0; i < 4; ++i) {
        CHECK(out.fg()[i] == doctest::Approx(0.5));
        CHECK(out.bg()[i] == doctest::Approx(0.5));
      }
    }
  }

  ProbMap p(1, 1);
  p.fg()[0] = 0.8;
  p.bg()[0] = 0.2;
  // softmax form: exp(0.8/0.5), exp(0.2/0.5) normalized
  const ProbMap s = sharpen(p, 0.5, SharpenForm::softmax);
  const double ef = std::exp(1.6), eb = std::exp(0.4);
  CHECK(s.fg()[0] == doctest::Approx(ef / (ef + eb)).epsilon(1e-10));
  CHECK(s.fg()[0] == doctest::Approx(0.7685).epsilon(1e-3));
  // power form: 0.8^2, 0.2^2 normalized
  const ProbMap w = sharpen(p, 0.5, SharpenForm::power);
  CHECK(w.fg()[0] == doctest::Approx(0.64 / 0.68).epsilon(1e-10));
  CHECK(w.bg()[0] == doctest::Approx(0.04 / 0.68).epsilon(1e-10));

  CHECK_THROWS(sharpen(p, 0.0, SharpenForm::softmax));
  CHECK_THROWS(sharpen(p, -1.0, SharpenForm::power));
}

TEST_CASE("sharpen output is normalized and concentrates as T drops") {
  RngStream rng = seeded_rng(16);
  const ProbMap p = random_probmap(8, 8, rng, 0.05, 0.95);
  for (const auto form : {SharpenForm::softmax, SharpenForm::power}) {
    const ProbMap out = sharpen(p, 0.5, form);
    CHECK_NOTHROW(out.validate());
  }
  // near argmax one-hot at tiny temperature when channels differ enough
  ProbMap q(1, 2);
  q.fg()[0] = 0.6;
  q.bg()[0] = 0.4;
  q.fg()[1] = 0.45;
  q.bg()[1] = 0.55;
  const ProbMap cold = sharpen(q, 1e-3, SharpenForm::softmax);
  CHECK(cold.fg()[0] >= 0.999);
  CHECK(cold.bg()[1] >= 0.999);
}

TEST_CASE("sharpen is permutation-equivariant over channels") {
  RngStream rng = seeded_rng(17);
  ProbMap p = random_probmap(3, 3, rng);
  ProbMap swapped(3, 3);
  for (std::size_t i = 0; i < 9; ++i) {
    swapped.fg()[i] = p.bg()[i];
    swapped.bg()[i] = p.fg()[i];
  }
  for (const auto form : {SharpenForm::softmax, SharpenForm::power}) {
    const ProbMap a = sharpen(p, 0.5, form);
    const ProbMap b = sharpen(swapped, 0.5, form);
    for (std::size_t i = 0; i < 9; ++i) {
      CHECK(a.fg()[i] == doctest::Approx(b.bg()[i]).epsilon(1e-12));
      CHECK(a.bg()[i] == doctest::Approx(b.fg()[i]).epsilon(1e-12));
    }
  }
}
