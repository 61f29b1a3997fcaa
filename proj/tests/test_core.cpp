#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "aide/config.hpp"
#include "aide/manifest.hpp"
#include "aide/pgm.hpp"
#include "aide/rng.hpp"
#include "aide/types.hpp"

using namespace aide;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("aide_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("identical seeds yield identical streams") {
  RngStream a = seeded_rng(7);
  RngStream b = seeded_rng(7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream c = seeded_rng(7);
  RngStream d = seeded_rng(8);
  bool all_equal = true;
  for (int i = 0; i < 100; ++i)
    if (c.next_u64() != d.next_u64()) all_equal = false;
  CHECK_FALSE(all_equal);
}

TEST_CASE("split streams are independent and reproducible") {
  RngStream root = seeded_rng(42);
  RngStream aug1 = root.split("augment");
  RngStream tr1 = root.split("trainer");
  // splitting is order-independent and does not consume parent draws
  RngStream tr2 = seeded_rng(42).split("trainer");
  RngStream aug2 = seeded_rng(42).split("augment");
  for (int i = 0; i < 50; ++i) {
    CHECK(aug1.next_u64() == aug2.next_u64());
    CHECK(tr1.next_u64() == tr2.next_u64());
  }
  CHECK(seeded_rng(42).split("augment").next_u64() !=
        seeded_rng(42).split("trainer").next_u64());
  CHECK(seeded_rng(42).split("x", 0).next_u64() !=
        seeded_rng(42).split("x", 1).next_u64());
}

TEST_CASE("rng distributions stay in range") {
  RngStream rng = seeded_rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(rng.uniform_int(10) < 10);
  }
  double sum = 0.0;
  for (int i = 0; i < 4000; ++i) sum += rng.normal();
  CHECK(std::abs(sum / 4000.0) < 0.1);
}

TEST_CASE("pgm masks round-trip bit-exactly") {
  const fs::path dir = temp_dir("pgm");
  BinaryMask mask(5, 7);
  mask.at(0, 0) = 1;
  mask.at(4, 6) = 1;
  mask.at(2, 3) = 1;
  write_mask_pgm(dir / "m.pgm", mask);
  CHECK(read_mask_pgm(dir / "m.pgm") == mask);
  // writing again produces identical bytes
  const std::string once = slurp(dir / "m.pgm");
  write_mask_pgm(dir / "m.pgm", mask);
  CHECK(slurp(dir / "m.pgm") == once);
}

TEST_CASE("pgm rejects non-binary mask values") {
  const fs::path dir = temp_dir("pgm_bad");
  PgmImage img;
  img.height = 2;
  img.width = 2;
  img.pixels = {0, 255, 7, 0};
  write_pgm(dir / "bad.pgm", img);
  CHECK_THROWS(read_mask_pgm(dir / "bad.pgm"));
}

TEST_CASE("manifest round-trips byte-for-byte") {
  const fs::path dir = temp_dir("manifest");
  DatasetManifest m;
  m.split = Split::train;
  m.samples.push_back({"s1", {"s1/img0.pgm"}, "s1/label.pgm", Quality::HQ,
                       "s1/truth.pgm"});
  m.samples.push_back({"s2", {"s2/img0.pgm", "s2/img1.pgm"}, std::nullopt,
                       Quality::LQ, std::nullopt});
  save_manifest(dir / "manifest.json", m);
  const DatasetManifest loaded = load_manifest(dir / "manifest.json");
  CHECK(loaded.samples.size() == 2);
  CHECK(loaded.samples[0].quality == Quality::HQ);
  CHECK(loaded.samples[1].image_paths.size() == 2);
  CHECK_FALSE(loaded.samples[1].label_path.has_value());

  const std::string once = slurp(dir / "manifest.json");
  save_manifest(dir / "manifest.json", loaded);
  CHECK(slurp(dir / "manifest.json") == once);
}

TEST_CASE("manifest rejects duplicate ids") {
  const fs::path dir = temp_dir("manifest_dup");
  std::ofstream(dir / "manifest.json")
      << R"({"split":"train","samples":[
           {"id":"s1","images":["a.pgm"],"quality":"LQ"},
           {"id":"s1","images":["b.pgm"],"quality":"LQ"}]})";
  CHECK_THROWS_WITH_AS(load_manifest(dir / "manifest.json"),
                       doctest::Contains("duplicate sample_id"),
                       std::runtime_error);
}

TEST_CASE("dataset load validates dimensions and content") {
  const fs::path dir = temp_dir("dataset");
  Dataset ds;
  ds.split = Split::train;
  Sample s;
  s.id = "a";
  s.image = Image(4, 4, 1);
  s.image.plane(0)[5] = 100 / 255.0;
  BinaryMask label(4, 4);
  label.at(1, 1) = 1;
  s.label = label;
  s.quality = Quality::HQ;
  ds.samples.push_back(s);
  save_dataset(dir, ds);

  const Dataset loaded = load_dataset(dir / "manifest.json");
  REQUIRE(loaded.samples.size() == 1);
  CHECK(loaded.samples[0].quality == Quality::HQ);
  CHECK(*loaded.samples[0].label == label);
  CHECK(loaded.samples[0].image.plane(0)[5] == doctest::Approx(100 / 255.0));

  // mismatched label dimensions must be rejected
  write_mask_pgm(dir / "a" / "label.pgm", BinaryMask(8, 8));
  CHECK_THROWS_WITH_AS(load_dataset(dir / "manifest.json"),
                       doctest::Contains("dimension mismatch"),
                       std::runtime_error);

  CHECK_THROWS(load_manifest(dir / "missing" / "manifest.json"));
}

TEST_CASE("HQ label records refuse rewrites") {
  LabelRecord rec;
  rec.sample_id = "s";
  rec.mask = BinaryMask(2, 2);
  rec.quality = Quality::HQ;
  CHECK_THROWS_AS(rec.set_mask(BinaryMask(2, 2),
                               LabelSource::global_correction, 3),
                  std::logic_error);
  rec.quality = Quality::LQ;
  rec.set_mask(BinaryMask(2, 2), LabelSource::global_correction, 3);
  CHECK(rec.corrected_at_epochs == std::vector<int>{3});
}

TEST_CASE("probmap validates normalization and binarizes by argmax") {
  ProbMap p(2, 2);
  CHECK_NOTHROW(p.validate());
  p.fg()[0] = 0.9;
  p.bg()[0] = 0.1;
  p.fg()[1] = 0.5;
  p.bg()[1] = 0.5;
  const BinaryMask m = p.binarize();
  CHECK(m.at(0, 0) == 1);
  CHECK(m.at(0, 1) == 0);  // exact tie goes to background

  p.fg()[2] = 0.8;  // now channel sum != 1
  CHECK_THROWS(p.validate());
}

TEST_CASE("config defaults follow the documented values") {
  TrainConfig cfg;
  CHECK(cfg.alpha == 1.0);
  CHECK(cfg.epsilon == 1.0);
  CHECK(cfg.correction_ratio == 0.25);
  CHECK(cfg.select_fraction == 0.5);
  CHECK(cfg.update_period == 10);
  CHECK(cfg.lambda_max == 1.0);
  CHECK(cfg.warmup_epochs == 20);
  CHECK(cfg.sharpen_form == SharpenForm::softmax);
  CHECK(cfg.optimizer == OptimizerKind::sgd);
  CHECK(cfg.arch.base_channels == 16);
  CHECK(cfg.arch.depth == 5);
}

TEST_CASE("config round-trips through json") {
  const fs::path dir = temp_dir("config");
  TrainConfig cfg;
  cfg.seed = 99;
  cfg.total_epochs = 12;
  cfg.warmup_epochs = 5;
  cfg.learning_rate = 0.001;
  cfg.optimizer = OptimizerKind::adam;
  cfg.sharpen_form = SharpenForm::power;
  cfg.arch.base_channels = 8;
  cfg.arch.modality_streams = 2;
  save_config(dir / "cfg.json", cfg);
  const TrainConfig loaded = load_config(dir / "cfg.json");
  CHECK(loaded.seed == 99);
  CHECK(loaded.total_epochs == 12);
  CHECK(loaded.warmup_epochs == 5);
  CHECK(loaded.learning_rate == 0.001);
  CHECK(loaded.optimizer == OptimizerKind::adam);
  CHECK(loaded.sharpen_form == SharpenForm::power);
  CHECK(loaded.arch.base_channels == 8);
  CHECK(loaded.arch.modality_streams == 2);
}

TEST_CASE("config validation rejects bad values") {
  TrainConfig cfg;
  cfg.select_fraction = 0.0;
  CHECK_THROWS(cfg.validate());
  cfg = TrainConfig{};
  cfg.correction_ratio = 1.0;
  CHECK_THROWS(cfg.validate());
  cfg = TrainConfig{};
  cfg.warmup_epochs = cfg.total_epochs + 1;
  CHECK_THROWS(cfg.validate());
  cfg = TrainConfig{};
  cfg.sharpen_temperature = 0.0;
  CHECK_THROWS(cfg.validate());
}
