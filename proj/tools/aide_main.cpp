// aide: synthetic benchmarks, task standardization, cross-model
// self-correcting training, evaluation, experiments, and plots.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "aide/checkpoint.hpp"
#include "aide/config.hpp"
#include "aide/experiment.hpp"
#include "aide/manifest.hpp"
#include "aide/metrics.hpp"
#include "aide/pgm.hpp"
#include "aide/standardize.hpp"
#include "aide/synth.hpp"
#include "aide/trainer.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_synth(const std::string& out, int n_train, int n_test, double hq_frac,
              const std::string& noise_mode, int noise_mag, double apply_prob,
              std::uint64_t seed, const std::string& domain, int image_size,
              const std::string& shape, int confounders, double texture) {
  aide::synth::BenchmarkSpec spec;
  spec.n_train = n_train;
  spec.n_test = n_test;
  spec.hq_fraction = hq_frac;
  spec.seed = seed;
  spec.scene.image_size = image_size;
  spec.scene.confounders = confounders;
  spec.scene.texture_amplitude = texture;
  if (shape == "disk") spec.scene.shape = aide::synth::ShapeFamily::disk;
  else if (shape == "ellipse")
    spec.scene.shape = aide::synth::ShapeFamily::ellipse;
  else if (shape == "blob")
    spec.scene.shape = aide::synth::ShapeFamily::blob_union;
  else throw std::invalid_argument("unknown shape: " + shape);
  if (domain == "A") spec.scene.domain = aide::synth::DomainPreset::A;
  else if (domain == "B") spec.scene.domain = aide::synth::DomainPreset::B;
  else throw std::invalid_argument("domain must be A or B");

  if (noise_mode == "mix") {
    spec.noise_mix = aide::synth::standard_noise_mix();
    for (auto& n : spec.noise_mix) n.apply_probability = apply_prob;
  } else {
    spec.noise.mode = aide::synth::parse_noise_mode(noise_mode);
    spec.noise.magnitude = noise_mag;
    spec.noise.apply_probability = apply_prob;
  }
  aide::synth::build_benchmark(out, spec);
  std::cout << "wrote benchmark to " << out << "\n";
  return 0;
}

int cmd_standardize(const std::string& mode, const std::string& labeled,
                    const std::string& unlabeled, const std::string& out,
                    const std::string& config_path) {
  aide::TrainConfig cfg = aide::load_config(config_path);
  cfg.task_mode =
      mode == "ssl" ? aide::TaskMode::SSL : aide::TaskMode::UDA;
  const aide::Dataset labeled_ds =
      aide::load_dataset(fs::path(labeled) / "manifest.json");
  const aide::Dataset unlabeled_ds =
      aide::load_dataset(fs::path(unlabeled) / "manifest.json");
  for (const auto& s : labeled_ds.samples)
    if (!s.label)
      throw std::runtime_error("labeled dataset has unlabeled sample: " +
                               s.id);

  auto model = aide::standardize::pretrain_baseline(labeled_ds, cfg);
  // strip any labels the unlabeled side may carry before pseudo-labeling
  aide::Dataset stripped = unlabeled_ds;
  for (auto& s : stripped.samples) {
    s.label.reset();
    s.quality = aide::Quality::LQ;
  }
  const auto lq = aide::standardize::generate_lq_labels(*model, stripped);
  const aide::Dataset merged =
      aide::standardize::build_nll_dataset(labeled_ds, stripped, lq);
  aide::save_dataset(fs::path(out) / "train", merged);
  std::cout << "standardized " << merged.samples.size() << " samples ("
            << labeled_ds.samples.size() << " HQ + " << lq.size()
            << " LQ) to " << out << "\n";
  return 0;
}

int cmd_train(const std::string& config_path, const std::string& data,
              const std::string& out) {
  const aide::TrainConfig cfg = aide::load_config(config_path);
  const aide::Dataset train_set =
      aide::load_dataset(fs::path(data) / "train" / "manifest.json");
  std::optional<aide::Dataset> test_set;
  if (fs::exists(fs::path(data) / "test" / "manifest.json"))
    test_set = aide::load_dataset(fs::path(data) / "test" / "manifest.json");

  aide::trainer::TrainResult result = aide::trainer::train(
      cfg, train_set, test_set ? &*test_set : nullptr);

  fs::create_directories(out);
  aide::exp::write_metrics_csv(fs::path(out) / "metrics.csv", result.report);
  aide::net::save_checkpoint(fs::path(out) / "best_n1.ckpt",
                             *result.best_n1);
  aide::net::save_checkpoint(fs::path(out) / "best_n2.ckpt",
                             *result.best_n2);
  for (const char* which : {"n1", "n2"}) {
    const auto& records = std::string(which) == "n1" ? result.labels_n1
                                                     : result.labels_n2;
    const fs::path dir = fs::path(out) / "labels_final" / which;
    fs::create_directories(dir);
    for (const auto& r : records)
      aide::write_mask_pgm(dir / (r.sample_id + ".pgm"), r.mask);
  }
  if (test_set) {
    for (const char* which : {"n1", "n2"}) {
      auto& model = std::string(which) == "n1" ? *result.best_n1
                                               : *result.best_n2;
      const fs::path dir = fs::path(out) / "pred_test" / which;
      fs::create_directories(dir);
      const auto masks =
          aide::trainer::predict_masks(model, *test_set, cfg.batch_size);
      for (std::size_t i = 0; i < masks.size(); ++i)
        aide::write_mask_pgm(dir / (test_set->samples[i].id + ".pgm"),
                             masks[i]);
    }
  }
  std::cout << "best epoch " << result.best_epoch << " (train DSC "
            << result.best_dsc_train << "); outputs in " << out << "\n";
  return 0;
}

int cmd_eval(const std::string& pred_dir, const std::string& ref_dir,
             const std::string& report, bool pp, double spacing_row,
             double spacing_col) {
  std::vector<fs::path> ref_files;
  for (const auto& entry : fs::directory_iterator(ref_dir))
    if (entry.path().extension() == ".pgm") ref_files.push_back(entry.path());
  std::sort(ref_files.begin(), ref_files.end());
  if (ref_files.empty())
    throw std::runtime_error("no .pgm masks in reference dir: " + ref_dir);

  const aide::metrics::PixelSpacing spacing{spacing_row, spacing_col};
  std::ofstream out(report);
  if (!out) throw std::runtime_error("cannot write report: " + report);
  out << "sample_id,dsc,ravd,assd,mssd\n";
  for (const auto& ref_path : ref_files) {
    const std::string id = ref_path.stem().string();
    const fs::path pred_path = fs::path(pred_dir) / ref_path.filename();
    if (!fs::exists(pred_path))
      throw std::runtime_error("missing prediction for sample: " + id);
    const aide::BinaryMask ref = aide::read_mask_pgm(ref_path);
    aide::BinaryMask pred = aide::read_mask_pgm(pred_path);
    if (pp) pred = aide::metrics::largest_connected_component(pred);
    out << id << ',' << aide::metrics::dsc(pred, ref) << ',';
    if (!ref.empty_fg())
      out << 100.0 * aide::metrics::ravd(pred, ref);
    out << ',';
    if (!ref.empty_fg() && !pred.empty_fg())
      out << aide::metrics::assd(pred, ref, spacing) << ','
          << aide::metrics::mssd(pred, ref, spacing);
    else
      out << ',';
    out << '\n';
  }
  std::cout << "wrote " << report << "\n";
  return 0;
}

int cmd_experiment(const std::string& spec_path, const std::string& out) {
  const aide::exp::ExperimentSpec spec =
      aide::exp::load_experiment_spec(spec_path);
  const aide::exp::ExperimentResult result =
      aide::exp::run_experiment(spec, out);
  for (const auto& run : result.runs)
    std::cout << run.arm << " seed " << run.seed << ": test DSC "
              << run.pp.dsc << " (pp) / " << run.np.dsc << " (np)\n";
  std::cout << "summary in " << (fs::path(out) / "summary.csv").string()
            << "\n";
  return 0;
}

int cmd_plot(const std::string& metrics, const std::string& out) {
  aide::exp::emit_plot(metrics, out);
  std::cout << "wrote " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AIDE segmentation training framework"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic benchmark");
  std::string sy_out, sy_noise = "mix", sy_domain = "A", sy_shape = "blob";
  int sy_train = 100, sy_test = 50, sy_mag = 2, sy_size = 64, sy_conf = 2;
  double sy_hq = 0.1, sy_prob = 1.0, sy_tex = 0.08;
  std::uint64_t sy_seed = 0;
  synth->add_option("--out", sy_out)->required();
  synth->add_option("--n-train", sy_train);
  synth->add_option("--n-test", sy_test);
  synth->add_option("--hq-frac", sy_hq);
  synth->add_option("--noise-mode", sy_noise,
                    "dilate|erode|translate|drop_region|add_blob|mix");
  synth->add_option("--noise-mag", sy_mag);
  synth->add_option("--apply-prob", sy_prob);
  synth->add_option("--seed", sy_seed);
  synth->add_option("--domain", sy_domain, "A|B");
  synth->add_option("--image-size", sy_size);
  synth->add_option("--shape", sy_shape, "disk|ellipse|blob");
  synth->add_option("--confounders", sy_conf);
  synth->add_option("--texture", sy_tex);

  // standardize
  auto* stand = app.add_subcommand("standardize",
                                   "pretrain + pseudo-label into NLL data");
  std::string st_mode, st_labeled, st_unlabeled, st_out, st_cfg;
  stand->add_option("--mode", st_mode, "ssl|uda")
      ->required()
      ->check(CLI::IsMember({"ssl", "uda"}));
  stand->add_option("--labeled", st_labeled)->required();
  stand->add_option("--unlabeled", st_unlabeled)->required();
  stand->add_option("--out", st_out)->required();
  stand->add_option("--config", st_cfg)->required();

  // train
  auto* train = app.add_subcommand("train", "run cross-model training");
  std::string tr_cfg, tr_data, tr_out;
  train->add_option("--config", tr_cfg)->required();
  train->add_option("--data", tr_data)->required();
  train->add_option("--out", tr_out)->required();

  // eval
  auto* eval = app.add_subcommand("eval", "score prediction masks");
  std::string ev_pred, ev_ref, ev_report;
  bool ev_pp = false;
  double ev_sr = 1.0, ev_sc = 1.0;
  eval->add_option("--pred", ev_pred)->required();
  eval->add_option("--ref", ev_ref)->required();
  eval->add_option("--report", ev_report)->required();
  eval->add_flag("--pp", ev_pp, "largest-component post-processing");
  eval->add_option("--spacing-row", ev_sr);
  eval->add_option("--spacing-col", ev_sc);

  // experiment
  auto* expcmd = app.add_subcommand("experiment", "run arms x seeds");
  std::string ex_spec, ex_out;
  expcmd->add_option("--spec", ex_spec)->required();
  expcmd->add_option("--out", ex_out)->required();

  // plot
  auto* plot = app.add_subcommand("plot", "DSC-vs-epoch SVG chart");
  std::string pl_metrics, pl_out;
  plot->add_option("--metrics", pl_metrics)->required();
  plot->add_option("--out", pl_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed())
      return cmd_synth(sy_out, sy_train, sy_test, sy_hq, sy_noise, sy_mag,
                       sy_prob, sy_seed, sy_domain, sy_size, sy_shape,
                       sy_conf, sy_tex);
    if (stand->parsed())
      return cmd_standardize(st_mode, st_labeled, st_unlabeled, st_out,
                             st_cfg);
    if (train->parsed()) return cmd_train(tr_cfg, tr_data, tr_out);
    if (eval->parsed())
      return cmd_eval(ev_pred, ev_ref, ev_report, ev_pp, ev_sr, ev_sc);
    if (expcmd->parsed()) return cmd_experiment(ex_spec, ex_out);
    if (plot->parsed()) return cmd_plot(pl_metrics, pl_out);
  } catch (const std::exception& e) {
    std::cerr << "aide: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
