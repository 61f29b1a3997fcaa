#include "aide/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "aide/checkpoint.hpp"
#include "aide/manifest.hpp"
#include "aide/metrics.hpp"
#include "aide/pgm.hpp"
#include "aide/stats.hpp"
#include "aide/trainer.hpp"

namespace aide::exp {

namespace {

using ordered_json = nlohmann::ordered_json;

void merge_json(ordered_json& base, const ordered_json& overlay) {
  for (const auto& [key, value] : overlay.items()) {
    if (value.is_object() && base.contains(key) && base[key].is_object())
      merge_json(base[key], value);
    else
      base[key] = value;
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::string fmt_opt(const std::optional<double>& v, double scale = 1.0) {
  if (!v) return "";
  return fmt(*v * scale);
}

}  // namespace

Method parse_method(const std::string& s) {
  if (s == "aide") return Method::aide;
  if (s == "fully_supervised") return Method::fully_supervised;
  if (s == "pseudo_label_static") return Method::pseudo_label_static;
  throw std::invalid_argument("unknown method: " + s);
}

const char* to_string(Method m) {
  switch (m) {
    case Method::aide: return "aide";
    case Method::fully_supervised: return "fully_supervised";
    default: return "pseudo_label_static";
  }
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open experiment spec: " + path.string());
  ordered_json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw std::runtime_error("experiment spec parse error: " +
                             std::string(e.what()));
  }

  ExperimentSpec spec;
  spec.dataset_dir = doc.at("dataset").get<std::string>();
  if (doc.contains("seeds"))
    for (const auto& s : doc["seeds"])
      spec.seeds.push_back(s.get<std::uint64_t>());
  if (spec.seeds.empty()) spec.seeds.push_back(0);
  if (doc.contains("ensemble")) spec.ensemble = doc["ensemble"].get<bool>();

  ordered_json base = ordered_json::object();
  if (doc.contains("base_config")) base = doc["base_config"];

  std::set<std::string> names;
  for (const auto& a : doc.at("arms")) {
    Arm arm;
    arm.name = a.at("name").get<std::string>();
    if (!names.insert(arm.name).second)
      throw std::runtime_error("duplicate arm name: " + arm.name);
    arm.method = parse_method(a.at("method").get<std::string>());
    ordered_json cfg = base;
    if (a.contains("config")) merge_json(cfg, a["config"]);
    arm.config = config_from_json_text(cfg.dump());
    spec.arms.push_back(std::move(arm));
  }
  if (doc.contains("t_test_pairs")) {
    for (const auto& p : doc["t_test_pairs"]) {
      if (!p.is_array() || p.size() != 2)
        throw std::runtime_error("t_test_pairs entries must be [a, b]");
      spec.t_test_pairs.emplace_back(p[0].get<std::string>(),
                                     p[1].get<std::string>());
      for (int i = 0; i < 2; ++i)
        if (!names.count(p[std::size_t(i)].get<std::string>()))
          throw std::runtime_error("t_test_pairs references unknown arm");
    }
  }
  return spec;
}

EvalSummary evaluate_predictions(const std::vector<ProbMap>& probs,
                                 const Dataset& test, bool postprocess) {
  if (probs.size() != test.samples.size())
    throw std::invalid_argument("evaluate_predictions: size mismatch");
  EvalSummary s;
  double ravd_sum = 0.0, assd_sum = 0.0, mssd_sum = 0.0;
  std::size_t ravd_n = 0, surf_n = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!test.samples[i].label)
      throw std::runtime_error("test sample missing label: " +
                               test.samples[i].id);
    const BinaryMask& ref = *test.samples[i].label;
    BinaryMask pred = probs[i].binarize();
    if (postprocess) pred = metrics::largest_connected_component(pred);
    const double d = metrics::dsc(pred, ref);
    s.per_sample_dsc.push_back(d);
    if (!ref.empty_fg()) {
      ravd_sum += metrics::ravd(pred, ref);
      ++ravd_n;
      if (!pred.empty_fg()) {
        assd_sum += metrics::assd(pred, ref);
        mssd_sum += metrics::mssd(pred, ref);
        ++surf_n;
      }
    }
  }
  s.dsc = stats::mean(s.per_sample_dsc);
  if (ravd_n) s.ravd = ravd_sum / double(ravd_n);
  if (surf_n) {
    s.assd = assd_sum / double(surf_n);
    s.mssd = mssd_sum / double(surf_n);
  }
  return s;
}

void write_metrics_csv(const std::filesystem::path& path,
                       const MetricsReport& report) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write metrics csv: " + path.string());
  out << "epoch,model_id,split,dsc,ravd,assd,mssd,lambda_q,"
         "n_labels_corrected,train_label_dsc_vs_truth\n";
  for (const auto& r : report.rows) {
    out << r.epoch << ',' << r.model_id << ',' << r.split << ',' << fmt(r.dsc)
        << ',' << fmt_opt(r.ravd, 100.0) << ',' << fmt_opt(r.assd) << ','
        << fmt_opt(r.mssd) << ',' << fmt(r.lambda_q) << ','
        << r.n_labels_corrected << ',' << fmt_opt(r.train_label_dsc_vs_truth)
        << '\n';
  }
}

MetricsReport read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open metrics csv: " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty metrics csv: " + path.string());
  MetricsReport report;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    cells.resize(10);
    MetricsRow r;
    r.epoch = std::stoi(cells[0]);
    r.model_id = cells[1];
    r.split = cells[2];
    r.dsc = std::stod(cells[3]);
    if (!cells[4].empty()) r.ravd = std::stod(cells[4]) / 100.0;
    if (!cells[5].empty()) r.assd = std::stod(cells[5]);
    if (!cells[6].empty()) r.mssd = std::stod(cells[6]);
    r.lambda_q = std::stod(cells[7]);
    if (!cells[8].empty()) r.n_labels_corrected = std::stoi(cells[8]);
    if (!cells[9].empty()) r.train_label_dsc_vs_truth = std::stod(cells[9]);
    report.rows.push_back(std::move(r));
  }
  return report;
}

namespace {

void save_label_snapshot(const std::filesystem::path& dir,
                         const std::vector<LabelRecord>& records) {
  std::filesystem::create_directories(dir);
  ordered_json history = ordered_json::object();
  for (const auto& r : records) {
    write_mask_pgm(dir / (r.sample_id + ".pgm"), r.mask);
    ordered_json h;
    h["quality"] = to_string(r.quality);
    h["corrected_at_epochs"] = r.corrected_at_epochs;
    history[r.sample_id] = std::move(h);
  }
  std::ofstream out(dir / "history.json");
  out << history.dump(2) << "\n";
}

std::optional<double> lq_label_dsc_vs_truth(
    const Dataset& data, const std::vector<LabelRecord>& records) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    if (records[i].quality != Quality::LQ) continue;
    if (!data.samples[i].truth) continue;
    sum += metrics::dsc(records[i].mask, *data.samples[i].truth);
    ++n;
  }
  if (!n) return std::nullopt;
  return sum / double(n);
}

bool hq_intact(const Dataset& data,
               const std::vector<LabelRecord>& records) {
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    if (records[i].quality != Quality::HQ) continue;
    if (!records[i].corrected_at_epochs.empty()) return false;
    if (!(records[i].mask == *data.samples[i].label)) return false;
  }
  return true;
}

std::vector<ProbMap> average_probs(const std::vector<ProbMap>& a,
                                   const std::vector<ProbMap>& b) {
  std::vector<ProbMap> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = a[i];
    for (std::size_t j = 0; j < out[i].data.size(); ++j)
      out[i].data[j] = 0.5 * (a[i].data[j] + b[i].data[j]);
  }
  return out;
}

struct ArmAccumulator {
  std::vector<const SeedRunResult*> runs;
};

void write_summary_csv(const std::filesystem::path& path,
                       const ExperimentSpec& spec,
                       const std::vector<SeedRunResult>& runs) {
  std::ofstream out(path);
  out << "arm,variant,pp,n_seeds,dsc_mean,dsc_sd,ravd_mean,assd_mean,"
         "mssd_mean\n";
  auto emit = [&](const std::string& arm, const std::string& variant,
                  bool pp, const std::vector<const EvalSummary*>& evals) {
    if (evals.empty()) return;
    std::vector<double> dscs;
    double ravd_sum = 0.0, assd_sum = 0.0, mssd_sum = 0.0;
    std::size_t ravd_n = 0, assd_n = 0, mssd_n = 0;
    for (const auto* e : evals) {
      dscs.push_back(e->dsc);
      if (e->ravd) { ravd_sum += *e->ravd; ++ravd_n; }
      if (e->assd) { assd_sum += *e->assd; ++assd_n; }
      if (e->mssd) { mssd_sum += *e->mssd; ++mssd_n; }
    }
    out << arm << ',' << variant << ',' << (pp ? "Y" : "N") << ','
        << dscs.size() << ',' << fmt(stats::mean(dscs)) << ','
        << (dscs.size() > 1 ? fmt(stats::sample_sd(dscs)) : std::string(""))
        << ','
        << (ravd_n ? fmt(100.0 * ravd_sum / double(ravd_n)) : std::string(""))
        << ','
        << (assd_n ? fmt(assd_sum / double(assd_n)) : std::string("")) << ','
        << (mssd_n ? fmt(mssd_sum / double(mssd_n)) : std::string(""))
        << '\n';
  };
  for (const auto& arm : spec.arms) {
    std::vector<const EvalSummary*> np, pp, enp, epp;
    for (const auto& r : runs) {
      if (r.arm != arm.name) continue;
      np.push_back(&r.np);
      pp.push_back(&r.pp);
      if (r.ensemble_np) enp.push_back(&*r.ensemble_np);
      if (r.ensemble_pp) epp.push_back(&*r.ensemble_pp);
    }
    emit(arm.name, "best", false, np);
    emit(arm.name, "best", true, pp);
    emit(arm.name, "ensemble", false, enp);
    emit(arm.name, "ensemble", true, epp);
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const std::filesystem::path& out_dir) {
  const Dataset train_set =
      load_dataset(spec.dataset_dir / "train" / "manifest.json");
  const Dataset test_set =
      load_dataset(spec.dataset_dir / "test" / "manifest.json");
  std::filesystem::create_directories(out_dir);

  ExperimentResult result;
  for (const auto& arm : spec.arms) {
    for (const std::uint64_t seed : spec.seeds) {
      TrainConfig cfg = arm.config;
      cfg.seed = seed;
      SeedRunResult run;
      run.arm = arm.name;
      run.seed = seed;
      run.run_dir = out_dir / arm.name / ("seed_" + std::to_string(seed));
      std::filesystem::create_directories(run.run_dir);

      if (arm.method == Method::aide) {
        trainer::TrainResult tr = trainer::train(cfg, train_set, &test_set);
        const auto probs1 =
            trainer::predict_probs(*tr.best_n1, test_set, cfg.batch_size);
        const auto probs2 =
            trainer::predict_probs(*tr.best_n2, test_set, cfg.batch_size);
        const EvalSummary pp1 = evaluate_predictions(probs1, test_set, true);
        const EvalSummary pp2 = evaluate_predictions(probs2, test_set, true);
        const bool pick1 = pp1.dsc >= pp2.dsc;
        run.pp = pick1 ? pp1 : pp2;
        run.np = evaluate_predictions(pick1 ? probs1 : probs2, test_set,
                                      false);
        if (spec.ensemble) {
          const auto ens = average_probs(probs1, probs2);
          run.ensemble_np = evaluate_predictions(ens, test_set, false);
          run.ensemble_pp = evaluate_predictions(ens, test_set, true);
        }
        write_metrics_csv(run.run_dir / "metrics.csv", tr.report);
        net::save_checkpoint(run.run_dir / "best_n1.ckpt", *tr.best_n1);
        net::save_checkpoint(run.run_dir / "best_n2.ckpt", *tr.best_n2);
        save_label_snapshot(run.run_dir / "labels_final" / "n1",
                            tr.labels_n1);
        save_label_snapshot(run.run_dir / "labels_final" / "n2",
                            tr.labels_n2);
        const auto initial = trainer::initial_label_records(train_set);
        run.initial_lq_label_dsc = lq_label_dsc_vs_truth(train_set, initial);
        const auto f1 = lq_label_dsc_vs_truth(train_set, tr.labels_n1);
        const auto f2 = lq_label_dsc_vs_truth(train_set, tr.labels_n2);
        if (f1 && f2) run.final_lq_label_dsc = 0.5 * (*f1 + *f2);
        run.hq_labels_intact = hq_intact(train_set, tr.labels_n1) &&
                               hq_intact(train_set, tr.labels_n2);
      } else {
        trainer::SupervisedOptions opts;
        opts.refresh_lq_labels = arm.method == Method::pseudo_label_static;
        opts.model_id = arm.name;
        trainer::SupervisedResult sup =
            trainer::train_supervised(cfg, train_set, &test_set, opts);
        const auto probs =
            trainer::predict_probs(*sup.model, test_set, cfg.batch_size);
        run.np = evaluate_predictions(probs, test_set, false);
        run.pp = evaluate_predictions(probs, test_set, true);
        write_metrics_csv(run.run_dir / "metrics.csv", sup.report);
        net::save_checkpoint(run.run_dir / "model.ckpt", *sup.model);
        run.hq_labels_intact = hq_intact(train_set, sup.labels);
      }
      result.runs.push_back(std::move(run));
    }
  }

  write_summary_csv(out_dir / "summary.csv", spec, result.runs);

  // paired t-tests over seed-averaged per-sample test DSC (post-processed)
  if (!spec.t_test_pairs.empty()) {
    std::ofstream tout(out_dir / "ttests.csv");
    tout << "arm_a,arm_b,t,p\n";
    auto seed_avg = [&](const std::string& name) {
      std::vector<double> avg;
      std::size_t count = 0;
      for (const auto& r : result.runs) {
        if (r.arm != name) continue;
        if (avg.empty()) avg.assign(r.pp.per_sample_dsc.size(), 0.0);
        for (std::size_t i = 0; i < avg.size(); ++i)
          avg[i] += r.pp.per_sample_dsc[i];
        ++count;
      }
      for (auto& v : avg) v /= double(count);
      return avg;
    };
    for (const auto& [a, b] : spec.t_test_pairs) {
      const auto va = seed_avg(a);
      const auto vb = seed_avg(b);
      double t = std::nan(""), p = std::nan("");
      try {
        const auto r = stats::paired_t_test(va, vb);
        t = r.t;
        p = r.p;
      } catch (const std::exception&) {
        // zero-variance differences: leave NaN
      }
      result.p_values[{a, b}] = p;
      tout << a << ',' << b << ',' << fmt(t) << ',' << fmt(p) << '\n';
    }
  }
  return result;
}

double PlotGeometry::x(double epoch, double e_min, double e_max) const {
  const double denom = e_max > e_min ? e_max - e_min : 1.0;
  return margin_left + (epoch - e_min) / denom *
                           double(width - margin_left - margin_right);
}

double PlotGeometry::y(double dsc) const {
  return double(height - margin_bottom) -
         dsc * double(height - margin_top - margin_bottom);
}

void emit_plot(const std::filesystem::path& metrics_csv,
               const std::filesystem::path& out_svg) {
  const MetricsReport report = read_metrics_csv(metrics_csv);
  if (report.rows.empty())
    throw std::runtime_error("metrics csv has no data rows: " +
                             metrics_csv.string());

  // series keyed by model/split, insertion-ordered
  std::vector<std::string> keys;
  std::map<std::string, std::vector<std::pair<int, double>>> series;
  int e_min = report.rows.front().epoch, e_max = e_min;
  for (const auto& r : report.rows) {
    const std::string key = r.model_id + "/" + r.split;
    if (!series.count(key)) keys.push_back(key);
    series[key].emplace_back(r.epoch, r.dsc);
    e_min = std::min(e_min, r.epoch);
    e_max = std::max(e_max, r.epoch);
  }

  const PlotGeometry g;
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#ff7f0e", "#9467bd", "#8c564b"};
  std::ofstream out(out_svg);
  if (!out) throw std::runtime_error("cannot write svg: " + out_svg.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << g.width
      << "\" height=\"" << g.height << "\">\n";
  out << "<rect width=\"" << g.width << "\" height=\"" << g.height
      << "\" fill=\"white\"/>\n";
  // axes
  out << "<line x1=\"" << g.margin_left << "\" y1=\"" << g.y(0.0)
      << "\" x2=\"" << g.width - g.margin_right << "\" y2=\"" << g.y(0.0)
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << g.margin_left << "\" y1=\"" << g.y(0.0)
      << "\" x2=\"" << g.margin_left << "\" y2=\"" << g.y(1.0)
      << "\" stroke=\"black\"/>\n";
  for (double tick : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    out << "<text x=\"" << g.margin_left - 6 << "\" y=\"" << g.y(tick) + 4
        << "\" font-size=\"11\" text-anchor=\"end\">" << tick << "</text>\n";
  }
  out << "<text x=\"" << g.x(e_min, e_min, e_max) << "\" y=\""
      << g.height - 12 << "\" font-size=\"11\">" << e_min << "</text>\n";
  if (e_max != e_min)
    out << "<text x=\"" << g.x(e_max, e_min, e_max) << "\" y=\""
        << g.height - 12 << "\" font-size=\"11\" text-anchor=\"end\">"
        << e_max << "</text>\n";
  out << "<text x=\"14\" y=\"" << g.y(0.5)
      << "\" font-size=\"11\" transform=\"rotate(-90 14 " << g.y(0.5)
      << ")\" text-anchor=\"middle\">DSC</text>\n";

  int color = 0;
  int legend_y = g.margin_top + 12;
  for (const auto& key : keys) {
    auto pts = series[key];
    std::sort(pts.begin(), pts.end());
    out << "<polyline fill=\"none\" stroke=\""
        << kPalette[color % 6] << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) out << ' ';
      out << fmt(g.x(pts[i].first, e_min, e_max)) << ','
          << fmt(g.y(pts[i].second));
    }
    out << "\"/>\n";
    out << "<text x=\"" << g.width - g.margin_right - 4 << "\" y=\""
        << legend_y << "\" font-size=\"11\" text-anchor=\"end\" fill=\""
        << kPalette[color % 6] << "\">" << key << "</text>\n";
    legend_y += 14;
    ++color;
  }
  out << "</svg>\n";
}

}  // namespace aide::exp
