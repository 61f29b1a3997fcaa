#include "aide/config.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace aide {

namespace {

using ordered_json = nlohmann::ordered_json;

template <typename T>
void read_field(const ordered_json& doc, const char* key, T& out) {
  if (doc.contains(key)) out = doc.at(key).get<T>();
}

}  // namespace

const char* to_string(TaskMode m) {
  switch (m) {
    case TaskMode::SSL: return "SSL";
    case TaskMode::UDA: return "UDA";
    default: return "NLL";
  }
}

const char* to_string(SharpenForm f) {
  return f == SharpenForm::softmax ? "softmax" : "power";
}

const char* to_string(OptimizerKind o) {
  return o == OptimizerKind::sgd ? "sgd" : "adam";
}

void TrainConfig::validate() const {
  if (select_fraction <= 0.0 || select_fraction > 1.0)
    throw std::invalid_argument("select_fraction must be in (0, 1]");
  if (correction_ratio <= 0.0 || correction_ratio >= 1.0)
    throw std::invalid_argument("R must be in (0, 1)");
  if (warmup_epochs <= 0 || warmup_epochs > total_epochs)
    throw std::invalid_argument("q_w must satisfy 0 < q_w <= Q");
  if (sharpen_temperature <= 0.0)
    throw std::invalid_argument("T must be > 0");
  if (batch_size <= 0) throw std::invalid_argument("B must be > 0");
  if (update_period <= 0)
    throw std::invalid_argument("update_period must be > 0");
  if (learning_rate <= 0.0) throw std::invalid_argument("lr must be > 0");
  if (augmentations < 1) throw std::invalid_argument("K must be >= 1");
  if (arch.base_channels < 1 || arch.depth < 1 || arch.modality_streams < 1)
    throw std::invalid_argument("invalid arch parameters");
}

namespace {

TrainConfig config_from_json(const ordered_json& doc) {
  TrainConfig cfg;
  read_field(doc, "seed", cfg.seed);
  read_field(doc, "Q", cfg.total_epochs);
  read_field(doc, "q_w", cfg.warmup_epochs);
  read_field(doc, "B", cfg.batch_size);
  read_field(doc, "lr", cfg.learning_rate);
  read_field(doc, "K", cfg.augmentations);
  read_field(doc, "T", cfg.sharpen_temperature);
  read_field(doc, "lambda_max", cfg.lambda_max);
  read_field(doc, "alpha", cfg.alpha);
  read_field(doc, "epsilon", cfg.epsilon);
  read_field(doc, "R", cfg.correction_ratio);
  read_field(doc, "select_fraction", cfg.select_fraction);
  read_field(doc, "update_period", cfg.update_period);
  read_field(doc, "pretrain_epochs", cfg.pretrain_epochs);
  read_field(doc, "eval_test_every", cfg.eval_test_every);
  if (doc.contains("arch")) {
    const auto& a = doc["arch"];
    read_field(a, "base_channels", cfg.arch.base_channels);
    read_field(a, "depth", cfg.arch.depth);
    read_field(a, "modality_streams", cfg.arch.modality_streams);
  }
  if (doc.contains("task_mode")) {
    const std::string s = doc["task_mode"].get<std::string>();
    if (s == "SSL") cfg.task_mode = TaskMode::SSL;
    else if (s == "UDA") cfg.task_mode = TaskMode::UDA;
    else if (s == "NLL") cfg.task_mode = TaskMode::NLL;
    else throw std::runtime_error("invalid task_mode: " + s);
  }
  if (doc.contains("sharpen_form")) {
    const std::string s = doc["sharpen_form"].get<std::string>();
    if (s == "softmax") cfg.sharpen_form = SharpenForm::softmax;
    else if (s == "power") cfg.sharpen_form = SharpenForm::power;
    else throw std::runtime_error("invalid sharpen_form: " + s);
  }
  if (doc.contains("optimizer")) {
    const std::string s = doc["optimizer"].get<std::string>();
    if (s == "sgd") cfg.optimizer = OptimizerKind::sgd;
    else if (s == "adam") cfg.optimizer = OptimizerKind::adam;
    else throw std::runtime_error("invalid optimizer: " + s);
  }
  cfg.validate();
  return cfg;
}

ordered_json config_to_json(const TrainConfig& cfg) {
  ordered_json doc;
  doc["seed"] = cfg.seed;
  doc["Q"] = cfg.total_epochs;
  doc["q_w"] = cfg.warmup_epochs;
  doc["B"] = cfg.batch_size;
  doc["lr"] = cfg.learning_rate;
  doc["K"] = cfg.augmentations;
  doc["T"] = cfg.sharpen_temperature;
  doc["lambda_max"] = cfg.lambda_max;
  doc["alpha"] = cfg.alpha;
  doc["epsilon"] = cfg.epsilon;
  doc["R"] = cfg.correction_ratio;
  doc["select_fraction"] = cfg.select_fraction;
  doc["update_period"] = cfg.update_period;
  doc["arch"] = {{"base_channels", cfg.arch.base_channels},
                 {"depth", cfg.arch.depth},
                 {"modality_streams", cfg.arch.modality_streams}};
  doc["task_mode"] = to_string(cfg.task_mode);
  doc["sharpen_form"] = to_string(cfg.sharpen_form);
  doc["optimizer"] = to_string(cfg.optimizer);
  doc["pretrain_epochs"] = cfg.pretrain_epochs;
  doc["eval_test_every"] = cfg.eval_test_every;
  return doc;
}

}  // namespace

TrainConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path.string());
  ordered_json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw std::runtime_error("config parse error in " + path.string() + ": " +
                             e.what());
  }
  return config_from_json(doc);
}

void save_config(const std::filesystem::path& path, const TrainConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config: " + path.string());
  out << config_to_json(cfg).dump(2) << "\n";
}

TrainConfig config_from_json_text(const std::string& text) {
  return config_from_json(ordered_json::parse(text));
}

std::string config_to_json_text(const TrainConfig& cfg) {
  return config_to_json(cfg).dump(2);
}

}  // namespace aide
