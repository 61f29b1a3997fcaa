#pragma once
// Training configuration. One JSON document with exactly these fields;
// absent fields keep their defaults.

#include <cstdint>
#include <filesystem>
#include <string>

namespace aide {

enum class TaskMode : std::uint8_t { SSL, UDA, NLL };
enum class SharpenForm : std::uint8_t { softmax, power };
enum class OptimizerKind : std::uint8_t { sgd, adam };

struct ArchConfig {
  int base_channels = 16;
  int depth = 5;           // downsampling blocks; depth-1 poolings
  int modality_streams = 1;
};

struct TrainConfig {
  std::uint64_t seed = 0;
  int total_epochs = 60;       // Q
  int warmup_epochs = 20;      // q_w
  int batch_size = 8;          // B
  double learning_rate = 0.1;  // lr
  int augmentations = 2;        // K
  double sharpen_temperature = 0.5;  // T
  double lambda_max = 1.0;
  double alpha = 1.0;
  double epsilon = 1.0;
  double correction_ratio = 0.25;  // R
  double select_fraction = 0.5;
  int update_period = 10;
  ArchConfig arch;
  TaskMode task_mode = TaskMode::NLL;
  SharpenForm sharpen_form = SharpenForm::softmax;
  OptimizerKind optimizer = OptimizerKind::sgd;
  int pretrain_epochs = 30;
  int eval_test_every = 1;  // 0 disables per-epoch test rows

  void validate() const;
};

TrainConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const TrainConfig& cfg);

// JSON-text forms of the same document, for embedding in other files.
TrainConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const TrainConfig& cfg);

const char* to_string(TaskMode m);
const char* to_string(SharpenForm f);
const char* to_string(OptimizerKind o);

}  // namespace aide
