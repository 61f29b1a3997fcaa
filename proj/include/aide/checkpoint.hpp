#pragma once
// Versioned binary checkpoints: arch header + named parameter and buffer
// blobs. Round-trip reproduces identical forward outputs.

#include <filesystem>
#include <memory>

#include "aide/unet.hpp"

namespace aide::net {

void save_checkpoint(const std::filesystem::path& path, UNet& model);
std::unique_ptr<UNet> load_checkpoint(const std::filesystem::path& path);

}  // namespace aide::net
