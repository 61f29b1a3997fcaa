#pragma once
// Binary PGM (P5, maxval 255) readers/writers. Masks are stored 0/255.

#include <filesystem>

#include "aide/types.hpp"

namespace aide {

struct PgmImage {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels;  // row-major
};

PgmImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const PgmImage& img);

BinaryMask read_mask_pgm(const std::filesystem::path& path);
void write_mask_pgm(const std::filesystem::path& path, const BinaryMask& mask);

// Intensity plane: bytes / 255.0.
void read_image_plane_pgm(const std::filesystem::path& path, Image& image,
                          int modality);
void write_image_plane_pgm(const std::filesystem::path& path,
                           const Image& image, int modality);

}  // namespace aide
