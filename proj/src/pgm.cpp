#include "aide/pgm.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace aide {

namespace {

// Skips whitespace and '#' comment lines between header tokens.
int next_header_int(std::istream& in, const std::filesystem::path& path) {
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string line;
      std::getline(in, line);
      continue;
    }
    if (!std::isspace(static_cast<unsigned char>(c))) {
      in.unget();
      break;
    }
  }
  int value = 0;
  if (!(in >> value))
    throw std::runtime_error("malformed PGM header: " + path.string());
  return value;
}

}  // namespace

PgmImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open PGM file: " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P5")
    throw std::runtime_error("not a binary PGM (P5): " + path.string());
  PgmImage img;
  img.width = next_header_int(in, path);
  img.height = next_header_int(in, path);
  const int maxval = next_header_int(in, path);
  if (img.width <= 0 || img.height <= 0 || maxval != 255)
    throw std::runtime_error("unsupported PGM header: " + path.string());
  in.get();  // single whitespace byte after maxval
  img.pixels.resize(size_t(img.width) * img.height);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
    throw std::runtime_error("truncated PGM data: " + path.string());
  return img;
}

void write_pgm(const std::filesystem::path& path, const PgmImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write PGM file: " + path.string());
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out)
    throw std::runtime_error("failed writing PGM data: " + path.string());
}

BinaryMask read_mask_pgm(const std::filesystem::path& path) {
  const PgmImage img = read_pgm(path);
  BinaryMask mask(img.height, img.width);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    if (img.pixels[i] != 0 && img.pixels[i] != 255)
      throw std::runtime_error("mask PGM has non-binary value in " +
                               path.string());
    mask.values[i] = img.pixels[i] == 255 ? 1 : 0;
  }
  return mask;
}

void write_mask_pgm(const std::filesystem::path& path,
                    const BinaryMask& mask) {
  PgmImage img;
  img.height = mask.height;
  img.width = mask.width;
  img.pixels.resize(mask.pixel_count());
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    img.pixels[i] = mask.values[i] ? 255 : 0;
  write_pgm(path, img);
}

void read_image_plane_pgm(const std::filesystem::path& path, Image& image,
                          int modality) {
  const PgmImage img = read_pgm(path);
  if (img.height != image.height || img.width != image.width)
    throw std::runtime_error("image plane dimension mismatch: " +
                             path.string());
  double* plane = image.plane(modality);
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    plane[i] = img.pixels[i] / 255.0;
}

void write_image_plane_pgm(const std::filesystem::path& path,
                           const Image& image, int modality) {
  PgmImage img;
  img.height = image.height;
  img.width = image.width;
  img.pixels.resize(image.plane_size());
  const double* plane = image.plane(modality);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const double v = std::round(plane[i] * 255.0);
    img.pixels[i] = static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v));
  }
  write_pgm(path, img);
}

}  // namespace aide
