#include "aide/manifest.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "aide/pgm.hpp"

namespace aide {

namespace {

using ordered_json = nlohmann::ordered_json;

Quality parse_quality(const std::string& s) {
  if (s == "HQ") return Quality::HQ;
  if (s == "LQ") return Quality::LQ;
  throw std::runtime_error("invalid quality flag: " + s);
}

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in)
    throw std::runtime_error("cannot open manifest: " +
                             manifest_path.string());
  ordered_json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw std::runtime_error("manifest parse error in " +
                             manifest_path.string() + ": " + e.what());
  }

  DatasetManifest m;
  const std::string split = doc.at("split").get<std::string>();
  if (split == "train")
    m.split = Split::train;
  else if (split == "test")
    m.split = Split::test;
  else
    throw std::runtime_error("invalid split: " + split);

  std::set<std::string> seen_ids;
  for (const auto& s : doc.at("samples")) {
    ManifestEntry e;
    e.id = s.at("id").get<std::string>();
    if (!seen_ids.insert(e.id).second)
      throw std::runtime_error("duplicate sample_id: " + e.id);
    for (const auto& p : s.at("images"))
      e.image_paths.push_back(p.get<std::string>());
    if (e.image_paths.empty())
      throw std::runtime_error("sample has no images: " + e.id);
    if (s.contains("label") && !s["label"].is_null())
      e.label_path = s["label"].get<std::string>();
    e.quality = parse_quality(s.at("quality").get<std::string>());
    if (s.contains("truth") && !s["truth"].is_null())
      e.truth_path = s["truth"].get<std::string>();
    m.samples.push_back(std::move(e));
  }
  return m;
}

void save_manifest(const std::filesystem::path& manifest_path,
                   const DatasetManifest& manifest) {
  ordered_json doc;
  doc["split"] = manifest.split == Split::train ? "train" : "test";
  doc["samples"] = ordered_json::array();
  for (const auto& e : manifest.samples) {
    ordered_json s;
    s["id"] = e.id;
    s["images"] = e.image_paths;
    if (e.label_path) s["label"] = *e.label_path;
    s["quality"] = to_string(e.quality);
    if (e.truth_path) s["truth"] = *e.truth_path;
    doc["samples"].push_back(std::move(s));
  }
  std::ofstream out(manifest_path);
  if (!out)
    throw std::runtime_error("cannot write manifest: " +
                             manifest_path.string());
  out << doc.dump(2) << "\n";
}

Dataset load_dataset(const std::filesystem::path& manifest_path) {
  const DatasetManifest manifest = load_manifest(manifest_path);
  const std::filesystem::path base = manifest_path.parent_path();

  Dataset ds;
  ds.split = manifest.split;
  for (const auto& e : manifest.samples) {
    Sample sample;
    sample.id = e.id;
    sample.quality = e.quality;

    const PgmImage first = read_pgm(base / e.image_paths[0]);
    sample.image =
        Image(first.height, first.width, int(e.image_paths.size()));
    for (std::size_t m = 0; m < e.image_paths.size(); ++m)
      read_image_plane_pgm(base / e.image_paths[m], sample.image, int(m));

    if (e.label_path) {
      BinaryMask label = read_mask_pgm(base / *e.label_path);
      if (label.height != sample.image.height ||
          label.width != sample.image.width)
        throw std::runtime_error("label/image dimension mismatch for sample " +
                                 e.id);
      sample.label = std::move(label);
    }
    if (e.truth_path) {
      BinaryMask truth = read_mask_pgm(base / *e.truth_path);
      if (truth.height != sample.image.height ||
          truth.width != sample.image.width)
        throw std::runtime_error("truth/image dimension mismatch for sample " +
                                 e.id);
      sample.truth = std::move(truth);
    }
    ds.samples.push_back(std::move(sample));
  }
  return ds;
}

void save_dataset(const std::filesystem::path& dir, const Dataset& dataset) {
  std::filesystem::create_directories(dir);
  DatasetManifest manifest;
  manifest.split = dataset.split;
  for (const auto& s : dataset.samples) {
    std::filesystem::create_directories(dir / s.id);
    ManifestEntry e;
    e.id = s.id;
    e.quality = s.quality;
    for (int m = 0; m < s.image.modalities; ++m) {
      const std::string rel = s.id + "/img" + std::to_string(m) + ".pgm";
      write_image_plane_pgm(dir / rel, s.image, m);
      e.image_paths.push_back(rel);
    }
    if (s.label) {
      const std::string rel = s.id + "/label.pgm";
      write_mask_pgm(dir / rel, *s.label);
      e.label_path = rel;
    }
    if (s.truth) {
      const std::string rel = s.id + "/truth.pgm";
      write_mask_pgm(dir / rel, *s.truth);
      e.truth_path = rel;
    }
    manifest.samples.push_back(std::move(e));
  }
  save_manifest(dir / "manifest.json", manifest);
}

}  // namespace aide
