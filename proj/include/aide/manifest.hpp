#pragma once
// Dataset manifest: one JSON document per split directory, naming sample
// files relative to the manifest location.
//
// Schema: {"split": "train"|"test",
//          "samples": [{"id", "images": [...], "label"?, "quality",
//                       "truth"?}, ...]}

#include <filesystem>

#include "aide/types.hpp"

namespace aide {

DatasetManifest load_manifest(const std::filesystem::path& manifest_path);

// Canonical serialization: fixed key order, 2-space indent, trailing
// newline. save(load(m)) is byte-identical.
void save_manifest(const std::filesystem::path& manifest_path,
                   const DatasetManifest& manifest);

// Loads every referenced file, validating dimensions against the image.
Dataset load_dataset(const std::filesystem::path& manifest_path);

// Writes a dataset as PGM files plus manifest under dir. Layout:
// dir/manifest.json, dir/<id>/img<k>.pgm, dir/<id>/label.pgm,
// dir/<id>/truth.pgm.
void save_dataset(const std::filesystem::path& dir, const Dataset& dataset);

}  // namespace aide
