#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mfp/eval.hpp"
#include "mfp/grid.hpp"
#include "mfp/segmenter.hpp"

namespace mfp {

struct SyntheticSample {
  std::string id;
  ImageRGB image;
  BinaryMask mask;
};

// Ten fixed shapes (disk, ring, bars, concave and multi-part objects) on
// textured backgrounds of varying contrast. Fully deterministic.
std::vector<SyntheticSample> synthetic_suite(Size size = {64, 64});

// Writes images/<id>.png, masks/<id>.png and <name>.json under `dir`.
DatasetManifest write_synthetic_dataset(const std::filesystem::path& dir, const std::string& name,
                                        Size size = {64, 64});

}  // namespace mfp
