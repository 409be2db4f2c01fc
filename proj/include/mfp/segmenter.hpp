#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "mfp/grid.hpp"

namespace mfp {

// 3-channel image with channel values in [0, 1].
class ImageRGB {
 public:
  using Pixel = std::array<double, 3>;

  ImageRGB() = default;
  ImageRGB(Size size, Pixel fill);
  ImageRGB(Size size, std::vector<Pixel> pixels);

  Size size() const { return grid_.size(); }
  int width() const { return grid_.width(); }
  int height() const { return grid_.height(); }
  bool contains(PixelCoord p) const { return grid_.contains(p); }
  const Pixel& at(PixelCoord p) const { return grid_.at(p); }
  std::span<const Pixel> pixels() const { return grid_.values(); }

  friend bool operator==(const ImageRGB&, const ImageRGB&) = default;

 private:
  Grid<Pixel> grid_;
};

struct ClickMaps {
  BinaryMask fg;
  BinaryMask bg;
};

// Stamps a disk of radius r_click (membership <=) around each click into the
// map matching its label. Disks are clipped to the grid.
ClickMaps encode_clicks(const ClickHistory& history, Size size, int r_click = 5);

// Everything a backend sees in one round. `history` carries the click
// coordinates that `clicks` rasterizes.
struct BackendInput {
  const ImageRGB& image;
  const ClickHistory& history;
  const ClickMaps& clicks;
  const ProbabilityGrid& p_prev;
  const ProbabilityGrid& p_prev_mod;
};

// Throws DimensionMismatch unless every grid matches the image.
void check_dimensions(const BackendInput& input);

// A segmentation backend. predict must be deterministic and free of hidden
// mutable state so one instance can serve concurrent callers.
class Segmenter {
 public:
  virtual ~Segmenter() = default;
  virtual std::string name() const = 0;
  virtual ProbabilityGrid predict(const BackendInput& input) const = 0;
};

struct ReferenceSegmenterParams {
  double sigma_s = 40.0;  // spatial bandwidth, pixels
  double sigma_c = 0.25;  // color bandwidth
  double alpha = 4.0;     // click evidence gain
  double beta = 1.0;      // prior gain

  void validate() const;
  friend bool operator==(const ReferenceSegmenterParams&, const ReferenceSegmenterParams&) = default;
};

// Click-kernel evidence blended with the logit of the modulated previous map:
//   out(x) = logistic(alpha * (F(x) - B(x)) + beta * logit(clamp(p_prev_mod(x))))
// where F/B are the strongest spatial-color kernel responses over the
// foreground/background clicks.
class ReferenceSegmenter final : public Segmenter {
 public:
  explicit ReferenceSegmenter(ReferenceSegmenterParams params = {});

  std::string name() const override { return "reference"; }
  ProbabilityGrid predict(const BackendInput& input) const override;
  const ReferenceSegmenterParams& params() const { return params_; }

 private:
  ReferenceSegmenterParams params_;
};

ProbabilityGrid reference_predict(const BackendInput& input, const ReferenceSegmenterParams& params);

}  // namespace mfp
