#include "mfp/segmenter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfp/detmath.hpp"

namespace mfp {

namespace {

void check_pixel(const ImageRGB::Pixel& px) {
  for (double v : px) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("image channel value outside [0,1]");
  }
}

}  // namespace

ImageRGB::ImageRGB(Size size, Pixel fill) : grid_(size, fill) { check_pixel(fill); }

ImageRGB::ImageRGB(Size size, std::vector<Pixel> pixels) : grid_(size, std::move(pixels)) {
  for (const auto& px : grid_.values()) check_pixel(px);
}

ClickMaps encode_clicks(const ClickHistory& history, Size size, int r_click) {
  if (r_click < 0) throw InvalidArgument("click radius must be non-negative");
  ClickMaps maps{BinaryMask(size), BinaryMask(size)};
  const double r2 = static_cast<double>(r_click) * r_click;
  for (const Click& c : history) {
    if (!size.contains(c.pos)) throw OutOfBounds("encode_clicks: click outside grid");
    BinaryMask& target = c.label == Label::foreground ? maps.fg : maps.bg;
    for (int r = std::max(0, c.pos.row - r_click); r <= std::min(size.height - 1, c.pos.row + r_click); ++r) {
      for (int col = std::max(0, c.pos.col - r_click); col <= std::min(size.width - 1, c.pos.col + r_click); ++col) {
        if (squared_distance({r, col}, c.pos) <= r2) target.set({r, col}, true);
      }
    }
  }
  return maps;
}

void check_dimensions(const BackendInput& input) {
  const Size s = input.image.size();
  if (input.clicks.fg.size() != s || input.clicks.bg.size() != s || input.p_prev.size() != s ||
      input.p_prev_mod.size() != s) {
    throw DimensionMismatch("backend input grids do not match the image dimensions");
  }
  for (const Click& c : input.history) {
    if (!s.contains(c.pos)) throw OutOfBounds("backend input click outside image");
  }
}

void ReferenceSegmenterParams::validate() const {
  if (!(sigma_s > 0.0 && sigma_c > 0.0 && alpha > 0.0 && beta > 0.0)) {
    throw InvalidArgument("reference segmenter parameters must be strictly positive");
  }
}

ReferenceSegmenter::ReferenceSegmenter(ReferenceSegmenterParams params) : params_(params) { params_.validate(); }

ProbabilityGrid ReferenceSegmenter::predict(const BackendInput& input) const {
  return reference_predict(input, params_);
}

ProbabilityGrid reference_predict(const BackendInput& input, const ReferenceSegmenterParams& params) {
  check_dimensions(input);
  params.validate();
  if (input.history.empty()) throw InvalidArgument("reference segmenter needs at least one click");

  constexpr double prior_eps = 1e-4;
  const double inv_2ss = 1.0 / (2.0 * params.sigma_s * params.sigma_s);
  const double inv_2sc = 1.0 / (2.0 * params.sigma_c * params.sigma_c);
  const ImageRGB& img = input.image;

  std::vector<double> out(img.size().area());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const PixelCoord x = input.p_prev.coord(i);
    const auto& ix = img.at(x);
    // Kernel responses are exp(-energy); the max response is at the min energy.
    double fg_energy = std::numeric_limits<double>::infinity();
    double bg_energy = std::numeric_limits<double>::infinity();
    for (const Click& c : input.history) {
      const auto& ic = img.at(c.pos);
      double color2 = 0.0;
      for (int ch = 0; ch < 3; ++ch) {
        const double dv = ix[static_cast<std::size_t>(ch)] - ic[static_cast<std::size_t>(ch)];
        color2 += dv * dv;
      }
      const double energy = squared_distance(x, c.pos) * inv_2ss + color2 * inv_2sc;
      double& slot = c.label == Label::foreground ? fg_energy : bg_energy;
      slot = std::min(slot, energy);
    }
    const double f = std::isinf(fg_energy) ? 0.0 : detmath::exp(-fg_energy);
    const double b = std::isinf(bg_energy) ? 0.0 : detmath::exp(-bg_energy);
    const double prior = detmath::logit(std::clamp(input.p_prev_mod[i], prior_eps, 1.0 - prior_eps));
    out[i] = detmath::logistic(params.alpha * (f - b) + params.beta * prior);
  }
  return ProbabilityGrid(img.size(), std::move(out));
}

}  // namespace mfp
