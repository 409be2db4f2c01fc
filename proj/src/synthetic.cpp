#include "mfp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "mfp/io.hpp"

namespace mfp {

namespace {

using Shape = std::function<bool(double r, double c)>;

struct Spec {
  const char* id;
  Shape inside;
  ImageRGB::Pixel fg;
  ImageRGB::Pixel bg;
  double noise;  // amplitude of the per-pixel texture, in 8-bit levels
};

double radial(double dr, double dc) { return std::sqrt(dr * dr + dc * dc); }

// Quantize to the 8-bit grid so images survive a PNG round trip unchanged.
double level(double v) { return std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0; }

}  // namespace

std::vector<SyntheticSample> synthetic_suite(Size size) {
  const double h = size.height;
  const double w = size.width;
  const double cy = (h - 1) / 2.0;
  const double cx = (w - 1) / 2.0;
  const double s = std::min(h, w);

  const std::vector<Spec> specs = {
      {"bar", [=](double r, double c) { return std::abs(r - cy) <= s * 0.06 && std::abs(c - cx) <= s * 0.35; },
       {0.9, 0.8, 0.2}, {0.2, 0.2, 0.3}, 6},
      {"cross",
       [=](double r, double c) {
         return (std::abs(r - cy) <= s * 0.08 && std::abs(c - cx) <= s * 0.33) ||
                (std::abs(c - cx) <= s * 0.08 && std::abs(r - cy) <= s * 0.33);
       },
       {0.2, 0.7, 0.9}, {0.5, 0.4, 0.3}, 8},
      {"c_shape",
       [=](double r, double c) {
         const double d = radial(r - cy, c - cx);
         return d <= s * 0.35 && d >= s * 0.18 && !(c > cx && std::abs(r - cy) < s * 0.12);
       },
       {0.8, 0.3, 0.3}, {0.3, 0.5, 0.3}, 10},
      {"disk", [=](double r, double c) { return radial(r - cy, c - cx) <= s * 0.25; }, {0.95, 0.95, 0.95},
       {0.05, 0.05, 0.05}, 0},
      {"ellipse",
       [=](double r, double c) {
         const double a = (c - cx) / (s * 0.38);
         const double b = (r - cy) / (s * 0.18);
         return a * a + b * b <= 1.0;
       },
       {0.6, 0.3, 0.7}, {0.4, 0.4, 0.4}, 12},
      {"l_shape",
       [=](double r, double c) {
         return (c >= w * 0.2 && c <= w * 0.4 && r >= h * 0.15 && r <= h * 0.8) ||
                (r >= h * 0.6 && r <= h * 0.8 && c >= w * 0.2 && c <= w * 0.75);
       },
       {0.7, 0.6, 0.5}, {0.2, 0.3, 0.5}, 8},
      {"ring",
       [=](double r, double c) {
         const double d = radial(r - cy, c - cx);
         return d <= s * 0.36 && d >= s * 0.22;
       },
       {0.3, 0.8, 0.4}, {0.1, 0.2, 0.1}, 6},
      {"square",
       [=](double r, double c) { return std::abs(r - cy) <= s * 0.22 && std::abs(c - cx) <= s * 0.22; },
       {0.85, 0.45, 0.1}, {0.15, 0.25, 0.6}, 10},
      {"triangle",
       [=](double r, double c) {
         const double top = h * 0.15;
         const double bottom = h * 0.8;
         if (r < top || r > bottom) return false;
         const double half = (r - top) / (bottom - top) * s * 0.35;
         return std::abs(c - cx) <= half;
       },
       {0.5, 0.5, 0.9}, {0.5, 0.5, 0.5}, 14},
      {"two_blobs",
       [=](double r, double c) {
         return radial(r - h * 0.35, c - w * 0.3) <= s * 0.16 || radial(r - h * 0.65, c - w * 0.72) <= s * 0.1;
       },
       {0.9, 0.2, 0.6}, {0.35, 0.35, 0.2}, 8},
  };

  std::vector<SyntheticSample> out;
  std::mt19937 rng(20240601u);  // mt19937's output sequence is fixed by the standard
  for (const Spec& spec : specs) {
    BinaryMask mask(size);
    std::vector<ImageRGB::Pixel> pixels(size.area());
    for (int r = 0; r < size.height; ++r) {
      for (int c = 0; c < size.width; ++c) {
        const bool in = spec.inside(r, c);
        mask.set({r, c}, in);
        const auto& base = in ? spec.fg : spec.bg;
        auto& px = pixels[mask.index({r, c})];
        for (std::size_t ch = 0; ch < 3; ++ch) {
          const double jitter = (static_cast<double>(rng() % 2001) / 1000.0 - 1.0) * spec.noise / 255.0;
          px[ch] = level(base[ch] + jitter);
        }
      }
    }
    out.push_back({spec.id, ImageRGB(size, std::move(pixels)), std::move(mask)});
  }
  return out;
}

DatasetManifest write_synthetic_dataset(const std::filesystem::path& dir, const std::string& name, Size size) {
  std::filesystem::create_directories(dir / "images");
  std::filesystem::create_directories(dir / "masks");
  DatasetManifest m{name, {}};
  for (const auto& s : synthetic_suite(size)) {
    const auto image = dir / "images" / (s.id + ".png");
    const auto mask = dir / "masks" / (s.id + ".png");
    io::write_image_png(image, s.image);
    io::write_mask_png(mask, s.mask);
    m.samples.push_back({s.id, image, mask});
  }
  io::write_text(dir / (name + ".json"), manifest_to_json(m, dir).dump(2) + "\n");
  return m;
}

}  // namespace mfp
