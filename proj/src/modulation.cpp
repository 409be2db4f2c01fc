#include "mfp/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mfp/detmath.hpp"

namespace mfp {

void ModulationParams::validate() const {
  if (!(eps > 0.0 && eps < target_bg && target_bg < 0.5 && 0.5 < target_fg && target_fg < 1.0)) {
    throw InvalidArgument("modulation targets must satisfy 0 < eps < target_bg < 0.5 < target_fg < 1");
  }
  if (!(max_radius > 0.0)) throw InvalidArgument("max_radius must be positive");
  if (switch_click < 0) throw InvalidArgument("switch_click must be non-negative");
}

double compute_radius(PixelCoord u, const ClickHistory& history, Label label, double max_radius) {
  double nearest = std::numeric_limits<double>::infinity();
  for (const Click& c : history) {
    if (c.label != label) nearest = std::min(nearest, distance(u, c.pos));
  }
  return std::min(0.5 * nearest, max_radius);
}

double compute_big_gamma(double p_u, Label label, const ModulationParams& params) {
  const double q = std::clamp(p_u, params.eps, 1.0 - params.eps);
  const double g = label == Label::foreground ? detmath::log(q) / detmath::log(params.target_fg)
                                              : detmath::log(params.target_bg) / detmath::log(q);
  return std::max(g, 1.0);
}

double gamma_euclidean(double d, double radius, double big_gamma) {
  if (radius <= 0.0) return big_gamma;
  const double t = d / radius;
  return big_gamma * (1.0 - t) + t;
}

double gamma_probability(double d, double median_d, double big_gamma) {
  if (d > median_d) return 1.0;
  // Constant window: every pixel is as close to the click as the click itself.
  if (median_d <= 0.0) return big_gamma;
  const double r = (median_d - d) / median_d;
  return (big_gamma - 1.0) * (r * r * r) + 1.0;
}

namespace {

template <typename Fn>
void for_each_in_window(Size size, const ModulationWindow& window, Fn&& fn) {
  const int r0 = std::max(0, static_cast<int>(std::floor(window.center.row - window.radius)));
  const int r1 = std::min(size.height - 1, static_cast<int>(std::ceil(window.center.row + window.radius)));
  const int c0 = std::max(0, static_cast<int>(std::floor(window.center.col - window.radius)));
  const int c1 = std::min(size.width - 1, static_cast<int>(std::ceil(window.center.col + window.radius)));
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const PixelCoord x{r, c};
      const double d = distance(x, window.center);
      if (d <= window.radius) fn(x, d);
    }
  }
}

double prob_distance(double px, double pu) {
  const double diff = px - pu;
  return diff * diff;
}

}  // namespace

double median_prob_distance(const ProbabilityGrid& p, PixelCoord u, const ModulationWindow& window) {
  if (!p.contains(u)) throw OutOfBounds("median_prob_distance: click outside grid");
  const double pu = p.at(u);
  std::vector<double> ds;
  for_each_in_window(p.size(), window, [&](PixelCoord x, double) { ds.push_back(prob_distance(p.at(x), pu)); });
  const auto mid = ds.begin() + static_cast<std::ptrdiff_t>((ds.size() - 1) / 2);
  std::nth_element(ds.begin(), mid, ds.end());
  return *mid;
}

GammaScheme scheme_for(int click_index, const ModulationParams& params) {
  return click_index <= params.switch_click ? GammaScheme::probability : GammaScheme::euclidean;
}

ModulationResult modulate_detailed(const ProbabilityGrid& p_prev, const Click& click, const ClickHistory& history,
                                   const ModulationParams& params) {
  params.validate();
  if (!p_prev.contains(click.pos)) {
    throw OutOfBounds("click (" + std::to_string(click.pos.row) + "," + std::to_string(click.pos.col) +
                      ") outside " + std::to_string(p_prev.width()) + "x" + std::to_string(p_prev.height()) +
                      " grid");
  }
  if (click.index != static_cast<int>(history.size()) + 1) {
    throw InvalidArgument("click index " + std::to_string(click.index) + " inconsistent with history of " +
                          std::to_string(history.size()) + " clicks");
  }

  ModulationResult res;
  res.window = {click.pos, compute_radius(click.pos, history, click.label, params.max_radius)};
  res.big_gamma = compute_big_gamma(p_prev.at(click.pos), click.label, params);
  res.scheme = scheme_for(click.index, params);

  const double pu = p_prev.at(click.pos);
  const double median_d =
      res.scheme == GammaScheme::probability ? median_prob_distance(p_prev, click.pos, res.window) : 0.0;

  std::vector<double> out(p_prev.values().begin(), p_prev.values().end());
  for_each_in_window(p_prev.size(), res.window, [&](PixelCoord x, double d_euclid) {
    const double px = p_prev.at(x);
    const double q = std::clamp(px, params.eps, 1.0 - params.eps);
    const double gamma = res.scheme == GammaScheme::probability
                             ? gamma_probability(prob_distance(px, pu), median_d, res.big_gamma)
                             : gamma_euclidean(d_euclid, res.window.radius, res.big_gamma);
    // gamma >= 1, so the exact result never crosses q; clamp away rounding noise.
    out[p_prev.index(x)] = click.label == Label::foreground ? std::max(q, detmath::pow(q, 1.0 / gamma))
                                                            : std::min(q, detmath::pow(q, gamma));
  });
  res.grid = ProbabilityGrid(p_prev.size(), std::move(out));
  return res;
}

ProbabilityGrid modulate(const ProbabilityGrid& p_prev, const Click& click, const ClickHistory& history,
                         const ModulationParams& params) {
  return modulate_detailed(p_prev, click, history, params).grid;
}

}  // namespace mfp
