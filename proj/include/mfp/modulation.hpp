#pragma once

#include "mfp/grid.hpp"

namespace mfp {

struct ModulationParams {
  int switch_click = 7;        // clicks with index <= switch_click use the probability scheme
  double max_radius = 100.0;   // pixels
  double target_fg = 0.99;     // calibrated value of the clicked pixel after a foreground click
  double target_bg = 0.01;     // ... and after a background click
  double eps = 1e-4;           // probabilities are clamped to [eps, 1-eps] inside the window

  // Throws InvalidArgument unless 0 < eps < target_bg < 0.5 < target_fg < 1,
  // max_radius > 0 and switch_click >= 0.
  void validate() const;

  friend bool operator==(const ModulationParams&, const ModulationParams&) = default;
};

struct ModulationWindow {
  PixelCoord center;
  double radius = 0.0;

  bool contains(PixelCoord x) const { return distance(x, center) <= radius; }
};

enum class GammaScheme { euclidean, probability };

// Radius of the modulation window: half the distance to the nearest previous
// click of the opposite label, capped at max_radius.
double compute_radius(PixelCoord u, const ClickHistory& history, Label label, double max_radius);

// Largest exponent, chosen so the clicked pixel lands exactly on the target
// probability. Never below 1.
double compute_big_gamma(double p_u, Label label, const ModulationParams& params);

// Linear falloff from big_gamma at the click to 1 at the window edge.
// A zero-radius window returns big_gamma.
double gamma_euclidean(double d, double radius, double big_gamma);

// Cubic falloff in probability distance; 1 beyond the median distance.
double gamma_probability(double d, double median_d, double big_gamma);

// Lower median of (P_x - P_u)^2 over the in-bounds pixels of the window.
double median_prob_distance(const ProbabilityGrid& p, PixelCoord u, const ModulationWindow& window);

GammaScheme scheme_for(int click_index, const ModulationParams& params);

struct ModulationResult {
  ProbabilityGrid grid;
  ModulationWindow window;
  double big_gamma = 1.0;
  GammaScheme scheme = GammaScheme::probability;
};

// Gamma-corrects p_prev inside the window around `click`. `history` holds the
// clicks strictly before `click` (so click.index == history.size() + 1).
ModulationResult modulate_detailed(const ProbabilityGrid& p_prev, const Click& click, const ClickHistory& history,
                                   const ModulationParams& params);

ProbabilityGrid modulate(const ProbabilityGrid& p_prev, const Click& click, const ClickHistory& history,
                         const ModulationParams& params);

}  // namespace mfp
