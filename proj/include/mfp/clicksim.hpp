#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mfp/grid.hpp"
#include "mfp/modulation.hpp"
#include "mfp/segmenter.hpp"

namespace mfp {

// Foreground click at the pixel deepest inside the object (argmax of the
// distance transform, ties to the smallest row-major index). Index 1.
Click first_click(const BinaryMask& gt);

// Click at the deepest pixel of the largest false-negative or false-positive
// region. Foreground for a miss, background for a hallucination.
Click next_click(const BinaryMask& pred, const BinaryMask& gt, const ClickHistory& history);

struct RoundRecord {
  Click click;
  ProbabilityGrid p_prev_mod;  // the map handed to the backend as the prior
  ProbabilityGrid p;           // backend output for this round
  BinaryMask mask;
  std::optional<double> iou;
  std::optional<ModulationWindow> window;  // absent when modulation is off
};

struct SessionTrajectory {
  std::vector<RoundRecord> rounds;

  std::size_t size() const { return rounds.size(); }
  std::vector<double> ious() const;
};

struct SessionOptions {
  ModulationParams modulation;
  bool modulation_enabled = true;
  int max_clicks = 20;
  int click_radius = 5;
  double threshold = 0.5;
};

// Observation points for tests and tooling.
struct SessionHooks {
  std::function<void(const Click&)> on_modulate;
  std::function<void(const RoundRecord&)> on_round;
};

// Output of one interactive round given the state before it.
struct RoundOutcome {
  ProbabilityGrid p_prev_mod;
  ProbabilityGrid p;
  BinaryMask mask;
  std::optional<ModulationWindow> window;
};

// Runs modulate (when enabled) -> predict -> threshold for `click`, where
// `history` holds the clicks before it.
RoundOutcome run_round(const ImageRGB& image, const ClickHistory& history, const Click& click,
                       const ProbabilityGrid& p_prev, const Segmenter& backend, const SessionOptions& opts,
                       const SessionHooks* hooks = nullptr);

// Simulated session against ground truth. Starts from an all-zero map and
// stops after max_clicks rounds or once the prediction equals gt.
SessionTrajectory run_session(const ImageRGB& image, const BinaryMask& gt, const Segmenter& backend,
                              const SessionOptions& opts, const SessionHooks* hooks = nullptr);

}  // namespace mfp
