#include "mfp/clicksim.hpp"

#include <string>

namespace mfp {

namespace {

// Deepest pixel of `region`; ties go to the smallest row-major index.
PixelCoord deepest_pixel(const BinaryMask& region) {
  const DistanceGrid dist = distance_to_zero(region);
  std::size_t best = 0;
  double best_d = -1.0;
  for (std::size_t i = 0; i < dist.size().area(); ++i) {
    if (region[i] && dist[i] > best_d) {
      best_d = dist[i];
      best = i;
    }
  }
  return region.coord(best);
}

}  // namespace

Click first_click(const BinaryMask& gt) {
  if (gt.empty()) throw InvalidArgument("first_click: ground truth has no foreground pixel");
  return Click{deepest_pixel(gt), Label::foreground, 1};
}

Click next_click(const BinaryMask& pred, const BinaryMask& gt, const ClickHistory& history) {
  if (pred.size() != gt.size()) throw DimensionMismatch("next_click: prediction and ground truth differ in size");

  const std::size_t n = gt.size().area();
  std::vector<std::uint8_t> fn(n), fp(n);
  for (std::size_t i = 0; i < n; ++i) {
    fn[i] = gt[i] && !pred[i];
    fp[i] = !gt[i] && pred[i];
  }
  const BinaryMask fn_mask(gt.size(), std::move(fn));
  const BinaryMask fp_mask(gt.size(), std::move(fp));

  const auto fn_comps = connected_components(fn_mask);
  const auto fp_comps = connected_components(fp_mask);
  if (fn_comps.empty() && fp_comps.empty()) throw InvalidArgument("next_click: prediction already equals ground truth");

  // Each list is already ordered, so only the two heads compete.
  const Component* best = nullptr;
  bool best_is_fn = false;
  auto consider = [&](const Component& c, bool is_fn) {
    if (best == nullptr || c.area() > best->area() ||
        (c.area() == best->area() && gt.index(c.pixels.front()) < gt.index(best->pixels.front()))) {
      best = &c;
      best_is_fn = is_fn;
    }
  };
  if (!fn_comps.empty()) consider(fn_comps.front(), true);
  if (!fp_comps.empty()) consider(fp_comps.front(), false);

  BinaryMask region(gt.size());
  for (PixelCoord p : best->pixels) region.set(p, true);
  return Click{deepest_pixel(region), best_is_fn ? Label::foreground : Label::background,
               static_cast<int>(history.size()) + 1};
}

std::vector<double> SessionTrajectory::ious() const {
  std::vector<double> out;
  out.reserve(rounds.size());
  for (const auto& r : rounds) out.push_back(r.iou.value_or(0.0));
  return out;
}

RoundOutcome run_round(const ImageRGB& image, const ClickHistory& history, const Click& click,
                       const ProbabilityGrid& p_prev, const Segmenter& backend, const SessionOptions& opts,
                       const SessionHooks* hooks) {
  RoundOutcome out;
  if (opts.modulation_enabled) {
    if (hooks && hooks->on_modulate) hooks->on_modulate(click);
    ModulationResult mod = modulate_detailed(p_prev, click, history, opts.modulation);
    out.p_prev_mod = std::move(mod.grid);
    out.window = mod.window;
  } else {
    if (!p_prev.contains(click.pos)) throw OutOfBounds("click outside image");
    out.p_prev_mod = p_prev;
  }

  ClickHistory with_click = history;
  with_click.add(click);
  const ClickMaps maps = encode_clicks(with_click, image.size(), opts.click_radius);
  const BackendInput input{image, with_click, maps, p_prev, out.p_prev_mod};
  check_dimensions(input);
  out.p = backend.predict(input);
  if (out.p.size() != image.size()) throw DimensionMismatch("backend '" + backend.name() + "' returned a wrong-sized map");
  out.mask = threshold(out.p, opts.threshold);
  return out;
}

SessionTrajectory run_session(const ImageRGB& image, const BinaryMask& gt, const Segmenter& backend,
                              const SessionOptions& opts, const SessionHooks* hooks) {
  if (opts.max_clicks < 1) throw InvalidArgument("max_clicks must be at least 1");
  if (gt.size() != image.size()) throw DimensionMismatch("ground truth does not match image dimensions");

  SessionTrajectory traj;
  ClickHistory history;
  ProbabilityGrid p_prev = ProbabilityGrid::zeros(image.size());
  BinaryMask pred(image.size());

  for (int t = 1; t <= opts.max_clicks; ++t) {
    const Click click = t == 1 ? first_click(gt) : next_click(pred, gt, history);
    RoundOutcome outcome;
    try {
      outcome = run_round(image, history, click, p_prev, backend, opts, hooks);
    } catch (const Error& e) {
      throw Error("round " + std::to_string(t) + ": " + e.what());
    }
    history.add(click);

    RoundRecord rec{click, std::move(outcome.p_prev_mod), outcome.p, outcome.mask, iou(outcome.mask, gt),
                    outcome.window};
    if (hooks && hooks->on_round) hooks->on_round(rec);
    p_prev = std::move(outcome.p);
    pred = std::move(outcome.mask);
    traj.rounds.push_back(std::move(rec));
    if (pred == gt) break;
  }
  return traj;
}

}  // namespace mfp
