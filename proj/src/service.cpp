#include "mfp/service.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <random>

#include "mfp/io.hpp"

namespace mfp {

namespace {

using json = nlohmann::json;

SessionService::Response error(int status, const std::string& message) { return {status, {{"error", message}}}; }

std::string iso_time(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string grid_b64(const Grid<double>& g) { return io::base64_encode(io::encode_grid(g)); }

json click_json(const Click& c) {
  return {{"row", c.pos.row},
          {"col", c.pos.col},
          {"label", c.label == Label::foreground ? "fg" : "bg"},
          {"index", c.index}};
}

std::optional<Label> parse_label(const json& j) {
  if (!j.is_string()) return std::nullopt;
  const auto s = j.get<std::string>();
  if (s == "fg" || s == "foreground") return Label::foreground;
  if (s == "bg" || s == "background") return Label::background;
  return std::nullopt;
}

}  // namespace

SessionService::SessionService(ServiceOptions options)
    : options_(std::move(options)), backend_(make_backend(options_.config)) {
  options_.config.validate();
  if (options_.max_sessions < 1) throw InvalidArgument("max_sessions must be at least 1");
  id_salt_ = (static_cast<std::uint64_t>(std::random_device{}()) << 32) ^ std::random_device{}();
}

SessionService::~SessionService() = default;

std::size_t SessionService::session_count() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

std::shared_ptr<SessionService::Session> SessionService::find(const std::string& id) {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) return nullptr;
  it->second->last_used = ++tick_;
  return it->second;
}

SessionService::Response SessionService::open_session(ImageRGB image, std::optional<BinaryMask> gt, json extra) {
  if (gt && gt->size() != image.size()) return error(400, "mask dimensions do not match the image");
  auto s = std::make_shared<Session>();
  s->image = std::move(image);
  s->gt = std::move(gt);
  s->created = s->updated = std::chrono::system_clock::now();
  {
    std::lock_guard lock(mu_);
    // Counter mixed through an odd multiplier: a bijection, so ids never collide.
    const std::uint64_t raw = ((next_id_++) ^ id_salt_) * 0x9E3779B97F4A7C15ull;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(raw));
    s->id = buf;
    s->last_used = ++tick_;
    while (sessions_.size() >= options_.max_sessions) {
      const auto lru = std::min_element(sessions_.begin(), sessions_.end(), [](const auto& a, const auto& b) {
        return a.second->last_used < b.second->last_used;
      });
      sessions_.erase(lru);
    }
    sessions_.emplace(s->id, s);
  }
  json body = {{"id", s->id},
               {"width", s->image.width()},
               {"height", s->image.height()},
               {"gt_available", s->gt.has_value()},
               {"round", 0}};
  body.update(extra);
  return {201, body};
}

SessionService::Response SessionService::create_session_from_png(const std::string& png_bytes) {
  try {
    const auto* p = reinterpret_cast<const std::uint8_t*>(png_bytes.data());
    return open_session(io::decode_image_png(std::span(p, png_bytes.size())), std::nullopt, json::object());
  } catch (const Error& e) {
    return error(400, std::string("malformed image: ") + e.what());
  }
}

SessionService::Response SessionService::create_session(const json& request) {
  if (!request.is_object()) return error(400, "request body must be a JSON object");
  if (request.contains("dataset") || request.contains("sample")) {
    if (!request.contains("dataset") || !request["dataset"].is_string() || !request.contains("sample") ||
        !request["sample"].is_string()) {
      return error(400, "dataset sessions need string fields 'dataset' and 'sample'");
    }
    const auto name = request["dataset"].get<std::string>();
    const auto sample_id = request["sample"].get<std::string>();
    const auto manifest = find_dataset(name);
    if (!manifest) return error(404, "unknown dataset '" + name + "'");
    const auto it = std::find_if(manifest->samples.begin(), manifest->samples.end(),
                                 [&](const ManifestSample& s) { return s.id == sample_id; });
    if (it == manifest->samples.end()) return error(404, "unknown sample '" + sample_id + "' in '" + name + "'");
    try {
      return open_session(io::read_image_png(it->image), io::read_mask_png(it->mask),
                          {{"dataset", name}, {"sample", sample_id}});
    } catch (const Error& e) {
      return error(500, std::string("cannot load sample: ") + e.what());
    }
  }

  if (!request.contains("image_png") || !request["image_png"].is_string()) {
    return error(400, "missing 'image_png' (base64 PNG) or 'dataset'/'sample'");
  }
  try {
    ImageRGB image = io::decode_image_png(io::base64_decode(request["image_png"].get<std::string>()));
    std::optional<BinaryMask> gt;
    if (request.contains("mask_png") && !request["mask_png"].is_null()) {
      if (!request["mask_png"].is_string()) return error(400, "'mask_png' must be a base64 string");
      gt = io::decode_mask_png(io::base64_decode(request["mask_png"].get<std::string>()));
    }
    return open_session(std::move(image), std::move(gt), json::object());
  } catch (const Error& e) {
    return error(400, std::string("malformed image: ") + e.what());
  }
}

SessionService::Response SessionService::add_click(const std::string& id, const json& request) {
  const auto s = find(id);
  if (!s) return error(404, "unknown session '" + id + "'");
  if (!request.is_object() || !request.contains("row") || !request.contains("col") ||
      !request["row"].is_number_integer() || !request["col"].is_number_integer() || !request.contains("label")) {
    return error(400, "click needs integer 'row', 'col' and a 'label'");
  }
  const auto label = parse_label(request["label"]);
  if (!label) return error(400, "label must be 'fg' or 'bg'");
  const PixelCoord pos{request["row"].get<int>(), request["col"].get<int>()};

  std::lock_guard lock(s->mu);
  if (!s->image.contains(pos)) return error(422, "click outside the image");
  if (s->history.size() >= static_cast<std::size_t>(options_.config.cap())) {
    return error(409, "click budget of " + std::to_string(options_.config.cap()) + " reached");
  }
  const Click click{pos, *label, static_cast<int>(s->history.size()) + 1};
  const ProbabilityGrid p_prev = s->rounds.empty() ? ProbabilityGrid::zeros(s->image.size()) : s->rounds.back().p;
  RoundOutcome out;
  try {
    out = run_round(s->image, s->history, click, p_prev, *backend_, options_.config.session);
  } catch (const Error& e) {
    return error(500, std::string("segmentation failed: ") + e.what());
  }
  s->history.add(click);
  s->rounds.push_back({std::move(out.p_prev_mod), std::move(out.p), std::move(out.mask), out.window});
  s->updated = std::chrono::system_clock::now();
  return {200, round_body(*s, s->rounds.size())};
}

SessionService::Response SessionService::undo(const std::string& id) {
  const auto s = find(id);
  if (!s) return error(404, "unknown session '" + id + "'");
  std::lock_guard lock(s->mu);
  if (s->history.empty()) return error(409, "nothing to undo at round 0");
  s->history.pop_back();
  s->rounds.pop_back();
  s->updated = std::chrono::system_clock::now();
  return {200, summary(*s)};
}

SessionService::Response SessionService::reset(const std::string& id) {
  const auto s = find(id);
  if (!s) return error(404, "unknown session '" + id + "'");
  std::lock_guard lock(s->mu);
  if (!s->history.empty()) {
    s->history = ClickHistory{};
    s->rounds.clear();
    s->updated = std::chrono::system_clock::now();
  }
  return {200, summary(*s)};
}

SessionService::Response SessionService::get_session(const std::string& id) {
  const auto s = find(id);
  if (!s) return error(404, "unknown session '" + id + "'");
  std::lock_guard lock(s->mu);
  return {200, summary(*s)};
}

std::optional<SessionState> SessionService::state(const std::string& id) const {
  std::shared_ptr<Session> s;
  {
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) return std::nullopt;
    s = it->second;
  }
  std::lock_guard lock(s->mu);
  return state_of(*s);
}

SessionState SessionService::state_of(const Session& s) {
  SessionState st{s.image, s.gt, s.history, ProbabilityGrid::zeros(s.image.size()), std::nullopt,
                  static_cast<int>(s.history.size())};
  if (!s.rounds.empty()) {
    st.p_prev = s.rounds.back().p;
    st.p_prev_mod = s.rounds.back().p_prev_mod;
  }
  return st;
}

json SessionService::round_body(const Session& s, std::size_t round) const {
  const RoundSnapshot& snap = s.rounds[round - 1];
  const ProbabilityGrid p_prev = round == 1 ? ProbabilityGrid::zeros(s.image.size()) : s.rounds[round - 2].p;
  json body = {{"round", round},
               {"click", click_json(s.history[round - 1])},
               {"mask_png", io::base64_encode(io::encode_mask_png(snap.mask))},
               {"p_prev", grid_b64(p_prev)},
               {"p_mod", grid_b64(snap.p_prev_mod)},
               {"p", grid_b64(snap.p)},
               {"modulated", snap.window.has_value()},
               {"gt_available", s.gt.has_value()}};
  if (snap.window) {
    body["window"] = {{"row", snap.window->center.row}, {"col", snap.window->center.col}, {"radius", snap.window->radius}};
  } else {
    body["window"] = nullptr;
  }
  if (s.gt) body["iou"] = iou(snap.mask, *s.gt);
  return body;
}

json SessionService::summary(const Session& s) const {
  json clicks = json::array();
  for (const Click& c : s.history) clicks.push_back(click_json(c));
  json body = {{"id", s.id},
               {"width", s.image.width()},
               {"height", s.image.height()},
               {"round", s.history.size()},
               {"clicks", clicks},
               {"gt_available", s.gt.has_value()},
               {"created", iso_time(s.created)},
               {"updated", iso_time(s.updated)}};
  body["latest"] = s.rounds.empty() ? json(nullptr) : round_body(s, s.rounds.size());
  return body;
}

std::vector<DatasetManifest> SessionService::datasets() const {
  std::vector<DatasetManifest> out;
  if (options_.dataset_root.empty() || !std::filesystem::is_directory(options_.dataset_root)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(options_.dataset_root)) {
    if (entry.path().extension() != ".json") continue;
    try {
      out.push_back(load_manifest(entry.path(), false));
    } catch (const Error&) {
      // Not a manifest; ignore.
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return out;
}

std::optional<DatasetManifest> SessionService::find_dataset(const std::string& name) const {
  for (auto& m : datasets()) {
    if (m.name == name) return std::move(m);
  }
  return std::nullopt;
}

SessionService::Response SessionService::list_datasets() {
  json list = json::array();
  for (const auto& m : datasets()) {
    json ids = json::array();
    for (const auto& s : m.samples) ids.push_back(s.id);
    list.push_back({{"name", m.name}, {"samples", ids}});
  }
  return {200, {{"datasets", list}}};
}

SessionService::Response SessionService::get_dataset_sample(const std::string& dataset, const std::string& sample) {
  const auto manifest = find_dataset(dataset);
  if (!manifest) return error(404, "unknown dataset '" + dataset + "'");
  for (const auto& s : manifest->samples) {
    if (s.id != sample) continue;
    try {
      const auto image = io::read_file(s.image);
      const auto mask = io::read_file(s.mask);
      const ImageRGB img = io::decode_image_png(image);
      return {200,
              {{"dataset", dataset},
               {"id", s.id},
               {"width", img.width()},
               {"height", img.height()},
               {"image_png", io::base64_encode(image)},
               {"mask_png", io::base64_encode(mask)}}};
    } catch (const Error& e) {
      return error(500, std::string("cannot load sample: ") + e.what());
    }
  }
  return error(404, "unknown sample '" + sample + "' in '" + dataset + "'");
}

}  // namespace mfp
