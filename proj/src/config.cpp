#include "mfp/config.hpp"

#include <algorithm>
#include <fstream>

namespace mfp {

namespace {

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void reject_unknown(const nlohmann::json& j, std::initializer_list<std::string_view> known, const char* where) {
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw InvalidArgument(std::string("unknown config key '") + key + "' in " + where);
    }
  }
}

}  // namespace

void EvalConfig::validate() const {
  if (backend != "reference") throw InvalidArgument("unknown backend '" + backend + "'");
  reference.validate();
  session.modulation.validate();
  if (session.max_clicks < 1) throw InvalidArgument("max_clicks must be at least 1");
  if (session.click_radius < 0) throw InvalidArgument("click_radius must be non-negative");
  if (!(session.threshold > 0.0 && session.threshold < 1.0)) throw InvalidArgument("threshold must lie in (0,1)");
  if (targets.empty()) throw InvalidArgument("at least one target IoU is required");
  for (double t : targets) {
    if (!(t > 0.0 && t < 1.0)) throw InvalidArgument("target IoUs must lie in (0,1)");
  }
  if (jobs < 1) throw InvalidArgument("jobs must be at least 1");
}

EvalConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  EvalConfig c;
  try {
    reject_unknown(j,
                   {"backend", "reference", "modulation", "modulation_enabled", "click_radius", "max_clicks",
                    "threshold", "targets", "jobs"},
                   "config");
    read_opt(j, "backend", c.backend);
    if (j.contains("reference")) {
      const auto& r = j.at("reference");
      reject_unknown(r, {"sigma_s", "sigma_c", "alpha", "beta"}, "reference");
      read_opt(r, "sigma_s", c.reference.sigma_s);
      read_opt(r, "sigma_c", c.reference.sigma_c);
      read_opt(r, "alpha", c.reference.alpha);
      read_opt(r, "beta", c.reference.beta);
    }
    if (j.contains("modulation")) {
      const auto& m = j.at("modulation");
      reject_unknown(m, {"switch_click", "max_radius", "target_fg", "target_bg", "eps"}, "modulation");
      read_opt(m, "switch_click", c.session.modulation.switch_click);
      read_opt(m, "max_radius", c.session.modulation.max_radius);
      read_opt(m, "target_fg", c.session.modulation.target_fg);
      read_opt(m, "target_bg", c.session.modulation.target_bg);
      read_opt(m, "eps", c.session.modulation.eps);
    }
    read_opt(j, "modulation_enabled", c.session.modulation_enabled);
    read_opt(j, "click_radius", c.session.click_radius);
    read_opt(j, "max_clicks", c.session.max_clicks);
    read_opt(j, "threshold", c.session.threshold);
    read_opt(j, "targets", c.targets);
    read_opt(j, "jobs", c.jobs);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json config_to_json(const EvalConfig& c) {
  const auto& m = c.session.modulation;
  return {
      {"backend", c.backend},
      {"reference",
       {{"sigma_s", c.reference.sigma_s},
        {"sigma_c", c.reference.sigma_c},
        {"alpha", c.reference.alpha},
        {"beta", c.reference.beta}}},
      {"modulation",
       {{"switch_click", m.switch_click},
        {"max_radius", m.max_radius},
        {"target_fg", m.target_fg},
        {"target_bg", m.target_bg},
        {"eps", m.eps}}},
      {"modulation_enabled", c.session.modulation_enabled},
      {"click_radius", c.session.click_radius},
      {"max_clicks", c.session.max_clicks},
      {"threshold", c.session.threshold},
      {"targets", c.targets},
  };
}

EvalConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

std::unique_ptr<Segmenter> make_backend(const EvalConfig& config) {
  if (config.backend == "reference") return std::make_unique<ReferenceSegmenter>(config.reference);
  throw InvalidArgument("unknown backend '" + config.backend + "'");
}

}  // namespace mfp
