#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfp/clicksim.hpp"
#include "mfp/segmenter.hpp"

namespace mfp {

// Engine configuration shared by `eval`, `simulate` and `serve`.
//
// JSON keys (all optional, defaults shown):
//   backend            "reference"
//   reference          {sigma_s: 40, sigma_c: 0.25, alpha: 4, beta: 1}
//   modulation         {switch_click: 7, max_radius: 100, target_fg: 0.99, target_bg: 0.01, eps: 1e-4}
//   modulation_enabled true
//   click_radius       5
//   max_clicks         20
//   threshold          0.5
//   targets            [0.85, 0.90, 0.95]
//   jobs               1
struct EvalConfig {
  std::string backend = "reference";
  ReferenceSegmenterParams reference;
  SessionOptions session;
  std::vector<double> targets{0.85, 0.90, 0.95};
  int jobs = 1;

  int cap() const { return session.max_clicks; }
  void validate() const;
};

EvalConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const EvalConfig& config);
EvalConfig load_config(const std::filesystem::path& path);

// Backend registry; "reference" is the only built-in name.
std::unique_ptr<Segmenter> make_backend(const EvalConfig& config);

}  // namespace mfp
