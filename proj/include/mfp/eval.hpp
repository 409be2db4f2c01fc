#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfp/clicksim.hpp"
#include "mfp/config.hpp"

namespace mfp {

// Manifest JSON:
//   {"name": "<dataset>", "samples": [{"id": "...", "image": "a.png", "mask": "a_gt.png"}, ...]}
// Relative paths resolve against the manifest's directory.
struct ManifestSample {
  std::string id;
  std::filesystem::path image;
  std::filesystem::path mask;
};

struct DatasetManifest {
  std::string name;
  std::vector<ManifestSample> samples;
};

DatasetManifest manifest_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
nlohmann::json manifest_to_json(const DatasetManifest& m, const std::filesystem::path& base_dir);
// Throws on malformed JSON, duplicate ids, or (when check_files) missing files.
DatasetManifest load_manifest(const std::filesystem::path& path, bool check_files = true);

struct NocResult {
  int clicks = 0;
  bool failed = false;
};

// First round whose IoU reaches `target`, looking at no more than `cap`
// rounds. Unreached targets score `cap` and are flagged failed.
NocResult noc(const SessionTrajectory& traj, double target, int cap);
NocResult noc(const std::vector<double>& ious, double target, int cap);

// Mean IoU after k clicks for k = 1..cap. Short trajectories carry their last
// IoU forward.
std::vector<double> miou_curve(const std::vector<std::vector<double>>& per_sample_ious, int cap);
std::vector<double> miou_curve(const std::vector<SessionTrajectory>& trajs, int cap);

// Normalized area under an mIoU curve: the mean of its entries.
double auc(const std::vector<double>& curve);

struct SampleResult {
  std::string id;
  std::vector<double> ious;
  std::vector<NocResult> noc;  // one per target
};

struct SkippedSample {
  std::string id;
  std::string error;
};

struct EvalReport {
  std::string dataset;
  EvalConfig config;
  std::vector<SampleResult> samples;  // ordered by id
  std::vector<SkippedSample> skipped;
  std::vector<double> mean_noc;       // one per target
  std::vector<int> failures;          // one per target
  std::vector<double> miou;           // length cap
  double auc = 0.0;
};

EvalReport run_benchmark(const DatasetManifest& manifest, const EvalConfig& config);

nlohmann::json report_to_json(const EvalReport& report);
// Canonical serialized form; identical inputs give identical bytes.
std::string report_to_string(const EvalReport& report);
std::string noc_csv(const EvalReport& report);
std::string miou_csv(const EvalReport& report);

// "NoC@85" for 0.85.
std::string noc_label(double target);

}  // namespace mfp
