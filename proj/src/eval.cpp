#include "mfp/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "mfp/io.hpp"

namespace mfp {

DatasetManifest manifest_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  DatasetManifest m;
  try {
    m.name = j.at("name").get<std::string>();
    std::set<std::string> ids;
    for (const auto& s : j.at("samples")) {
      ManifestSample sample{s.at("id").get<std::string>(), s.at("image").get<std::string>(),
                            s.at("mask").get<std::string>()};
      if (sample.id.empty()) throw InvalidArgument("manifest sample with empty id");
      if (!ids.insert(sample.id).second) throw InvalidArgument("duplicate sample id '" + sample.id + "'");
      if (sample.image.is_relative()) sample.image = base_dir / sample.image;
      if (sample.mask.is_relative()) sample.mask = base_dir / sample.mask;
      m.samples.push_back(std::move(sample));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("manifest: ") + e.what());
  }
  return m;
}

nlohmann::json manifest_to_json(const DatasetManifest& m, const std::filesystem::path& base_dir) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : m.samples) {
    samples.push_back({{"id", s.id},
                       {"image", s.image.lexically_relative(base_dir).generic_string()},
                       {"mask", s.mask.lexically_relative(base_dir).generic_string()}});
  }
  return {{"name", m.name}, {"samples", samples}};
}

DatasetManifest load_manifest(const std::filesystem::path& path, bool check_files) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("manifest " + path.string() + ": " + e.what());
  }
  DatasetManifest m = manifest_from_json(j, path.parent_path());
  if (check_files) {
    for (const auto& s : m.samples) {
      for (const auto& f : {s.image, s.mask}) {
        if (!std::filesystem::exists(f)) throw Error("sample '" + s.id + "': missing file " + f.string());
      }
    }
  }
  return m;
}

namespace {

// Mean of doubles, correctly rounded for the lengths used here: error-free
// summation into hi + lo, then one exact-remainder division step.
double accurate_mean(const std::vector<double>& v) {
  double hi = 0.0;
  double lo = 0.0;
  for (double x : v) {
    const double s = hi + x;
    const double bb = s - hi;
    lo += (hi - (s - bb)) + (x - bb);
    hi = s;
  }
  const double n = static_cast<double>(v.size());
  const double q = hi / n;
  const double r = std::fma(-q, n, hi);
  return q + (r + lo) / n;
}

}  // namespace

NocResult noc(const std::vector<double>& ious, double target, int cap) {
  const std::size_t limit = std::min(ious.size(), static_cast<std::size_t>(std::max(cap, 0)));
  for (std::size_t k = 0; k < limit; ++k) {
    if (ious[k] >= target) return {static_cast<int>(k) + 1, false};
  }
  return {cap, true};
}

NocResult noc(const SessionTrajectory& traj, double target, int cap) { return noc(traj.ious(), target, cap); }

std::vector<double> miou_curve(const std::vector<std::vector<double>>& per_sample_ious, int cap) {
  if (per_sample_ious.empty()) throw InvalidArgument("miou_curve: no trajectories");
  if (cap < 1) throw InvalidArgument("miou_curve: cap must be at least 1");
  std::vector<double> curve(static_cast<std::size_t>(cap), 0.0);
  for (std::size_t k = 0; k < curve.size(); ++k) {
    std::vector<double> at_k;
    at_k.reserve(per_sample_ious.size());
    for (const auto& ious : per_sample_ious) {
      if (ious.empty()) throw InvalidArgument("miou_curve: empty trajectory");
      at_k.push_back(ious[std::min(k, ious.size() - 1)]);
    }
    curve[k] = accurate_mean(at_k);
  }
  return curve;
}

std::vector<double> miou_curve(const std::vector<SessionTrajectory>& trajs, int cap) {
  std::vector<std::vector<double>> ious;
  ious.reserve(trajs.size());
  for (const auto& t : trajs) ious.push_back(t.ious());
  return miou_curve(ious, cap);
}

double auc(const std::vector<double>& curve) {
  if (curve.empty()) throw InvalidArgument("auc: empty curve");
  return accurate_mean(curve);
}

namespace {

struct SampleOutcome {
  std::optional<SampleResult> result;
  std::string error;
};

SampleOutcome evaluate_sample(const ManifestSample& sample, const EvalConfig& config, const Segmenter& backend) {
  SampleOutcome out;
  try {
    const ImageRGB image = io::read_image_png(sample.image);
    const BinaryMask gt = io::read_mask_png(sample.mask);
    if (gt.size() != image.size()) throw DimensionMismatch("mask and image dimensions differ");
    if (gt.empty()) throw InvalidArgument("ground-truth mask is empty");
    const SessionTrajectory traj = run_session(image, gt, backend, config.session);
    SampleResult r{sample.id, traj.ious(), {}};
    for (double t : config.targets) r.noc.push_back(noc(r.ious, t, config.cap()));
    out.result = std::move(r);
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

EvalReport run_benchmark(const DatasetManifest& manifest, const EvalConfig& config) {
  config.validate();
  if (manifest.samples.empty()) throw InvalidArgument("manifest '" + manifest.name + "' has no samples");

  std::vector<const ManifestSample*> order;
  for (const auto& s : manifest.samples) order.push_back(&s);
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) { return a->id < b->id; });

  const auto backend = make_backend(config);
  std::vector<SampleOutcome> outcomes(order.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < order.size(); i = next++) outcomes[i] = evaluate_sample(*order[i], config, *backend);
  };
  {
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(config.jobs), order.size());
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
  }

  EvalReport report;
  report.dataset = manifest.name;
  report.config = config;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (outcomes[i].result) {
      report.samples.push_back(std::move(*outcomes[i].result));
    } else {
      report.skipped.push_back({order[i]->id, outcomes[i].error});
    }
  }
  if (report.samples.empty()) throw Error("no sample of '" + manifest.name + "' could be evaluated");

  const std::size_t nt = config.targets.size();
  report.mean_noc.assign(nt, 0.0);
  report.failures.assign(nt, 0);
  for (std::size_t t = 0; t < nt; ++t) {
    double sum = 0.0;
    for (const auto& s : report.samples) {
      sum += s.noc[t].clicks;
      report.failures[t] += s.noc[t].failed ? 1 : 0;
    }
    report.mean_noc[t] = sum / static_cast<double>(report.samples.size());
  }
  std::vector<std::vector<double>> ious;
  for (const auto& s : report.samples) ious.push_back(s.ious);
  report.miou = miou_curve(ious, config.cap());
  report.auc = auc(report.miou);
  return report;
}

std::string noc_label(double target) {
  const double pct = target * 100.0;
  std::ostringstream os;
  if (std::abs(pct - std::round(pct)) < 1e-9) {
    os << "NoC@" << std::lround(pct);
  } else {
    os << "NoC@" << pct;
  }
  return os.str();
}

nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : r.samples) {
    nlohmann::json noc_j = nlohmann::json::object();
    nlohmann::json failed = nlohmann::json::array();
    for (std::size_t t = 0; t < r.config.targets.size(); ++t) {
      noc_j[noc_label(r.config.targets[t])] = s.noc[t].clicks;
      if (s.noc[t].failed) failed.push_back(noc_label(r.config.targets[t]));
    }
    samples.push_back({{"id", s.id}, {"ious", s.ious}, {"noc", noc_j}, {"failed", failed}});
  }
  nlohmann::json skipped = nlohmann::json::array();
  for (const auto& s : r.skipped) skipped.push_back({{"id", s.id}, {"error", s.error}});
  nlohmann::json mean = nlohmann::json::object();
  nlohmann::json failures = nlohmann::json::object();
  for (std::size_t t = 0; t < r.config.targets.size(); ++t) {
    mean[noc_label(r.config.targets[t])] = r.mean_noc[t];
    failures[noc_label(r.config.targets[t])] = r.failures[t];
  }
  return {{"dataset", r.dataset},     {"config", config_to_json(r.config)},
          {"num_samples", r.samples.size()}, {"mean_noc", mean},
          {"failures", failures},     {"miou", r.miou},
          {"auc", r.auc},             {"samples", samples},
          {"skipped", skipped}};
}

std::string report_to_string(const EvalReport& report) { return report_to_json(report).dump(2) + "\n"; }

std::string noc_csv(const EvalReport& r) {
  std::ostringstream os;
  os << "id";
  for (double t : r.config.targets) os << "," << noc_label(t);
  os << "\n";
  for (const auto& s : r.samples) {
    os << s.id;
    for (const auto& n : s.noc) os << "," << n.clicks;
    os << "\n";
  }
  os << "mean";
  for (double m : r.mean_noc) os << "," << nlohmann::json(m).dump();
  os << "\n";
  return os.str();
}

std::string miou_csv(const EvalReport& r) {
  std::ostringstream os;
  os << "clicks,miou\n";
  for (std::size_t k = 0; k < r.miou.size(); ++k) os << k + 1 << "," << nlohmann::json(r.miou[k]).dump() << "\n";
  return os.str();
}

}  // namespace mfp
