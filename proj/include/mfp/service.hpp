#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfp/clicksim.hpp"
#include "mfp/config.hpp"
#include "mfp/eval.hpp"

namespace mfp {

struct SessionState {
  ImageRGB image;
  std::optional<BinaryMask> gt;
  ClickHistory history;
  ProbabilityGrid p_prev;                    // latest prediction (all zeros at round 0)
  std::optional<ProbabilityGrid> p_prev_mod;  // prior used in the latest round
  int round = 0;

  friend bool operator==(const SessionState&, const SessionState&) = default;
};

struct ServiceOptions {
  EvalConfig config;
  std::filesystem::path dataset_root;  // directory of manifest JSON files; may be empty
  std::size_t max_sessions = 64;       // least recently used sessions are evicted beyond this
};

// Transport-independent session API. Every method returns an HTTP status code
// and a JSON body; the HTTP layer only routes and serializes.
//
// Sessions are independent: calls on different sessions run concurrently,
// calls on the same session are serialized.
class SessionService {
 public:
  struct Response {
    int status = 200;
    nlohmann::json body;
  };

  explicit SessionService(ServiceOptions options);
  ~SessionService();

  // Body is either {"image_png": b64, "mask_png"?: b64} or {"dataset": name, "sample": id}.
  Response create_session(const nlohmann::json& request);
  // Raw PNG upload without ground truth.
  Response create_session_from_png(const std::string& png_bytes);
  Response add_click(const std::string& id, const nlohmann::json& request);
  Response undo(const std::string& id);
  Response reset(const std::string& id);
  Response get_session(const std::string& id);
  Response list_datasets();
  Response get_dataset_sample(const std::string& dataset, const std::string& sample);

  std::size_t session_count() const;
  // Snapshot of a session's state, for tests and tooling.
  std::optional<SessionState> state(const std::string& id) const;

 private:
  struct RoundSnapshot {
    ProbabilityGrid p_prev_mod;
    ProbabilityGrid p;
    BinaryMask mask;
    std::optional<ModulationWindow> window;
  };

  struct Session {
    mutable std::mutex mu;
    std::string id;
    ImageRGB image;
    std::optional<BinaryMask> gt;
    ClickHistory history;
    std::vector<RoundSnapshot> rounds;  // rounds[k] is the outcome of click k+1
    std::chrono::system_clock::time_point created;
    std::chrono::system_clock::time_point updated;
    std::uint64_t last_used = 0;
  };

  Response open_session(ImageRGB image, std::optional<BinaryMask> gt, nlohmann::json extra);
  std::shared_ptr<Session> find(const std::string& id);
  std::optional<DatasetManifest> find_dataset(const std::string& name) const;
  std::vector<DatasetManifest> datasets() const;

  static SessionState state_of(const Session& s);
  nlohmann::json summary(const Session& s) const;
  nlohmann::json round_body(const Session& s, std::size_t round) const;

  ServiceOptions options_;
  std::unique_ptr<Segmenter> backend_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t tick_ = 0;
  std::uint64_t next_id_ = 1;
  std::uint64_t id_salt_ = 0;
};

}  // namespace mfp
