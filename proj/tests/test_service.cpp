#include <gtest/gtest.h>

#include <httplib.h>

#include <thread>

#include "fixtures.hpp"
#include "mfp/http.hpp"
#include "mfp/io.hpp"
#include "mfp/service.hpp"
#include "mfp/synthetic.hpp"
#include "oracles.hpp"

namespace mfp {
namespace {

using json = nlohmann::json;

json png_request(const SyntheticSample& s, bool with_mask = true) {
  json j = {{"image_png", io::base64_encode(io::encode_image_png(s.image))}};
  if (with_mask) j["mask_png"] = io::base64_encode(io::encode_mask_png(s.mask));
  return j;
}

json click(int row, int col, const char* label) { return {{"row", row}, {"col", col}, {"label", label}}; }

// Timestamps legitimately change between otherwise identical bodies.
json strip_times(json j) {
  j.erase("created");
  j.erase("updated");
  return j;
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = test::scratch_dir("service_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    write_synthetic_dataset(root_, "syn", {32, 32});
    suite_ = synthetic_suite({32, 32});
  }

  ServiceOptions options() const {
    ServiceOptions o;
    o.dataset_root = root_;
    return o;
  }

  std::filesystem::path root_;
  std::vector<SyntheticSample> suite_;
};

TEST_F(ServiceTest, CreateSessionStatuses) {
  SessionService svc(options());
  const auto ok = svc.create_session(png_request(suite_[0]));
  ASSERT_EQ(ok.status, 201) << ok.body;
  EXPECT_EQ(ok.body["round"], 0);
  EXPECT_EQ(ok.body["width"], 32);
  EXPECT_EQ(ok.body["gt_available"], true);

  EXPECT_EQ(svc.create_session(png_request(suite_[0], false)).body["gt_available"], false);
  EXPECT_EQ(svc.create_session(json{{"image_png", "AAAA"}}).status, 400);
  EXPECT_EQ(svc.create_session(json{{"image_png", "%%%%"}}).status, 400);
  EXPECT_EQ(svc.create_session(json::array()).status, 400);
  EXPECT_EQ(svc.create_session(json::object()).status, 400);

  json mismatched = png_request(suite_[0]);
  mismatched["mask_png"] = io::base64_encode(io::encode_mask_png(BinaryMask(Size{5, 5})));
  EXPECT_EQ(svc.create_session(mismatched).status, 400);

  EXPECT_EQ(svc.create_session({{"dataset", "syn"}, {"sample", "disk"}}).status, 201);
  EXPECT_EQ(svc.create_session({{"dataset", "nope"}, {"sample", "disk"}}).status, 404);
  EXPECT_EQ(svc.create_session({{"dataset", "syn"}, {"sample", "nope"}}).status, 404);
  EXPECT_EQ(svc.create_session({{"dataset", "syn"}}).status, 400);

  EXPECT_EQ(svc.create_session_from_png("garbage").status, 400);
  const auto raw = io::encode_image_png(suite_[1].image);
  EXPECT_EQ(svc.create_session_from_png(std::string(raw.begin(), raw.end())).status, 201);
}

TEST_F(ServiceTest, SpecExamples) {
  SessionService svc(options());
  const auto full = synthetic_suite();
  const auto png = io::encode_image_png(full[0].image);
  const auto created = svc.create_session_from_png(std::string(png.begin(), png.end()));
  ASSERT_EQ(created.status, 201);
  EXPECT_EQ(created.body["width"], 64);
  EXPECT_EQ(created.body["height"], 64);
  EXPECT_EQ(svc.create_session_from_png(std::string(png.begin(), png.begin() + static_cast<long>(png.size() / 2))).status,
            400);
  EXPECT_EQ(svc.create_session({{"dataset", "syn"}, {"sample", "disk"}}).body["gt_available"], true);

  const std::string id = created.body["id"];
  const auto r = svc.add_click(id, click(32, 32, "fg"));
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["round"], 1);
  const auto mask = io::decode_mask_png(io::base64_decode(r.body["mask_png"].get<std::string>()));
  EXPECT_TRUE(mask.test({32, 32}));
  const auto p_mod = io::decode_probability_grid(io::base64_decode(r.body["p_mod"].get<std::string>()));
  EXPECT_EQ(p_mod.at(32, 32), static_cast<float>(0.99));
}

TEST_F(ServiceTest, SameClicksGiveSameMasksAcrossSessions) {
  SessionService svc(options());
  const std::string a = svc.create_session({{"dataset", "syn"}, {"sample", "cross"}}).body["id"];
  const std::string b = svc.create_session({{"dataset", "syn"}, {"sample", "cross"}}).body["id"];
  for (const auto& c : {click(16, 16, "fg"), click(2, 2, "bg"), click(16, 5, "fg")}) {
    const auto ra = svc.add_click(a, c);
    svc.add_click(b, click(0, 31, "bg"));
    svc.undo(b);
    const auto rb = svc.add_click(b, c);
    EXPECT_EQ(ra.body["mask_png"], rb.body["mask_png"]);
    EXPECT_EQ(ra.body["p"], rb.body["p"]);
  }
}

TEST_F(ServiceTest, ClickStatuses) {
  SessionService svc(options());
  const std::string id = svc.create_session(png_request(suite_[0])).body["id"];
  EXPECT_EQ(svc.add_click("missing", click(1, 1, "fg")).status, 404);
  EXPECT_EQ(svc.add_click(id, click(32, 1, "fg")).status, 422);
  EXPECT_EQ(svc.add_click(id, click(-1, 1, "fg")).status, 422);
  EXPECT_EQ(svc.add_click(id, click(1, 1, "maybe")).status, 400);
  EXPECT_EQ(svc.add_click(id, json{{"row", 1}}).status, 400);
  EXPECT_EQ(svc.add_click(id, json{{"row", 1.5}, {"col", 1}, {"label", "fg"}}).status, 400);
  EXPECT_EQ(svc.state(id)->round, 0);

  const auto r = svc.add_click(id, click(16, 16, "fg"));
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(r.body["round"], 1);
  EXPECT_EQ(r.body["modulated"], true);
  EXPECT_TRUE(r.body.contains("iou"));
  EXPECT_EQ(r.body["window"]["radius"], 100.0);
  const auto p = io::decode_probability_grid(io::base64_decode(r.body["p"].get<std::string>()));
  EXPECT_EQ(p.size(), (Size{32, 32}));
  const auto mask = io::decode_mask_png(io::base64_decode(r.body["mask_png"].get<std::string>()));
  EXPECT_EQ(mask, threshold(p));
}

TEST_F(ServiceTest, ClickBudgetIsEnforced) {
  ServiceOptions o = options();
  o.config.session.max_clicks = 2;
  SessionService svc(o);
  const std::string id = svc.create_session(png_request(suite_[0])).body["id"];
  EXPECT_EQ(svc.add_click(id, click(1, 1, "fg")).status, 200);
  EXPECT_EQ(svc.add_click(id, click(2, 2, "bg")).status, 200);
  EXPECT_EQ(svc.add_click(id, click(3, 3, "fg")).status, 409);
}

TEST_F(ServiceTest, UndoAndReset) {
  SessionService svc(options());
  const std::string id = svc.create_session(png_request(suite_[0])).body["id"];
  EXPECT_EQ(svc.undo(id).status, 409);
  EXPECT_EQ(svc.undo("missing").status, 404);
  const auto before = svc.state(id);
  const auto r0 = svc.reset(id);
  EXPECT_EQ(r0.status, 200);
  EXPECT_EQ(svc.state(id), before);

  svc.add_click(id, click(16, 16, "fg"));
  svc.add_click(id, click(2, 2, "bg"));
  const auto r = svc.reset(id);
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body["round"], 0);
  EXPECT_TRUE(r.body["latest"].is_null());
  EXPECT_EQ(svc.state(id), before);
}

TEST_F(ServiceTest, UndoRestoresExactState) {
  SessionService svc(options());
  const std::string id = svc.create_session(png_request(suite_[2])).body["id"];
  svc.add_click(id, click(16, 16, "fg"));
  svc.add_click(id, click(3, 3, "bg"));
  const auto snap = svc.state(id);
  const auto summary = strip_times(svc.get_session(id).body);
  svc.add_click(id, click(20, 10, "fg"));
  const auto u = svc.undo(id);
  ASSERT_EQ(u.status, 200);
  EXPECT_EQ(svc.state(id), snap);
  EXPECT_EQ(strip_times(u.body), summary);
}

TEST_F(ServiceTest, ReplayAfterUndoIsByteIdentical) {
  SessionService svc(options());
  const std::string id = svc.create_session({{"dataset", "syn"}, {"sample", "ring"}}).body["id"];
  svc.add_click(id, click(16, 16, "fg"));
  svc.add_click(id, click(4, 4, "bg"));
  const auto third = svc.add_click(id, click(10, 22, "fg"));
  ASSERT_EQ(third.status, 200);
  ASSERT_EQ(svc.undo(id).status, 200);
  const auto again = svc.add_click(id, click(10, 22, "fg"));
  EXPECT_EQ(again.body.dump(), third.body.dump());
}

TEST_F(ServiceTest, SessionsDoNotLeakState) {
  SessionService svc(options());
  const std::string a = svc.create_session(png_request(suite_[0])).body["id"];
  const std::string b = svc.create_session(png_request(suite_[0])).body["id"];
  SessionService solo(options());
  const std::string ref_a = solo.create_session(png_request(suite_[0])).body["id"];
  const std::string ref_b = solo.create_session(png_request(suite_[0])).body["id"];

  oracle::Gen gen(71);
  auto step = [&](SessionService& s, const std::string& id, int op, PixelCoord pos, bool fg) {
    if (op == 0) return s.undo(id).status;
    if (op == 1 && pos.row == 0) return s.reset(id).status;
    return s.add_click(id, click(pos.row, pos.col, fg ? "fg" : "bg")).status;
  };
  // The interleaved run must match the same per-session streams played out
  // one session at a time.
  std::vector<std::tuple<bool, int, PixelCoord, bool>> ops;
  for (int i = 0; i < 200; ++i) ops.emplace_back(gen.coin(), gen.uniform_int(0, 4), gen.coord({32, 32}), gen.coin());
  for (const auto& [first, op, pos, fg] : ops) step(svc, first ? a : b, op, pos, fg);
  for (const auto& [first, op, pos, fg] : ops) {
    if (first) step(solo, ref_a, op, pos, fg);
  }
  for (const auto& [first, op, pos, fg] : ops) {
    if (!first) step(solo, ref_b, op, pos, fg);
  }
  EXPECT_EQ(svc.state(a), solo.state(ref_a));
  EXPECT_EQ(svc.state(b), solo.state(ref_b));
}

TEST_F(ServiceTest, ConcurrentSessionsMatchSequentialRuns) {
  SessionService svc(options());
  std::vector<std::string> ids;
  for (int i = 0; i < 4; ++i) ids.push_back(svc.create_session(png_request(suite_[static_cast<std::size_t>(i)])).body["id"]);
  {
    std::vector<std::jthread> threads;
    for (const auto& id : ids) {
      threads.emplace_back([&svc, id] {
        for (int k = 0; k < 5; ++k) svc.add_click(id, click(4 + 5 * k, 16, k % 2 ? "bg" : "fg"));
      });
    }
  }
  SessionService seq(options());
  for (int i = 0; i < 4; ++i) {
    const std::string id = seq.create_session(png_request(suite_[static_cast<std::size_t>(i)])).body["id"];
    for (int k = 0; k < 5; ++k) seq.add_click(id, click(4 + 5 * k, 16, k % 2 ? "bg" : "fg"));
    EXPECT_EQ(svc.state(ids[static_cast<std::size_t>(i)]), seq.state(id));
  }
}

TEST_F(ServiceTest, EvictsLeastRecentlyUsed) {
  ServiceOptions o = options();
  o.max_sessions = 2;
  SessionService svc(o);
  const std::string a = svc.create_session(png_request(suite_[0])).body["id"];
  const std::string b = svc.create_session(png_request(suite_[0])).body["id"];
  svc.get_session(a);
  const std::string c = svc.create_session(png_request(suite_[0])).body["id"];
  EXPECT_EQ(svc.session_count(), 2u);
  EXPECT_EQ(svc.get_session(b).status, 404);
  EXPECT_EQ(svc.get_session(a).status, 200);
  EXPECT_EQ(svc.get_session(c).status, 200);
  EXPECT_NE(a, b);
}

TEST_F(ServiceTest, Datasets) {
  SessionService svc(options());
  const auto list = svc.list_datasets();
  ASSERT_EQ(list.body["datasets"].size(), 1u);
  EXPECT_EQ(list.body["datasets"][0]["name"], "syn");
  EXPECT_EQ(list.body["datasets"][0]["samples"].size(), 10u);
  const auto sample = svc.get_dataset_sample("syn", "disk");
  ASSERT_EQ(sample.status, 200);
  EXPECT_EQ(io::decode_mask_png(io::base64_decode(sample.body["mask_png"].get<std::string>())),
            io::read_mask_png(root_ / "masks" / "disk.png"));
  EXPECT_EQ(svc.get_dataset_sample("syn", "nope").status, 404);
  EXPECT_EQ(svc.get_dataset_sample("nope", "disk").status, 404);
}

TEST_F(ServiceTest, HttpRoundTrip) {
  SessionService svc(options());
  HttpServer server(svc);
  const int port = server.start("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  httplib::Client cli("127.0.0.1", port);

  auto created = cli.Post("/sessions", png_request(suite_[0]).dump(), "application/json");
  ASSERT_TRUE(created);
  ASSERT_EQ(created->status, 201);
  const std::string id = json::parse(created->body)["id"];

  auto clicked = cli.Post("/sessions/" + id + "/clicks", click(16, 16, "fg").dump(), "application/json");
  ASSERT_TRUE(clicked);
  EXPECT_EQ(clicked->status, 200);
  EXPECT_EQ(json::parse(clicked->body)["round"], 1);

  EXPECT_EQ(cli.Post("/sessions/" + id + "/clicks", "{not json", "application/json")->status, 400);
  EXPECT_EQ(cli.Post("/sessions/" + id + "/clicks", click(99, 0, "fg").dump(), "application/json")->status, 422);

  auto got = cli.Get("/sessions/" + id);
  ASSERT_TRUE(got);
  EXPECT_EQ(json::parse(got->body)["round"], 1);
  EXPECT_EQ(cli.Post("/sessions/" + id + "/undo")->status, 200);
  EXPECT_EQ(cli.Post("/sessions/" + id + "/undo")->status, 409);
  EXPECT_EQ(cli.Post("/sessions/" + id + "/reset")->status, 200);
  EXPECT_EQ(cli.Get("/sessions/ffff")->status, 404);

  const auto raw = io::encode_image_png(suite_[1].image);
  auto raw_created = cli.Post("/sessions", std::string(raw.begin(), raw.end()), "image/png");
  ASSERT_TRUE(raw_created);
  EXPECT_EQ(raw_created->status, 201);

  auto ds = cli.Get("/datasets");
  ASSERT_TRUE(ds);
  EXPECT_EQ(json::parse(ds->body)["datasets"][0]["name"], "syn");
  EXPECT_EQ(cli.Get("/datasets/syn/disk")->status, 200);
  EXPECT_EQ(cli.Get("/datasets/syn/missing")->status, 404);
  server.stop();
}

}  // namespace
}  // namespace mfp
