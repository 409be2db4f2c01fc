// Regenerates tests/fixtures. Clicker and modulation expectations come from
// the brute-force oracles; trajectories and reports are regression goldens.
//
//   gen_fixtures <fixture dir>

#include <iostream>

#include <nlohmann/json.hpp>

#include "mfp/eval.hpp"
#include "mfp/io.hpp"
#include "mfp/synthetic.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace mfp;

namespace {

BinaryMask shifted(const BinaryMask& m, int dr, int dc) {
  BinaryMask out(m.size());
  for (int r = 0; r < m.height(); ++r) {
    for (int c = 0; c < m.width(); ++c) {
      const PixelCoord src{r - dr, c - dc};
      if (m.contains(src)) out.set({r, c}, m.test(src));
    }
  }
  return out;
}

json click_json(const Click& c) {
  return {{"row", c.pos.row}, {"col", c.pos.col}, {"label", c.label == Label::foreground ? "fg" : "bg"}};
}

void write_json(const fs::path& p, const json& j) { io::write_text(p, j.dump(2) + "\n"); }

void clicker_fixture(const fs::path& dir) {
  json shapes = json::array();
  for (const auto& s : synthetic_suite()) {
    const BinaryMask pred = shifted(s.mask, 2, 3);
    shapes.push_back({{"id", s.id},
                      {"first_click", click_json(oracle::brute_first_click(s.mask))},
                      {"shift", {2, 3}},
                      {"next_click", click_json(oracle::brute_next_click(pred, s.mask, 1))}});
  }
  write_json(dir / "clicker.json", {{"shapes", shapes}});
}

void modulate_fixture(const fs::path& dir, int n_clicks) {
  fs::create_directories(dir);
  oracle::Gen gen(static_cast<std::uint64_t>(9000 + n_clicks));
  const Size s{24, 20};
  std::vector<double> v(s.area());
  // Float-representable values so the MFPGRID input is exact.
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = double(i / 24), c = double(i % 24);
    v[i] = static_cast<float>(1.0 / (1.0 + std::exp((r - 9.0) * (r - 9.0) / 20.0 + (c - 11.0) * (c - 11.0) / 30.0 - 2.0)) *
                              gen.uniform(0.8, 1.0));
  }
  const ProbabilityGrid p(s, v);
  ClickHistory h = gen.history(s, n_clicks - 1);
  const Click current{{10, 12}, Label::foreground, n_clicks};
  const Grid<double> expected(s, oracle::naive_modulate<oracle::DetMath>(p, current, h, ModulationParams{}));
  h.add(current);
  io::write_grid(dir / "input.grid", p);
  io::write_text(dir / "clicks.txt", "# row col label index; the last line is the current click\n" + io::format_clicks(h));
  io::write_grid(dir / "expected.grid", expected);
}

void disk_trajectory(const fs::path& dir) {
  const ImageRGB image = io::read_image_png(dir / "synthetic" / "images" / "disk.png");
  const BinaryMask gt = io::read_mask_png(dir / "synthetic" / "masks" / "disk.png");
  const auto traj = run_session(image, gt, ReferenceSegmenter{}, SessionOptions{});
  json rounds = json::array();
  for (const auto& r : traj.rounds) {
    json c = click_json(r.click);
    c["iou"] = *r.iou;
    rounds.push_back(c);
  }
  write_json(dir / "disk_trajectory.json", {{"rounds", rounds}});
}

void reports(const fs::path& dir) {
  const DatasetManifest m = load_manifest(dir / "synthetic" / "synthetic.json");
  EvalConfig on;
  io::write_text(dir / "report_mod.json", report_to_string(run_benchmark(m, on)));
  EvalConfig off;
  off.session.modulation_enabled = false;
  io::write_text(dir / "report_nomod.json", report_to_string(run_benchmark(m, off)));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: gen_fixtures <fixture dir>\n";
    return 1;
  }
  const fs::path dir = argv[1];
  try {
    fs::create_directories(dir);
    write_synthetic_dataset(dir / "synthetic", "synthetic");
    clicker_fixture(dir);
    modulate_fixture(dir / "modulate", 3);
    modulate_fixture(dir / "modulate_late", 9);
    disk_trajectory(dir);
    reports(dir);
  } catch (const std::exception& e) {
    std::cerr << "gen_fixtures: " << e.what() << "\n";
    return 1;
  }
  std::cout << "fixtures written to " << dir.string() << "\n";
  return 0;
}
