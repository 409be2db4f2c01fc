#include "mfp/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>

#include "mfp/config.hpp"
#include "mfp/eval.hpp"
#include "mfp/http.hpp"
#include "mfp/io.hpp"
#include "mfp/modulation.hpp"
#include "mfp/service.hpp"
#include "mfp/synthetic.hpp"

namespace mfp {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

EvalConfig config_or_default(const std::string& path) { return path.empty() ? EvalConfig{} : load_config(path); }

std::string round_name(std::size_t k, const char* suffix) {
  char round_buf[48];
  std::snprintf(round_buf, sizeof round_buf, "round_%02zu_%s", k, suffix);
  return round_buf;
}

json window_json(const std::optional<ModulationWindow>& w) {
  if (!w) return nullptr;
  return {{"row", w->center.row}, {"col", w->center.col}, {"radius", w->radius}};
}

int cmd_modulate(const std::string& in, const std::string& clicks_path, const std::string& out_path,
                 const std::string& config_path, std::ostream& out) {
  const EvalConfig config = config_or_default(config_path);
  const ProbabilityGrid p = io::read_probability_grid(in);
  const auto text = io::read_file(clicks_path);
  const ClickHistory all = io::parse_clicks(std::string(text.begin(), text.end()));
  if (all.empty()) throw InvalidArgument("clicks file holds no click");
  const Click current = all.back();
  const ModulationResult res = modulate_detailed(p, current, all.prefix(all.size() - 1), config.session.modulation);
  io::write_grid(out_path, res.grid);
  out << "modulated " << p.width() << "x" << p.height() << " grid with click " << current.index << " ("
      << (res.scheme == GammaScheme::probability ? "probability" : "euclidean") << " scheme, radius "
      << json(res.window.radius).dump() << ", big gamma " << json(res.big_gamma).dump() << ")\n";
  return 0;
}

int cmd_simulate(const std::string& image_path, const std::string& mask_path, std::optional<int> max_clicks,
                 bool no_modulation, const std::string& config_path, const std::string& out_path,
                 const std::string& dump_dir, std::ostream& out) {
  EvalConfig config = config_or_default(config_path);
  if (max_clicks) config.session.max_clicks = *max_clicks;
  if (no_modulation) config.session.modulation_enabled = false;
  config.validate();

  const ImageRGB image = io::read_image_png(image_path);
  const BinaryMask gt = io::read_mask_png(mask_path);
  const auto backend = make_backend(config);
  const SessionTrajectory traj = run_session(image, gt, *backend, config.session);

  if (!dump_dir.empty()) {
    fs::create_directories(dump_dir);
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const auto& r = traj.rounds[k];
      io::write_grid(fs::path(dump_dir) / round_name(k + 1, "p.grid"), r.p);
      io::write_grid(fs::path(dump_dir) / round_name(k + 1, "p_mod.grid"), r.p_prev_mod);
      io::write_mask_png(fs::path(dump_dir) / round_name(k + 1, "mask.png"), r.mask);
    }
  }

  json rounds = json::array();
  for (const auto& r : traj.rounds) {
    rounds.push_back({{"round", r.click.index},
                      {"click",
                       {{"row", r.click.pos.row},
                        {"col", r.click.pos.col},
                        {"label", r.click.label == Label::foreground ? "fg" : "bg"}}},
                      {"iou", *r.iou},
                      {"window", window_json(r.window)}});
  }
  json noc_j = json::object();
  for (double t : config.targets) noc_j[noc_label(t)] = noc(traj, t, config.cap()).clicks;
  const json doc = {{"image", image_path},
                    {"mask", mask_path},
                    {"width", image.width()},
                    {"height", image.height()},
                    {"modulation_enabled", config.session.modulation_enabled},
                    {"max_clicks", config.cap()},
                    {"rounds", rounds},
                    {"ious", traj.ious()},
                    {"noc", noc_j}};
  if (out_path.empty() || out_path == "-") {
    out << doc.dump(2) << "\n";
  } else {
    io::write_text(out_path, doc.dump(2) + "\n");
  }
  return 0;
}

int cmd_eval(const std::string& manifest_path, const std::string& config_path, const std::string& out_path,
             const std::string& csv_prefix, std::optional<int> jobs, bool no_modulation, std::ostream& out) {
  EvalConfig config = config_or_default(config_path);
  if (jobs) config.jobs = *jobs;
  if (no_modulation) config.session.modulation_enabled = false;
  config.validate();
  const DatasetManifest manifest = load_manifest(manifest_path);
  const EvalReport report = run_benchmark(manifest, config);
  const std::string text = report_to_string(report);
  if (out_path.empty() || out_path == "-") {
    out << text;
  } else {
    io::write_text(out_path, text);
  }
  if (!csv_prefix.empty()) {
    io::write_text(csv_prefix + "noc.csv", noc_csv(report));
    io::write_text(csv_prefix + "miou.csv", miou_csv(report));
  }
  if (!out_path.empty() && out_path != "-") {
    out << report.dataset << ": " << report.samples.size() << " samples";
    for (std::size_t t = 0; t < config.targets.size(); ++t) {
      out << ", " << noc_label(config.targets[t]) << "=" << json(report.mean_noc[t]).dump();
    }
    out << ", AUC=" << json(report.auc).dump() << "\n";
  }
  return 0;
}

int cmd_serve(const std::string& listen, const std::string& dataset_root, const std::string& config_path,
              const std::string& static_dir, std::size_t max_sessions, std::ostream& out) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) throw InvalidArgument("--listen expects host:port");
  const std::string host = listen.substr(0, colon);
  const int port = std::stoi(listen.substr(colon + 1));
  SessionService service({config_or_default(config_path), dataset_root, max_sessions});
  HttpServer server(service, static_dir);
  out << "listening on " << host << ":" << port << std::endl;
  if (!server.listen(host, port)) throw Error("cannot listen on " + listen);
  return 0;
}

int cmd_import(const std::string& images_dir, const std::string& masks_dir, const std::string& name,
               const std::string& out_path, const std::string& mask_suffix, const std::string& synthetic_dir,
               std::ostream& out, std::ostream& err) {
  if (!synthetic_dir.empty()) {
    const DatasetManifest m = write_synthetic_dataset(synthetic_dir, name);
    out << "wrote " << m.samples.size() << " synthetic samples to " << synthetic_dir << "\n";
    return 0;
  }
  if (images_dir.empty() || masks_dir.empty() || out_path.empty()) {
    throw InvalidArgument("import-dataset needs --images, --masks and --out (or --synthetic)");
  }
  std::vector<fs::path> images;
  for (const auto& e : fs::directory_iterator(images_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png") images.push_back(e.path());
  }
  std::sort(images.begin(), images.end());

  const fs::path out_file = fs::absolute(out_path);
  DatasetManifest m{name, {}};
  for (const auto& img : images) {
    const fs::path mask = fs::path(masks_dir) / (img.stem().string() + mask_suffix + ".png");
    if (!fs::exists(mask)) {
      err << "skipping " << img.filename().string() << ": no mask " << mask.filename().string() << "\n";
      continue;
    }
    const ImageRGB image = io::read_image_png(img);
    const BinaryMask gt = io::read_mask_png(mask);
    if (image.size() != gt.size()) {
      err << "skipping " << img.filename().string() << ": mask size differs\n";
      continue;
    }
    m.samples.push_back({img.stem().string(), fs::absolute(img), fs::absolute(mask)});
  }
  if (m.samples.empty()) throw Error("no image/mask pairs found");
  io::write_text(out_file, manifest_to_json(m, out_file.parent_path()).dump(2) + "\n");
  out << "wrote " << m.samples.size() << " samples to " << out_path << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interactive click-based segmentation with probability-map modulation", "mfp"};
  app.require_subcommand(1);

  std::string in, clicks, out_path, config_path;
  auto* modulate = app.add_subcommand("modulate", "Gamma-modulate a probability grid around the last click");
  modulate->add_option("--in", in, "Input MFPGRID file")->required();
  modulate->add_option("--clicks", clicks, "Click descriptor; the last line is the current click")->required();
  modulate->add_option("--out", out_path, "Output MFPGRID file")->required();
  modulate->add_option("--config", config_path, "Engine config JSON");

  std::string image_path, mask_path, dump_dir;
  std::optional<int> max_clicks;
  bool no_modulation = false;
  auto* simulate = app.add_subcommand("simulate", "Run an automatic clicking session on one image");
  simulate->add_option("--image", image_path, "Input PNG image")->required();
  simulate->add_option("--mask", mask_path, "Ground-truth PNG mask")->required();
  simulate->add_option("--max-clicks", max_clicks, "Click budget")->check(CLI::PositiveNumber);
  simulate->add_flag("--no-modulation", no_modulation, "Feed the previous map to the backend unmodulated");
  simulate->add_option("--config", config_path, "Engine config JSON");
  simulate->add_option("--out", out_path, "Trajectory JSON (default: stdout)");
  simulate->add_option("--dump-dir", dump_dir, "Write per-round MFPGRID and mask files here");

  std::string manifest, csv_prefix;
  std::optional<int> jobs;
  auto* eval = app.add_subcommand("eval", "Benchmark NoC/mIoU/AUC over a dataset manifest");
  eval->add_option("--manifest", manifest, "Dataset manifest JSON")->required();
  eval->add_option("--config", config_path, "Engine config JSON");
  eval->add_option("--out", out_path, "Report JSON (default: stdout)");
  eval->add_option("--csv-prefix", csv_prefix, "Also write <prefix>noc.csv and <prefix>miou.csv");
  eval->add_option("--jobs", jobs, "Parallel sessions")->check(CLI::PositiveNumber);
  eval->add_flag("--no-modulation", no_modulation, "Disable probability-map modulation");

  std::string listen = "127.0.0.1:8080", dataset_root, static_dir;
  std::size_t max_sessions = 64;
  auto* serve = app.add_subcommand("serve", "Serve the interactive session HTTP API");
  serve->add_option("--listen", listen, "host:port")->capture_default_str();
  serve->add_option("--dataset-root", dataset_root, "Directory of manifest JSON files");
  serve->add_option("--config", config_path, "Engine config JSON");
  serve->add_option("--static-dir", static_dir, "Serve a web client from this directory");
  serve->add_option("--max-sessions", max_sessions, "Session cap before LRU eviction")->capture_default_str();

  std::string images_dir, masks_dir, name = "dataset", mask_suffix, synthetic_dir;
  auto* import = app.add_subcommand("import-dataset", "Build a manifest from image/mask directories");
  import->add_option("--images", images_dir, "Directory of PNG images");
  import->add_option("--masks", masks_dir, "Directory of PNG masks named <image stem><suffix>.png");
  import->add_option("--mask-suffix", mask_suffix, "Mask filename suffix");
  import->add_option("--name", name, "Dataset name")->capture_default_str();
  import->add_option("--out", out_path, "Manifest JSON to write");
  import->add_option("--synthetic", synthetic_dir, "Instead, write the built-in synthetic suite to this directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "mfp: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*modulate) return cmd_modulate(in, clicks, out_path, config_path, out);
    if (*simulate) {
      return cmd_simulate(image_path, mask_path, max_clicks, no_modulation, config_path, out_path, dump_dir, out);
    }
    if (*eval) return cmd_eval(manifest, config_path, out_path, csv_prefix, jobs, no_modulation, out);
    if (*serve) return cmd_serve(listen, dataset_root, config_path, static_dir, max_sessions, out);
    if (*import) return cmd_import(images_dir, masks_dir, name, out_path, mask_suffix, synthetic_dir, out, err);
  } catch (const std::exception& e) {
    err << "mfp: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace mfp
