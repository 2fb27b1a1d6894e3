// horizon-calib: simulate horizon observations, calibrate K from them, fuse
// multiple images and run the combination Monte Carlo.
//
// Exit codes: 0 success, 2 usage/config, 3 domain error, 4 I/O.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "horizon/batch.hpp"
#include "horizon/calibrate.hpp"
#include "horizon/conic.hpp"
#include "horizon/error.hpp"
#include "horizon/io.hpp"
#include "horizon/synth.hpp"

namespace fs = std::filesystem;
using horizon::io::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;
constexpr int kExitIo = 4;

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string indexed(const char* stem, int i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%04d.%s", stem, i, ext);
  return buf;
}

horizon::SceneConfig preset_config(const std::string& name) {
  if (name == "cassini-nac") return horizon::cassini_nac_preset();
  if (name == "generic") return horizon::generic_preset();
  throw UsageError("unknown preset '" + name + "' (expected cassini-nac or generic)");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw horizon::io::IoError("cannot create output directory " + dir.string());
}

json manifest(const std::string& command, json config, std::uint64_t seed) {
  return json{{"tool", "horizon-calib"},
              {"version", HORIZON_CALIB_VERSION},
              {"command", command},
              {"seed", seed},
              {"config", std::move(config)}};
}

horizon::FitMethod parse_fit(const std::string& name) {
  if (name == "taubin") return horizon::FitMethod::Taubin;
  if (name == "semi-hyper") return horizon::FitMethod::SemiHyper;
  throw UsageError("unknown fit method '" + name + "'");
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  int count = 0;
  std::string preset = "cassini-nac";
  double noise_px = 0.25;
  std::optional<int> n_points;
  std::optional<double> arc_deg;
  std::uint64_t seed = 0;
  std::string out;
};

std::vector<horizon::Scene> simulate_scenes(const SimulateArgs& a) {
  horizon::SceneConfig cfg = preset_config(a.preset);
  cfg.noise_px = a.noise_px;
  if (a.n_points) cfg.n_points = *a.n_points;
  if (a.arc_deg) cfg.arc_deg = *a.arc_deg;
  std::mt19937_64 rng(a.seed);
  std::vector<horizon::Scene> scenes;
  for (int i = 0; i < a.count; ++i) {
    auto s = horizon::random_scene(rng, cfg);
    s.epoch = indexed("synthetic", i, "0");
    s.epoch.resize(s.epoch.size() - 2);
    scenes.push_back(std::move(s));
  }
  return scenes;
}

int run_simulate(const SimulateArgs& a) {
  if (a.count < 1) throw UsageError("--count must be at least 1");
  if (a.noise_px < 0) throw UsageError("--noise-px must be non-negative");
  const fs::path out(a.out);
  ensure_dir(out);
  const auto scenes = simulate_scenes(a);
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const int k = static_cast<int>(i);
    const auto obs = horizon::generate_observation(scenes[i]);
    horizon::io::write_json(out / indexed("scene", k, "json"), horizon::io::scene_to_json(scenes[i]));
    std::ostringstream pts;
    horizon::io::write_points_csv(pts, obs.points);
    horizon::io::write_text(out / indexed("points", k, "csv"), pts.str());
    horizon::io::write_json(out / indexed("obs", k, "json"), horizon::io::observation_sidecar(obs));
  }
  json cfg{{"count", a.count}, {"preset", a.preset}, {"noise_px", a.noise_px}};
  if (a.n_points) cfg["n_points"] = *a.n_points;
  if (a.arc_deg) cfg["arc_deg"] = *a.arc_deg;
  horizon::io::write_json(out / "manifest.json", manifest("simulate", cfg, a.seed));
  std::cout << "wrote " << scenes.size() << " scenes to " << out.string() << "\n";
  return 0;
}

// --------------------------------------------------------------- calibrate

struct CalibrateArgs {
  std::string scene;
  std::string sidecar;
  std::string points;
  std::string dir;
  std::string out;
  std::optional<double> mu_x, mu_y;
  std::string fit = "taubin";
};

struct Pitch {
  double mu_x = NAN;
  double mu_y = NAN;
};

json calibrate_one(const horizon::Conic& C, const fs::path& points_path, const Pitch& pitch,
                   horizon::FitMethod method) {
  const auto points = horizon::io::read_points_csv(points_path);
  const horizon::Conic Cp = horizon::fit_conic(points, method);
  const auto est = horizon::calibrate_single(C, Cp);
  double f = NAN;
  if (std::isfinite(pitch.mu_x) && std::isfinite(pitch.mu_y))
    f = horizon::focal_from_k(est, pitch.mu_x, pitch.mu_y);
  json j = horizon::io::result_to_json(est, f, pitch.mu_x, pitch.mu_y);
  if (!std::isfinite(f)) {
    j["f_mm"] = nullptr;
    j["mu_x_mm"] = nullptr;
    j["mu_y_mm"] = nullptr;
  }
  return j;
}

Pitch resolve_pitch(const CalibrateArgs& a, const std::optional<horizon::Scene>& scene) {
  Pitch p;
  if (scene && scene->camera) {
    p.mu_x = scene->camera->mu_x_mm;
    p.mu_y = scene->camera->mu_y_mm;
  }
  if (a.mu_x) p.mu_x = *a.mu_x;
  if (a.mu_y) p.mu_y = *a.mu_y;
  return p;
}

int run_calibrate(const CalibrateArgs& a) {
  const auto method = parse_fit(a.fit);

  if (!a.dir.empty()) {
    const fs::path dir(a.dir);
    int done = 0;
    for (int i = 0;; ++i) {
      const fs::path scene_path = dir / indexed("scene", i, "json");
      if (!fs::exists(scene_path)) break;
      const auto scene = horizon::io::scene_from_json(horizon::io::read_json(scene_path));
      const auto result = calibrate_one(horizon::reference_conic(scene),
                                        dir / indexed("points", i, "csv"),
                                        resolve_pitch(a, scene), method);
      horizon::io::write_json(dir / indexed("result", i, "json"), result);
      ++done;
    }
    if (done == 0) throw horizon::io::IoError("no scene_NNNN.json files in " + dir.string());
    std::cout << "calibrated " << done << " images in " << dir.string() << "\n";
    return 0;
  }

  if (a.points.empty()) throw UsageError("--points is required (or use --dir)");
  if (a.scene.empty() == a.sidecar.empty())
    throw UsageError("give exactly one of --scene or --sidecar");

  std::optional<horizon::Scene> scene;
  horizon::Conic C;
  if (!a.scene.empty()) {
    scene = horizon::io::scene_from_json(horizon::io::read_json(a.scene));
    C = horizon::reference_conic(*scene);
  } else {
    C = horizon::io::sidecar_reference_conic(horizon::io::read_json(a.sidecar));
  }
  const json result = calibrate_one(C, a.points, resolve_pitch(a, scene), method);
  if (a.out.empty()) {
    std::cout << result.dump(2) << "\n";
  } else {
    horizon::io::write_json(a.out, result);
  }
  return 0;
}

// ------------------------------------------------------------------- batch

struct BatchArgs {
  std::string dir;
  std::optional<double> mu_x, mu_y;
  std::optional<double> ref_f, ref_u0, ref_v0;
  std::string out;
};

struct LoadedResults {
  std::vector<horizon::CalibrationEstimate> estimates;
  Pitch pitch;
};

LoadedResults load_results(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw horizon::io::IoError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("result", 0) == 0 && entry.path().extension() == ".json")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  LoadedResults out;
  for (const auto& f : files) {
    const json j = horizon::io::read_json(f);
    out.estimates.push_back(horizon::io::result_from_json(j));
    if (j.contains("mu_x_mm") && j.at("mu_x_mm").is_number()) out.pitch.mu_x = j.at("mu_x_mm").get<double>();
    if (j.contains("mu_y_mm") && j.at("mu_y_mm").is_number()) out.pitch.mu_y = j.at("mu_y_mm").get<double>();
  }
  return out;
}

int run_batch(const BatchArgs& a) {
  auto loaded = load_results(a.dir);
  if (loaded.estimates.empty())
    throw horizon::Error(horizon::ErrorKind::EmptyBatch, "no result*.json files in " + a.dir);
  if (a.mu_x) loaded.pitch.mu_x = *a.mu_x;
  if (a.mu_y) loaded.pitch.mu_y = *a.mu_y;
  if (!std::isfinite(loaded.pitch.mu_x) || !std::isfinite(loaded.pitch.mu_y))
    throw UsageError("pixel pitch unknown: pass --mu-x and --mu-y");

  const auto& est = loaded.estimates;
  const double f = horizon::batch_focal(est, loaded.pitch.mu_x, loaded.pitch.mu_y);
  const Eigen::Vector2d pp = horizon::batch_principal(est);

  std::vector<double> fs_, us, vs;
  for (const auto& e : est) {
    fs_.push_back(horizon::focal_from_k(e, loaded.pitch.mu_x, loaded.pitch.mu_y));
    us.push_back(e.J.x());
    vs.push_back(e.J.y());
  }
  json out{{"n_images", est.size()},
           {"mu_x_mm", loaded.pitch.mu_x},
           {"mu_y_mm", loaded.pitch.mu_y},
           {"f_mm", f},
           {"u0_px", pp.x()},
           {"v0_px", pp.y()},
           {"single_image",
            {{"f_mm", horizon::io::stats_to_json(horizon::summarize(fs_, a.ref_f.value_or(0.0)))},
             {"u0_px", horizon::io::stats_to_json(horizon::summarize(us, a.ref_u0.value_or(0.0)))},
             {"v0_px", horizon::io::stats_to_json(horizon::summarize(vs, a.ref_v0.value_or(0.0)))}}}};
  json ref = json::object();
  if (a.ref_f) {
    ref["f_mm"] = *a.ref_f;
    out["f_error_mm"] = f - *a.ref_f;
  }
  if (a.ref_u0) {
    ref["u0_px"] = *a.ref_u0;
    out["u0_error_px"] = pp.x() - *a.ref_u0;
  }
  if (a.ref_v0) {
    ref["v0_px"] = *a.ref_v0;
    out["v0_error_px"] = pp.y() - *a.ref_v0;
  }
  out["reference"] = ref;
  if (a.out.empty()) {
    std::cout << out.dump(2) << "\n";
  } else {
    horizon::io::write_json(a.out, out);
  }
  return 0;
}

// -------------------------------------------------------------- montecarlo

struct MonteCarloArgs {
  std::string preset = "cassini-nac";
  int pool = 50;
  double noise_px = 0.25;
  std::optional<int> n_points;
  int q_min = 1;
  int q_max = 45;
  int q_step = 4;
  int draws = 2000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string pool_dir;
  std::string out;
};

json slope_report(const std::vector<horizon::SweepResult>& rows) {
  json report = json::object();
  const auto add = [&](const char* name, auto member) {
    std::vector<double> logq, logs, invsq, sig;
    for (const auto& r : rows) {
      const double s = (r.*member).sigma;
      logq.push_back(std::log(static_cast<double>(r.q)));
      logs.push_back(std::log(s));
      invsq.push_back(1.0 / std::sqrt(static_cast<double>(r.q)));
      sig.push_back(s);
    }
    const auto loglog = horizon::linear_fit(logq, logs);
    const auto lin = horizon::linear_fit(invsq, sig);
    report[name] = {{"loglog_slope", loglog.slope},
                    {"loglog_r2", loglog.r_squared},
                    {"inv_sqrt_q_slope", lin.slope},
                    {"inv_sqrt_q_intercept", lin.intercept},
                    {"inv_sqrt_q_r2", lin.r_squared}};
  };
  add("f_mm", &horizon::SweepResult::f_mm);
  add("u0_px", &horizon::SweepResult::u0_px);
  add("v0_px", &horizon::SweepResult::v0_px);
  return report;
}

int run_montecarlo(const MonteCarloArgs& a) {
  if (a.q_min < 1 || a.q_max < a.q_min || a.q_step < 1) throw UsageError("invalid q range");
  if (a.draws < 1) throw UsageError("--draws must be at least 1");
  const fs::path out(a.out);
  ensure_dir(out);

  std::vector<horizon::CalibrationEstimate> pool;
  Pitch pitch;
  if (!a.pool_dir.empty()) {
    auto loaded = load_results(a.pool_dir);
    pool = std::move(loaded.estimates);
    pitch = loaded.pitch;
  } else {
    if (a.pool < 1) throw UsageError("--pool must be at least 1");
    SimulateArgs sim;
    sim.count = a.pool;
    sim.preset = a.preset;
    sim.noise_px = a.noise_px;
    sim.n_points = a.n_points;
    sim.seed = a.seed;
    for (const auto& scene : simulate_scenes(sim)) {
      const auto obs = horizon::generate_observation(scene);
      pool.push_back(horizon::calibrate_single(obs.C_reference, horizon::fit_conic(obs.points)));
      pitch = {scene.camera->mu_x_mm, scene.camera->mu_y_mm};
    }
  }
  if (pool.empty()) throw horizon::Error(horizon::ErrorKind::EmptyBatch, "empty estimate pool");
  if (!std::isfinite(pitch.mu_x) || !std::isfinite(pitch.mu_y))
    throw UsageError("pixel pitch unknown for the pool");

  std::vector<int> qs;
  for (int q = a.q_min; q <= a.q_max; q += a.q_step) qs.push_back(q);
  const auto rows = horizon::combination_sweep(pool, qs, a.draws, a.seed, pitch.mu_x, pitch.mu_y,
                                               a.threads);

  std::ostringstream csv;
  horizon::io::write_sweep_csv(csv, rows);
  horizon::io::write_text(out / "sweep.csv", csv.str());

  json report{{"pool_size", pool.size()}, {"draws", a.draws}, {"fits", slope_report(rows)}};
  json per_q = json::array();
  for (const auto& r : rows)
    per_q.push_back({{"q", r.q},
                     {"f_mm", horizon::io::stats_to_json(r.f_mm)},
                     {"u0_px", horizon::io::stats_to_json(r.u0_px)},
                     {"v0_px", horizon::io::stats_to_json(r.v0_px)}});
  report["per_q"] = per_q;
  horizon::io::write_json(out / "report.json", report);

  json cfg{{"preset", a.preset}, {"pool", a.pool},     {"noise_px", a.noise_px},
           {"q_min", a.q_min},   {"q_max", a.q_max},   {"q_step", a.q_step},
           {"draws", a.draws},   {"pool_dir", a.pool_dir}};
  if (a.n_points) cfg["n_points"] = *a.n_points;
  horizon::io::write_json(out / "manifest.json", manifest("montecarlo", cfg, a.seed));

  const auto& fits = report["fits"];
  for (const char* t : {"f_mm", "u0_px", "v0_px"}) {
    std::cout << t << ": log-log slope " << fits[t]["loglog_slope"].get<double>()
              << ", R^2 vs 1/sqrt(q) " << fits[t]["inv_sqrt_q_r2"].get<double>() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Camera intrinsic calibration from imaged ellipsoid horizons"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(HORIZON_CALIB_VERSION));

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "generate synthetic scenes and horizon points");
  simulate->add_option("--count", sim.count, "number of scenes")->required();
  simulate->add_option("--preset", sim.preset, "cassini-nac or generic");
  simulate->add_option("--noise-px", sim.noise_px, "Gaussian noise per coordinate, pixels");
  simulate->add_option("--n-points", sim.n_points, "horizon points per image");
  simulate->add_option("--arc-deg", sim.arc_deg, "observed limb arc, degrees");
  simulate->add_option("--seed", sim.seed, "random seed");
  simulate->add_option("--out", sim.out, "output directory")->required();

  CalibrateArgs cal;
  auto* calibrate = app.add_subcommand("calibrate", "estimate K from one imaged horizon");
  calibrate->add_option("--scene", cal.scene, "scene JSON (reference geometry)");
  calibrate->add_option("--sidecar", cal.sidecar, "observation sidecar JSON with C_reference");
  calibrate->add_option("--points", cal.points, "horizon points CSV (u,v)");
  calibrate->add_option("--dir", cal.dir, "calibrate every scene/points pair in a directory");
  calibrate->add_option("--out", cal.out, "result JSON path (default: stdout)");
  calibrate->add_option("--mu-x", cal.mu_x, "pixel pitch x, mm");
  calibrate->add_option("--mu-y", cal.mu_y, "pixel pitch y, mm");
  calibrate->add_option("--fit", cal.fit, "taubin or semi-hyper");

  BatchArgs bat;
  auto* batch = app.add_subcommand("batch", "fuse per-image results by least squares");
  batch->add_option("--dir", bat.dir, "directory of result*.json")->required();
  batch->add_option("--mu-x", bat.mu_x, "pixel pitch x, mm");
  batch->add_option("--mu-y", bat.mu_y, "pixel pitch y, mm");
  batch->add_option("--reference-f", bat.ref_f, "reference focal length, mm");
  batch->add_option("--reference-u0", bat.ref_u0, "reference u0, px");
  batch->add_option("--reference-v0", bat.ref_v0, "reference v0, px");
  batch->add_option("--out", bat.out, "batch JSON path (default: stdout)");

  MonteCarloArgs mc;
  auto* montecarlo = app.add_subcommand("montecarlo", "combination sweep over an image pool");
  montecarlo->add_option("--preset", mc.preset, "cassini-nac or generic");
  montecarlo->add_option("--pool", mc.pool, "number of simulated images");
  montecarlo->add_option("--pool-dir", mc.pool_dir, "use result*.json files instead of simulating");
  montecarlo->add_option("--noise-px", mc.noise_px, "Gaussian noise per coordinate, pixels");
  montecarlo->add_option("--n-points", mc.n_points, "horizon points per image");
  montecarlo->add_option("--q-min", mc.q_min);
  montecarlo->add_option("--q-max", mc.q_max);
  montecarlo->add_option("--q-step", mc.q_step);
  montecarlo->add_option("--draws", mc.draws, "random subsets per q");
  montecarlo->add_option("--seed", mc.seed, "random seed");
  montecarlo->add_option("--threads", mc.threads, "worker threads (0: HORIZON_CALIB_THREADS)");
  montecarlo->add_option("--out", mc.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*calibrate) return run_calibrate(cal);
    if (*batch) return run_batch(bat);
    if (*montecarlo) return run_montecarlo(mc);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const horizon::io::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const horizon::Error& e) {
    std::cerr << "error (" << horizon::to_string(e.kind()) << "): " << e.what() << "\n";
    const bool config = e.kind() == horizon::ErrorKind::InvalidArgument ||
                        e.kind() == horizon::ErrorKind::InvalidSweep ||
                        e.kind() == horizon::ErrorKind::ConfigInfeasible;
    return config ? kExitUsage : kExitDomain;
  }
  return kExitUsage;
}
