// msac - multi-scale active contour segmentation CLI.
//
// Subcommands:
//   segment   segment one image with the proposed model or a baseline
//   eval      score automatic masks against manual masks, emit CSV
//   phantom   generate a synthetic test image with exact ground truth
//
// Exit codes: 0 success, 2 input error, 3 numerical failure (partial
// outputs are still written). MSAC_VERBOSITY=0|1|2 controls logging.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "msac/config.hpp"
#include "msac/evolution.hpp"
#include "msac/image_io.hpp"
#include "msac/metrics.hpp"
#include "msac/phantom.hpp"
#include "msac/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

int verbosity() {
  const char* v = std::getenv("MSAC_VERBOSITY");
  if (!v) return 1;
  try {
    return std::stoi(v);
  } catch (...) {
    return 1;
  }
}

void log_info(const std::string& msg) {
  if (verbosity() >= 1) std::cerr << msg << "\n";
}
void log_debug(const std::string& msg) {
  if (verbosity() >= 2) std::cerr << msg << "\n";
}

struct SeedArg {
  double cx = 0, cy = 0, a = 0, b = 0;
};

bool parse_seed(const std::string& s, SeedArg& out) {
  const auto parts = msac::detail::split(s, ',');
  if (parts.size() != 4) return false;
  try {
    out.cx = std::stod(parts[0]);
    out.cy = std::stod(parts[1]);
    out.a = std::stod(parts[2]);
    out.b = std::stod(parts[3]);
  } catch (...) {
    return false;
  }
  return true;
}

// Refuse to clobber result files unless --force.
bool outputs_blocked(const fs::path& dir, const std::vector<std::string>& names, bool force,
                     std::string& blocker) {
  if (force) return false;
  for (const auto& n : names) {
    if (fs::exists(dir / n)) {
      blocker = (dir / n).string();
      return true;
    }
  }
  return false;
}

void write_manifest(const fs::path& path, const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ofstream out(path);
  out << "# resolved run parameters\n";
  for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

int cmd_segment(const std::string& input, const std::string& model, const std::string& seed_str,
                const std::string& config_path, const std::string& out_dir, bool force,
                const msac::ConfigMap& flag_overrides) {
  SeedArg seed;
  if (!parse_seed(seed_str, seed)) {
    std::cerr << "error: --seed must be cx,cy,a,b\n";
    return kExitInput;
  }

  msac::ScalarGrid image;
  try {
    image = msac::load_image(input);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }

  msac::ModelParams params;
  msac::CvParams cv_params;
  msac::DrlseParams drlse_params;
  int n_scales = 5;
  try {
    msac::ConfigMap cfg;
    if (!config_path.empty()) cfg = msac::load_config(config_path);
    cfg.insert(cfg.end(), flag_overrides.begin(), flag_overrides.end());  // flags win
    msac::apply_config(cfg, params);
    msac::apply_config(cfg, cv_params);
    msac::apply_config(cfg, drlse_params);
    if (auto v = msac::config_get(cfg, "n_scales")) n_scales = std::stoi(*v);
    params.validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }

  fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory " << out_dir << "\n";
    return kExitInput;
  }
  std::vector<std::string> result_names = {"mask.pgm", "overlay.png", "run.log", "manifest.txt"};
  for (int k = 0; k < n_scales; ++k) result_names.push_back("scale_" + std::to_string(k) + "_mask.pgm");
  std::string blocker;
  if (outputs_blocked(dir, result_names, force, blocker)) {
    std::cerr << "error: refusing to overwrite " << blocker << " (use --force)\n";
    return kExitInput;
  }

  std::vector<std::pair<std::string, std::string>> manifest = {
      {"input", input},         {"model", model},
      {"seed", seed_str},       {"config", config_path.empty() ? "(none)" : config_path},
      {"out", out_dir},         {"n_scales", std::to_string(n_scales)},
      {"omega1", fmt(params.omega1)},
      {"omega2", fmt(params.omega2)},
      {"omega3", fmt(params.omega3)},
      {"patch_radius", std::to_string(params.patch_radius)},
      {"band_halfwidth", fmt(params.band_halfwidth)},
      {"r_s", fmt(params.r_s)},
      {"heaviside_eps", fmt(params.heaviside_eps)},
      {"dt", fmt(params.dt)},
      {"max_iters_per_scale", std::to_string(params.max_iters_per_scale)},
      {"convergence_tol", fmt(params.convergence_tol)},
  };
  if (model == "cv") {
    manifest.push_back({"cv_nu", fmt(cv_params.nu)});
    manifest.push_back({"cv_lambda1", fmt(cv_params.lambda1)});
    manifest.push_back({"cv_lambda2", fmt(cv_params.lambda2)});
    manifest.push_back({"cv_eps", fmt(cv_params.eps)});
    manifest.push_back({"cv_dt", fmt(cv_params.dt)});
    manifest.push_back({"cv_max_iters", std::to_string(cv_params.max_iters)});
  } else if (model == "drlse") {
    manifest.push_back({"drlse_dt", fmt(drlse_params.dt)});
    manifest.push_back({"drlse_mu", fmt(drlse_params.mu)});
    manifest.push_back({"drlse_lambda", fmt(drlse_params.lambda)});
    manifest.push_back({"drlse_alpha", fmt(drlse_params.alpha)});
    manifest.push_back({"drlse_sigma", fmt(drlse_params.sigma)});
    manifest.push_back({"drlse_max_iters", std::to_string(drlse_params.max_iters)});
  }

  const msac::ScalarGrid norm = msac::normalized(image);
  msac::BinaryMask final_mask;
  std::ofstream log(dir / "run.log");
  int exit_code = kExitOk;

  try {
    if (model == "proposed") {
      msac::PipelineConfig cfg;
      cfg.n_scales = n_scales;
      cfg.model = params;
      cfg.seed = {seed.cx, seed.cy, seed.a, seed.b};
      const msac::PipelineResult res = msac::run_pipeline(image, cfg);
      const int n = int(res.per_scale_masks.size());
      const int last_level = res.completed ? 0 : res.failed_scale;
      for (int i = 0; i < n; ++i) {
        // per_scale_masks is coarsest first; name by pyramid level index
        const int level = last_level + n - 1 - i;
        msac::write_mask_pgm((dir / ("scale_" + std::to_string(level) + "_mask.pgm")).string(),
                             res.per_scale_masks[i]);
        const auto& rep = res.per_scale_reports[i];
        log << "scale " << level << ": iterations=" << rep.iterations_run
            << " stop=" << msac::to_string(rep.stop_reason) << " final_energy=" << rep.final_energy
            << "\n";
        log << "  energy_trace:";
        for (double e : rep.energy_trace) log << ' ' << e;
        log << "\n";
        log_debug("scale " + std::to_string(level) + " done, " +
                  std::to_string(rep.iterations_run) + " iterations");
      }
      log << "wall_time_s = " << res.total_wall_time << "\n";
      if (!res.completed) {
        log << "aborted: degenerate evolution at pyramid level " << res.failed_scale << "\n";
        std::cerr << "numerical failure: degenerate evolution at pyramid level "
                  << res.failed_scale << "\n";
        if (!res.per_scale_masks.empty()) final_mask = res.per_scale_masks.back();
        exit_code = kExitNumerical;
      } else {
        final_mask = res.final_mask;
      }
    } else if (model == "cv" || model == "drlse") {
      const auto t0 = std::chrono::steady_clock::now();
      msac::SeedEllipse se{seed.cx, seed.cy, seed.a, seed.b};
      msac::LevelSetField phi0 =
          model == "cv" ? msac::seed_to_levelset(se, norm.width, norm.height)
                        : msac::binary_step_levelset(msac::rasterize_ellipse(se, norm.width, norm.height));
      auto [phi, rep] = model == "cv" ? msac::evolve_cv(norm, phi0, cv_params)
                                      : msac::evolve_drlse(norm, phi0, drlse_params);
      final_mask = msac::mask_from_levelset(phi);
      log << "iterations=" << rep.iterations_run << " stop=" << msac::to_string(rep.stop_reason)
          << " final_energy=" << rep.final_energy << "\n";
      log << "energy_trace:";
      for (double e : rep.energy_trace) log << ' ' << e;
      log << "\n";
      log << "wall_time_s = "
          << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << "\n";
      if (rep.stop_reason == msac::StopReason::degenerate_field) {
        std::cerr << "numerical failure: degenerate evolution\n";
        exit_code = kExitNumerical;
      }
    } else {
      std::cerr << "error: unknown model '" << model << "' (proposed|cv|drlse)\n";
      return kExitInput;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }

  if (final_mask.width > 0) {
    msac::write_mask_pgm((dir / "mask.pgm").string(), final_mask);
    msac::write_png_gray((dir / "overlay.png").string(), msac::overlay_contour(norm, final_mask));
  }
  write_manifest(dir / "manifest.txt", manifest);
  log_info("segment: wrote results to " + out_dir);
  return exit_code;
}

int cmd_eval(const std::string& auto_dir, const std::string& manual_dir, const std::string& out_csv) {
  auto list_masks = [](const fs::path& dir) {
    std::vector<std::string> names;
    if (fs::is_directory(dir))
      for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const auto ext = e.path().extension().string();
        if (ext == ".pgm" || ext == ".png") names.push_back(e.path().filename().string());
      }
    std::sort(names.begin(), names.end());
    return names;
  };

  const auto a_names = list_masks(auto_dir);
  const auto m_names = list_masks(manual_dir);
  if (a_names.empty() || m_names.empty()) {
    std::cerr << "error: no mask files in " << (a_names.empty() ? auto_dir : manual_dir) << "\n";
    return kExitInput;
  }
  std::vector<std::string> only_a, only_m, both;
  std::set_difference(a_names.begin(), a_names.end(), m_names.begin(), m_names.end(),
                      std::back_inserter(only_a));
  std::set_difference(m_names.begin(), m_names.end(), a_names.begin(), a_names.end(),
                      std::back_inserter(only_m));
  std::set_intersection(a_names.begin(), a_names.end(), m_names.begin(), m_names.end(),
                        std::back_inserter(both));
  if (!only_a.empty() || !only_m.empty()) {
    std::cerr << "error: unmatched files across directories\n";
    for (const auto& n : only_a) std::cerr << "  only in " << auto_dir << ": " << n << "\n";
    for (const auto& n : only_m) std::cerr << "  only in " << manual_dir << ": " << n << "\n";
    return kExitInput;
  }

  std::vector<msac::SegScores> scores;
  try {
    for (const auto& n : both) {
      const msac::BinaryMask a = msac::load_mask((fs::path(auto_dir) / n).string());
      const msac::BinaryMask m = msac::load_mask((fs::path(manual_dir) / n).string());
      scores.push_back(msac::score(a, m));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }

  const msac::BatchSummary summary = msac::summarize(scores);
  {
    std::ofstream out(out_csv);
    if (!out) {
      std::cerr << "error: cannot write " << out_csv << "\n";
      return kExitInput;
    }
    msac::write_scores_csv(out, both, summary);
  }
  write_manifest(out_csv + ".manifest", {{"auto", auto_dir},
                                         {"manual", manual_dir},
                                         {"cases", std::to_string(both.size())},
                                         {"std_convention", "population"}});
  std::cout << "TP " << summary.mean.tp << " ± " << summary.stddev.tp << "\n"
            << "FP " << summary.mean.fp << " ± " << summary.stddev.fp << "\n"
            << "Js " << summary.mean.js << " ± " << summary.stddev.js << "\n";
  return kExitOk;
}

int cmd_phantom(const std::string& spec_path, const std::string& out_dir, bool force) {
  msac::PhantomSpec spec;
  msac::ConfigMap cfg;
  try {
    cfg = msac::load_config(spec_path);
    spec = msac::phantom_from_config(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }

  fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory " << out_dir << "\n";
    return kExitInput;
  }
  std::string blocker;
  if (outputs_blocked(dir, {"phantom.pgm", "truth.pgm", "spec_echo.txt"}, force, blocker)) {
    std::cerr << "error: refusing to overwrite " << blocker << " (use --force)\n";
    return kExitInput;
  }

  try {
    const auto [image, truth] = msac::generate(spec);
    msac::write_pgm((dir / "phantom.pgm").string(), image);
    msac::write_mask_pgm((dir / "truth.pgm").string(), truth);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }

  std::ofstream echo(dir / "spec_echo.txt");
  echo << "# resolved phantom spec\n";
  echo << "# noise generator: mt19937_64 + Box-Muller, seeded below\n";
  echo << "width = " << spec.width << "\nheight = " << spec.height << "\n";
  echo << "cx = " << spec.cx << "\ncy = " << spec.cy << "\na = " << spec.a << "\nb = " << spec.b
       << "\nrot_deg = " << spec.rot_deg << "\n";
  if (!spec.polygon.empty()) {
    echo << "polygon = ";
    for (std::size_t i = 0; i < spec.polygon.size(); ++i)
      echo << (i ? ", " : "") << spec.polygon[i][0] << ":" << spec.polygon[i][1];
    echo << "\n";
  }
  echo << "fg = " << spec.fg << "\nbg = " << spec.bg << "\nblur_sigma = " << spec.blur_sigma
       << "\ngap_ramp = " << spec.gap_ramp << "\n";
  if (!spec.gaps.empty()) {
    echo << "gap_arcs = ";
    for (std::size_t i = 0; i < spec.gaps.size(); ++i)
      echo << (i ? ", " : "") << spec.gaps[i].start_deg << ":" << spec.gaps[i].extent_deg;
    echo << "\n";
  }
  if (!spec.distractors.empty()) {
    echo << "distractors = ";
    for (std::size_t i = 0; i < spec.distractors.size(); ++i)
      echo << (i ? ", " : "") << spec.distractors[i].cx << ":" << spec.distractors[i].cy << ":"
           << spec.distractors[i].radius << ":" << spec.distractors[i].level;
    echo << "\n";
  }
  echo << "bias = " << spec.bias[0] << ":" << spec.bias[1] << ":" << spec.bias[2] << ":"
       << spec.bias[3] << ":" << spec.bias[4] << "\n";
  echo << "speckle_sigma = " << spec.speckle_sigma << "\nrng_seed = " << spec.rng_seed << "\n";

  log_info("phantom: wrote phantom.pgm, truth.pgm, spec_echo.txt to " + out_dir);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"msac - multi-scale narrow-band active contour segmentation"};
  app.require_subcommand(1);

  // segment
  std::string in_path, model = "proposed", seed_str, config_path, out_dir;
  bool force = false;
  auto* seg = app.add_subcommand("segment", "segment one image");
  seg->add_option("--input", in_path, "input image (PGM or PNG)")->required();
  seg->add_option("--model", model, "proposed|cv|drlse");
  seg->add_option("--seed", seed_str, "seed ellipse cx,cy,a,b (finest-scale px)")->required();
  seg->add_option("--config", config_path, "key = value config file");
  seg->add_option("--out", out_dir, "output directory")->required();
  seg->add_flag("--force", force, "overwrite existing result files");

  // model-parameter overrides, mirroring the ModelParams field names
  std::map<std::string, std::string> raw_flags;
  for (const char* name :
       {"omega1", "omega2", "omega3", "patch_radius", "band_halfwidth", "r_s", "heaviside_eps",
        "dt", "max_iters_per_scale", "convergence_tol", "n_scales"}) {
    seg->add_option_function<std::string>(
        std::string("--") + name,
        [&raw_flags, name](const std::string& v) { raw_flags[name] = v; });
  }

  // eval
  std::string auto_dir, manual_dir, out_csv;
  auto* ev = app.add_subcommand("eval", "score auto masks against manual masks");
  ev->add_option("--auto", auto_dir, "directory of automatic masks")->required();
  ev->add_option("--manual", manual_dir, "directory of manual masks")->required();
  ev->add_option("--out", out_csv, "output CSV path")->required();

  // phantom
  std::string spec_path, phantom_out;
  bool phantom_force = false;
  auto* ph = app.add_subcommand("phantom", "generate a synthetic phantom");
  ph->add_option("--spec", spec_path, "phantom spec file (key = value)")->required();
  ph->add_option("--out", phantom_out, "output directory")->required();
  ph->add_flag("--force", phantom_force, "overwrite existing result files");

  CLI11_PARSE(app, argc, argv);

  try {
    if (seg->parsed()) {
      msac::ConfigMap overrides;
      for (const auto& [k, v] : raw_flags) overrides.emplace_back(k, v);
      return cmd_segment(in_path, model, seed_str, config_path, out_dir, force, overrides);
    }
    if (ev->parsed()) return cmd_eval(auto_dir, manual_dir, out_csv);
    if (ph->parsed()) return cmd_phantom(spec_path, phantom_out, phantom_force);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
