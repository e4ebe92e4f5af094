// Command-line front end: one subcommand per pipeline stage, plus the planner
// benchmark and NIQE model fitting.
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "mavi/harness/pipeline.hpp"
#include "mavi/quality/niqe.hpp"
#include "mavi/quality/synth_images.hpp"

namespace {

struct Common {
  std::string config_path, profile, odometry, run_dir, log_level = "info";
  std::uint64_t seed = 0;
};

mavi::PipelineConfig resolve(const Common& c, const CLI::App* sub) {
  mavi::PipelineConfig cfg;
  if (!c.config_path.empty()) {
    cfg = mavi::load_config(c.config_path);
    if (!c.profile.empty() && c.profile != cfg.profile) {
      // Switch the scene defaults but keep everything else from the file.
      const auto scene = mavi::PipelineConfig::defaults(c.profile);
      cfg.profile = c.profile;
      cfg.facility = scene.facility;
      cfg.exploration.start = scene.exploration.start;
      cfg.tracking.curve_center = scene.tracking.curve_center;
    }
  } else {
    cfg = mavi::PipelineConfig::defaults(c.profile.empty() ? "desk" : c.profile);
  }
  if (sub->count("--seed")) cfg.seed = c.seed;
  if (!c.odometry.empty()) cfg.odometry = mavi::parse_odometry(c.odometry);
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic facility inspection pipeline"};
  app.require_subcommand(1, 1);

  Common c;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", c.config_path, "JSON configuration file");
    sub->add_option("--seed", c.seed, "Random seed (overrides the config)");
    sub->add_option("--profile", c.profile, "Scene profile")->check(CLI::IsMember({"desk", "full"}));
    sub->add_option("--odometry", c.odometry, "Odometry fed to the tracker")->check(CLI::IsMember({"truth", "eskf"}));
    sub->add_option("--log-level", c.log_level, "trace, debug, info, warn, error");
    return sub;
  };
  const std::pair<const char*, const char*> stages[] = {
      {"gen", "Generate the facility point cloud and ground truth"},
      {"segment", "Segment ground, roof, columns and walls"},
      {"plan", "Plan scan paths and run the planner benchmark"},
      {"explore", "Explore and inspect every planned instance"},
      {"estimate", "LiDAR-inertial state estimation on a test flight"},
      {"fly", "Tracking runs on the scan profile and the curved path"},
      {"metrics", "Re-evaluate an existing run directory"},
      {"all", "Run every stage and write the full report"}};
  for (const auto& [name, help] : stages)
    add_common(app.add_subcommand(name, help))
        ->add_option("--run-dir", c.run_dir, "Output directory (default runs/<profile>)");

  add_common(app.add_subcommand("config", "Print the resolved configuration as JSON"));
  add_common(app.add_subcommand("bench", "Planner benchmark: T_G, T_Opt, T_A*, D, L_final"));

  std::string model_out = std::string(MAVI_DATA_DIR) + "/niqe_model.json";
  int count = 32, size = 128, patches = 500;
  std::uint64_t corpus_seed = 1000;
  auto* fit = app.add_subcommand("fit-niqe", "Fit the natural-scene model on generated textures");
  fit->add_option("--out", model_out, "Model JSON path");
  fit->add_option("--count", count, "Number of textures");
  fit->add_option("--size", size, "Texture size in pixels");
  fit->add_option("--corpus-seed", corpus_seed, "Texture seed");
  fit->add_option("--patches", patches, "Maximum number of patches");

  CLI11_PARSE(app, argc, argv);
  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();

  try {
    spdlog::set_default_logger(spdlog::stderr_color_mt("mavi"));
    spdlog::set_level(spdlog::level::from_str(c.log_level));
    if (name == "fit-niqe") {
      const mavi::NsModel m = mavi::fit_ns_model(mavi::render_corpus(count, size, corpus_seed), 32, patches);
      mavi::save_ns_model(model_out, m);
      spdlog::info("wrote {}", model_out);
      return 0;
    }
    const mavi::PipelineConfig cfg = resolve(c, sub);
    if (name == "config") {
      std::cout << mavi::config_to_json(cfg).dump(2) << '\n';
      return 0;
    }
    if (name == "bench") {
      const auto rows = mavi::run_planner_benchmark(cfg);
      std::printf("%-9s %6s %9s %10s %10s %10s %8s\n", "scenario", "D", "L_final", "T_G(ms)", "T_Opt(ms)",
                  "T_A*(ms)", "success");
      for (const auto& r : rows)
        std::printf("%-9s %6.3f %9.3f %10.3f %10.3f %10.3f %8s\n", r.scenario.c_str(), r.distance, r.length,
                    r.t_gen_ms, r.t_opt_ms, r.t_astar_ms, r.success ? "yes" : "no");
      return 0;
    }
    const std::string run_dir = c.run_dir.empty() ? "runs/" + cfg.profile : c.run_dir;
    const mavi::EvalReport rep = mavi::run_pipeline(cfg, run_dir, mavi::parse_stage(name));
    std::cout << mavi::report_to_json(rep).dump(2) << '\n';
    return rep.failures.empty() ? 0 : 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
}
