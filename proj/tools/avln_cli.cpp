// Command-line front end: scene and dataset generation, suite runs, offline
// scoring, teacher export and plotting.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "avln/plot.hpp"
#include "avln/records.hpp"
#include "avln/runner.hpp"
#include "avln/simd.hpp"

namespace fs = std::filesystem;
using namespace avln;

namespace {

struct SuiteArgs {
  fs::path episodes;
  std::vector<fs::path> scenes;
  int parallelism = 1;
  RunConfig cfg;
  bool no_pool = false, no_bev = false, no_top_down = false, no_vertical = false;
  bool teacher_live_only = false;
  std::string gru_weights;
};

void add_step_options(CLI::App* app, StepConfig& s) {
  app->add_option("--horizontal-step", s.horizontal_step, "meters per horizontal move")
      ->capture_default_str();
  app->add_option("--vertical-step", s.vertical_step, "meters per vertical move")
      ->capture_default_str();
  app->add_option("--success-radius", s.success_radius)->capture_default_str();
  app->add_option("--max-steps", s.max_steps, "primitive-action budget per episode")
      ->capture_default_str();
}

void add_suite_options(CLI::App* app, SuiteArgs& a) {
  app->add_option("--episodes", a.episodes, "episode file")->required()->check(CLI::ExistingFile);
  app->add_option("--scene", a.scenes, "scene file or directory of .avgrid files")
      ->required()
      ->check(CLI::ExistingPath);
  app->add_option("-j,--parallelism", a.parallelism)->capture_default_str();
  add_step_options(app, a.cfg.step);
  app->add_option("--local-map", a.cfg.local_map_size, "local BEV crop size")->capture_default_str();
  app->add_option("--pool-size", a.cfg.pool_size)->capture_default_str();
  app->add_option("--lookahead", a.cfg.lookahead, "teacher window lookahead")->capture_default_str();
  app->add_option("--bev-hidden", a.cfg.bev_hidden_dim)->capture_default_str();
  app->add_option("--gru-seed", a.cfg.gru_seed)->capture_default_str();
  app->add_option("--gru-weights", a.gru_weights, "JSON GRU weights");
  app->add_flag("--no-pool", a.no_pool, "disable extra candidates");
  app->add_flag("--no-bev", a.no_bev, "feed a zero BEV tensor");
  app->add_flag("--no-top-down", a.no_top_down, "drop up/down candidates");
  app->add_flag("--no-vertical", a.no_vertical, "force the middle vertical level");
  app->add_flag("--teacher-live-only", a.teacher_live_only,
                "teacher picks among live candidates only");
}

void finish_suite_args(SuiteArgs& a) {
  a.cfg.ablation = {!a.no_pool, !a.no_bev, !a.no_top_down, !a.no_vertical};
  a.cfg.teacher_uses_pool = !a.teacher_live_only;
  if (!a.gru_weights.empty()) a.cfg.gru_weights = a.gru_weights;
}

SceneSet load_scenes(const std::vector<fs::path>& paths) {
  SceneSet out;
  auto add = [&](const fs::path& p) {
    auto s = std::make_shared<const Scene>(load_scene(p));
    out[s->scene_id()] = s;
  };
  for (const fs::path& p : paths) {
    if (fs::is_directory(p)) {
      for (const auto& e : fs::directory_iterator(p))
        if (e.path().extension() == ".avgrid") add(e.path());
    } else {
      add(p);
    }
  }
  return out;
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p);
  if (!f) throw Error("cannot write " + p.string());
  return f;
}

void print_aggregate(const SuiteResult& s) {
  const AggregateMetrics& a = s.aggregate;
  std::printf("episodes %zu  errors %zu  NE %.2f  SR %s  OSR %s  nDTW %.3f  SDTW %.3f\n",
              a.episodes, s.errors, a.ne, format_percent(a.sr).c_str(),
              format_percent(a.osr).c_str(), a.ndtw, a.sdtw);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grid-based aerial vision-and-language navigation harness"};
  app.set_config("--config", "", "TOML or INI file with option values");
  app.require_subcommand(1);
  std::string isa;
  app.add_option("--isa", isa, "kernel variant: scalar, avx2, neon");

  // make-scene
  auto* mk = app.add_subcommand("make-scene", "generate a block city and save it");
  CityParams city;
  fs::path scene_out;
  mk->add_option("--seed", city.seed)->capture_default_str();
  mk->add_option("--extent", city.extent, "side length in meters")->capture_default_str();
  mk->add_option("--density", city.building_density)->capture_default_str();
  mk->add_option("--max-height", city.max_height)->capture_default_str();
  mk->add_option("--voxel", city.voxel_size)->capture_default_str();
  mk->add_option("--block", city.block_size)->capture_default_str();
  mk->add_option("--street", city.street_width)->capture_default_str();
  mk->add_option("--headroom", city.headroom)->capture_default_str();
  mk->add_option("--feature-dim", city.feature_dim)->capture_default_str();
  mk->add_option("--scene-id", city.scene_id);
  mk->add_option("-o,--out", scene_out, "output .avgrid path")->required();

  // make-data
  auto* md = app.add_subcommand("make-data", "generate synthetic episodes for a scene");
  DatasetParams dp;
  StepConfig data_steps;
  fs::path data_scene, data_out;
  md->add_option("--scene", data_scene)->required()->check(CLI::ExistingFile);
  md->add_option("-n,--count", dp.episodes)->capture_default_str();
  md->add_option("--seed", dp.seed)->capture_default_str();
  md->add_option("--min-moves", dp.min_moves)->capture_default_str();
  md->add_option("--max-moves", dp.max_moves)->capture_default_str();
  md->add_option("--min-segment", dp.min_segment, "horizontal moves between turns, lower bound")
      ->capture_default_str();
  md->add_option("--max-segment", dp.max_segment)->capture_default_str();
  md->add_option("--vertical-prob", dp.vertical_probability, "chance a move is vertical")
      ->capture_default_str();
  md->add_option("--min-altitude", dp.min_altitude)->capture_default_str();
  md->add_option("--max-altitude", dp.max_altitude)->capture_default_str();
  add_step_options(md, data_steps);
  md->add_option("-o,--out", data_out)->required();

  // run
  auto* run = app.add_subcommand("run", "run a policy over an episode file");
  SuiteArgs run_args;
  std::string policy_name = "oracle";
  std::uint64_t policy_seed = 0;
  fs::path run_out = "out", replay_scores;
  bool record_steps = false, record_bev = false;
  add_suite_options(run, run_args);
  run->add_option("--policy", policy_name, "oracle, random, heuristic or replay")
      ->check(CLI::IsMember({"oracle", "random", "heuristic", "replay"}))
      ->capture_default_str();
  run->add_option("--seed", policy_seed, "policy seed")->capture_default_str();
  run->add_option("--scores", replay_scores, "score file for the replay policy")
      ->check(CLI::ExistingFile);
  run->add_flag("--record-steps", record_steps, "write steps.jsonl and scores.jsonl");
  run->add_flag("--record-bev", record_bev, "write final BEV maps to bev.jsonl");
  run->add_option("-o,--out", run_out, "output directory")->capture_default_str();

  // score
  auto* sc = app.add_subcommand("score", "recompute metrics from a trajectory log");
  fs::path score_eps, score_log, score_out;
  StepConfig score_steps;
  sc->add_option("--episodes", score_eps)->required()->check(CLI::ExistingFile);
  sc->add_option("--log", score_log, "trajectories.jsonl")->required()->check(CLI::ExistingFile);
  sc->add_option("-o,--out", score_out, "report path (default: stdout)");
  add_step_options(sc, score_steps);

  // export-teacher
  auto* ex = app.add_subcommand("export-teacher", "teacher-forced run writing teacher tuples");
  SuiteArgs ex_args;
  fs::path ex_out;
  add_suite_options(ex, ex_args);
  ex->add_option("-o,--out", ex_out, "teacher tuple file")->required();

  // plot
  auto* pl = app.add_subcommand("plot", "render an episode as SVG");
  fs::path plot_scene, plot_eps, plot_log, plot_bev, plot_out;
  std::string plot_episode;
  double plot_scale = 2.0, plot_radius = 20.0;
  pl->add_option("--scene", plot_scene)->required()->check(CLI::ExistingFile);
  pl->add_option("--episodes", plot_eps)->check(CLI::ExistingFile);
  pl->add_option("--log", plot_log, "trajectories.jsonl")->check(CLI::ExistingFile);
  pl->add_option("--bev", plot_bev, "bev.jsonl")->check(CLI::ExistingFile);
  pl->add_option("--episode", plot_episode, "episode id")->required();
  pl->add_option("--scale", plot_scale, "pixels per meter")->capture_default_str();
  pl->add_option("--success-radius", plot_radius)->capture_default_str();
  pl->add_option("-o,--out", plot_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (!isa.empty()) simd::set_active_isa(simd::isa_from_string(isa));

    if (*mk) {
      const Scene s = generate_city(city);
      if (scene_out.has_parent_path()) fs::create_directories(scene_out.parent_path());
      save_scene(s, scene_out);
      std::printf("%s: %u x %u x %u voxels\n", s.scene_id().c_str(), s.dims().nx, s.dims().ny,
                  s.dims().nz);
      return 0;
    }

    if (*md) {
      const Scene s = load_scene(data_scene);
      const auto eps = generate_dataset(s, dp, data_steps);
      if (data_out.has_parent_path()) fs::create_directories(data_out.parent_path());
      save_episodes(eps, data_out);
      std::printf("%zu episodes written to %s\n", eps.size(), data_out.string().c_str());
      return 0;
    }

    if (*run) {
      finish_suite_args(run_args);
      RunConfig& cfg = run_args.cfg;
      cfg.run_seed = policy_seed;
      cfg.record_steps = record_steps;
      cfg.record_bev = record_bev;
      const auto eps = load_episodes(run_args.episodes);
      const SceneSet scenes = load_scenes(run_args.scenes);
      const auto policy = make_policy(
          policy_name, policy_seed,
          replay_scores.empty() ? std::nullopt : std::optional<fs::path>(replay_scores));
      const SuiteResult res = run_suite(eps, scenes, *policy, cfg, run_args.parallelism);

      fs::create_directories(run_out);
      auto report = open_out(run_out / "report.jsonl");
      write_report(report, res);
      auto traj = open_out(run_out / "trajectories.jsonl");
      for (const EpisodeResult& r : res.episodes)
        if (r.status != EpisodeStatus::Error) write_trajectory(traj, r);
      if (record_steps) {
        auto steps = open_out(run_out / "steps.jsonl");
        auto scores = open_out(run_out / "scores.jsonl");
        for (const EpisodeResult& r : res.episodes) {
          write_step_log(steps, r);
          write_score_lines(scores, r);
        }
      }
      if (record_bev) {
        auto bev = open_out(run_out / "bev.jsonl");
        for (const EpisodeResult& r : res.episodes)
          if (r.bev) bev << bev_snapshot_json(r.episode_id, *r.bev).dump() << '\n';
      }
      for (const EpisodeResult& r : res.episodes)
        if (r.status == EpisodeStatus::Error)
          std::fprintf(stderr, "error: %s: %s\n", r.episode_id.c_str(), r.error.c_str());
      print_aggregate(res);
      return res.errors == 0 ? 0 : 1;
    }

    if (*sc) {
      const auto eps = load_episodes(score_eps);
      const auto logs = read_trajectory_log(score_log);
      SuiteResult res;
      for (const Episode& e : eps) {
        EpisodeResult r;
        r.episode_id = e.episode_id;
        r.scene_id = e.scene_id;
        const auto it = logs.find(e.episode_id);
        if (it == logs.end() || it->second.entries.empty()) {
          r.error = "no trajectory in log";
          ++res.errors;
        } else {
          r.status = it->second.status;
          r.trajectory = it->second.entries;
          r.decisions = it->second.decisions;
          r.metrics = score_trajectory(executed_path(r.trajectory), e.gt_path, r.status, score_steps);
        }
        res.episodes.push_back(std::move(r));
      }
      std::vector<MetricsReport> ok;
      for (const EpisodeResult& r : res.episodes)
        if (r.status != EpisodeStatus::Error) ok.push_back(r.metrics);
      res.aggregate = aggregate(ok);
      if (score_out.empty()) {
        write_report(std::cout, res);
      } else {
        auto f = open_out(score_out);
        write_report(f, res);
        print_aggregate(res);
      }
      return res.errors == 0 ? 0 : 1;
    }

    if (*ex) {
      finish_suite_args(ex_args);
      ex_args.cfg.record_teacher = true;
      const auto eps = load_episodes(ex_args.episodes);
      const SceneSet scenes = load_scenes(ex_args.scenes);
      const OraclePolicy oracle;
      const SuiteResult res = run_suite(eps, scenes, oracle, ex_args.cfg, ex_args.parallelism);
      auto out = open_out(ex_out);
      std::size_t tuples = 0;
      for (const EpisodeResult& r : res.episodes) {
        write_teacher_tuples(out, r);
        tuples += r.steps.size();
      }
      for (const EpisodeResult& r : res.episodes)
        if (r.status == EpisodeStatus::Error)
          std::fprintf(stderr, "error: %s: %s\n", r.episode_id.c_str(), r.error.c_str());
      std::printf("%zu teacher tuples from %zu episodes\n", tuples, res.episodes.size());
      return res.errors == 0 ? 0 : 1;
    }

    if (*pl) {
      const Scene s = load_scene(plot_scene);
      PlotInput in;
      in.scene = &s;
      in.success_radius = plot_radius;
      in.title = plot_episode;
      if (!plot_eps.empty()) {
        for (const Episode& e : load_episodes(plot_eps))
          if (e.episode_id == plot_episode) in.gt = e.gt_path;
        if (!in.gt) throw Error("episode not in file: " + plot_episode);
      }
      if (!plot_log.empty()) {
        const auto logs = read_trajectory_log(plot_log);
        const auto it = logs.find(plot_episode);
        if (it == logs.end()) throw Error("episode not in log: " + plot_episode);
        for (const TrajectoryEntry& t : it->second.entries) in.executed.push_back(t.pose.position);
      }
      if (!plot_bev.empty()) {
        std::ifstream f(plot_bev);
        std::string line;
        while (std::getline(f, line)) {
          if (line.empty()) continue;
          const auto j = nlohmann::json::parse(line);
          if (j.at("episode_id") == plot_episode) in.bev = bev_snapshot_from_json(j);
        }
      }
      auto f = open_out(plot_out);
      f << render_svg(in, plot_scale);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
