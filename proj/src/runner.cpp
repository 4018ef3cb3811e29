#include "avln/runner.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "avln/controller.hpp"

namespace avln {

void RunConfig::validate() const {
  step.validate();
  if (local_map_size <= 0 || local_map_size % 2 == 0)
    throw InvalidArgument("local map size must be odd and positive");
  if (bev_hidden_dim == 0) throw InvalidArgument("BEV hidden size must be positive");
}

std::string_view to_string(EpisodeStatus s) {
  switch (s) {
    case EpisodeStatus::Stopped: return "stopped";
    case EpisodeStatus::Budget: return "budget";
    case EpisodeStatus::Stuck: return "stuck";
    case EpisodeStatus::Error: return "error";
  }
  return "?";
}

EpisodeStatus episode_status_from_string(std::string_view s) {
  for (EpisodeStatus e : {EpisodeStatus::Stopped, EpisodeStatus::Budget, EpisodeStatus::Stuck,
                          EpisodeStatus::Error})
    if (to_string(e) == s) return e;
  throw InvalidArgument("unknown episode status: " + std::string(s));
}

Path executed_path(const std::vector<TrajectoryEntry>& trajectory) {
  if (trajectory.empty()) throw InvalidArgument("empty trajectory");
  Path p{trajectory.front().pose.position};
  for (std::size_t i = 1; i < trajectory.size(); ++i)
    if (trajectory[i].pose.position != p.back()) p.push_back(trajectory[i].pose.position);
  return p;
}

MetricsReport score_trajectory(const Path& executed, const Path& gt, EpisodeStatus status,
                               const StepConfig& cfg) {
  MetricsReport m = evaluate_episode(executed, gt, cfg);
  if (status == EpisodeStatus::Stuck || status == EpisodeStatus::Error) {
    m.success = false;
    m.sdtw = 0.0;
  }
  return m;
}

std::shared_ptr<const GruCell> make_gru(const RunConfig& cfg, std::size_t feature_dim) {
  if (cfg.gru_weights) {
    auto g = std::make_shared<const GruCell>(GruCell::load(*cfg.gru_weights));
    if (g->input_dim() != feature_dim)
      throw InvalidArgument("GRU weights expect input size " + std::to_string(g->input_dim()) +
                            ", scene features have " + std::to_string(feature_dim));
    return g;
  }
  return std::make_shared<const GruCell>(
      GruCell::seeded(feature_dim, cfg.bev_hidden_dim, cfg.gru_seed));
}

namespace {

void check_decision(const Decision& d, std::size_t n) {
  if (d.scores.size() != n + 1 || d.vertical_offsets.size() != n)
    throw Error("policy returned " + std::to_string(d.scores.size()) + " scores and " +
                std::to_string(d.vertical_offsets.size()) + " offsets for " + std::to_string(n) +
                " candidates");
  if (d.selected && *d.selected >= n) throw Error("policy selected a candidate out of range");
}

}  // namespace

EpisodeResult run_episode(const Scene& scene, const Episode& episode, const Policy& policy,
                          const RunConfig& cfg, std::shared_ptr<const GruCell> gru) {
  cfg.validate();
  if (scene.scene_id() != episode.scene_id)
    throw InvalidArgument("episode " + episode.episode_id + " expects scene " + episode.scene_id +
                          ", got " + scene.scene_id());
  if (!gru || gru->input_dim() != scene.feature_dim())
    throw InvalidArgument("GRU input size does not match scene features");

  const StepConfig& sc = cfg.step;
  const AblationFlags& ab = cfg.ablation;
  const int budget = sc.max_steps;
  const bool want_teacher = policy.needs_teacher() || cfg.record_teacher;
  const bool keep_steps = cfg.record_steps || cfg.record_teacher;

  EpisodeResult res;
  res.episode_id = episode.episode_id;
  res.scene_id = episode.scene_id;
  res.status = EpisodeStatus::Budget;

  Pose pose = episode.start_pose;
  res.trajectory.push_back({0, 0, std::nullopt, pose});
  Path executed{pose.position};
  int used = 0;

  BevMap bev(episode.start_pose.position, sc.horizontal_step, gru);
  const bool use_pool = ab.extra_candidates;
  CandidatePool pool(use_pool ? cfg.pool_size : 0, episode.start_pose.position, sc);
  pool.mark_visited(pose.position);

  std::vector<std::shared_ptr<const Observation>> history;
  std::vector<Vec3> recent;

  for (int step = 0; used < budget && step < budget; ++step) {
    const Skybox box = get_skybox(scene, pose);
    std::vector<Candidate> live = make_candidates(box, sc, step);
    if (!ab.top_down_obs)
      std::erase_if(live, [](const Candidate& c) { return !is_horizontal(c.view()); });

    LocalMap local;
    if (ab.bev_map) {
      for (const Candidate& c : live) bev.update(c.position, c.feature());
      local = bev.local_map(pose, cfg.local_map_size);
    } else {
      local.size = cfg.local_map_size;
      local.hidden_dim = gru->hidden_dim();
      local.data.assign(static_cast<std::size_t>(local.size) * local.size * local.hidden_dim, 0.0);
    }

    std::vector<Candidate> merged = use_pool ? pool.merge_step(live) : live;
    recent.push_back(pose.position);

    std::optional<TeacherLabel> label;
    if (want_teacher) {
      const std::size_t considered = cfg.teacher_uses_pool ? merged.size() : live.size();
      label = teacher_label(merged, considered, executed, episode.gt_path, cfg.lookahead, sc);
    }

    PolicyContext ctx;
    ctx.episode_id = episode.episode_id;
    ctx.step = step;
    ctx.instruction = episode.instruction;
    ctx.candidates = merged;
    ctx.live_count = live.size();
    ctx.pose = pose;
    ctx.local_map = &local;
    ctx.bev = ab.bev_map ? &bev : nullptr;
    ctx.history = history;
    ctx.recent_positions = recent;
    ctx.teacher = label ? &*label : nullptr;
    ctx.step_config = sc;
    Decision decision = policy.decide(ctx);
    check_decision(decision, merged.size());
    res.decisions = step + 1;

    StepRecord rec;
    if (keep_steps) {
      rec.step = step;
      rec.pose = pose;
      rec.candidates = merged;
      rec.live_count = live.size();
      rec.decision = decision;
      rec.teacher = label;
    }

    if (!decision.selected) {
      res.status = EpisodeStatus::Stopped;
      if (keep_steps) res.steps.push_back(std::move(rec));
      break;
    }

    const Candidate& chosen = merged[*decision.selected];
    const VerticalLevel level = ab.vertical_action
                                    ? decode_vertical(decision.vertical_offsets[*decision.selected])
                                    : VerticalLevel::Middle;
    const Vec3 target = chosen.at(level);

    ControlOutcome outcome;
    bool stuck = false;
    try {
      outcome = go_to(scene, pose, target, sc, budget - used);
    } catch (const StuckError& e) {
      outcome = e.partial();
      stuck = true;
    }
    for (std::size_t i = 0; i < outcome.actions.size(); ++i) {
      ++used;
      res.trajectory.push_back({used, step, outcome.actions[i], outcome.poses[i]});
      if (outcome.poses[i].position != executed.back()) executed.push_back(outcome.poses[i].position);
    }
    pose = outcome.final_pose;

    if (use_pool) {
      pool.update_after_prediction(
          merged, std::span<const double>(decision.scores.data(), merged.size()),
          decision.selected, pose.position, step);
    }
    history.push_back(chosen.observation);

    if (keep_steps) {
      rec.target = target;
      rec.actions = static_cast<int>(outcome.actions.size());
      if (use_pool) rec.pool = pool.entries();
      res.steps.push_back(std::move(rec));
    }
    if (stuck) {
      res.status = EpisodeStatus::Stuck;
      break;
    }
  }

  res.metrics = score_trajectory(executed, episode.gt_path, res.status, sc);
  if (cfg.record_bev)
    res.bev = BevSnapshot{bev.origin(), bev.cell_size(), bev.hidden_dim(), bev.cells()};
  return res;
}

SuiteResult run_suite(const std::vector<Episode>& episodes, const SceneSet& scenes,
                      const Policy& policy, const RunConfig& cfg, int parallelism) {
  cfg.validate();
  if (parallelism < 1) throw InvalidArgument("parallelism must be at least 1");

  // One set of cell weights per feature size, shared read-only by all workers.
  std::map<std::uint32_t, std::shared_ptr<const GruCell>> grus;
  for (const auto& [id, scene] : scenes)
    if (scene && !grus.contains(scene->feature_dim()))
      grus.emplace(scene->feature_dim(), make_gru(cfg, scene->feature_dim()));

  SuiteResult out;
  out.episodes.resize(episodes.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < episodes.size(); i = next++) {
      const Episode& e = episodes[i];
      EpisodeResult& r = out.episodes[i];
      try {
        const auto it = scenes.find(e.scene_id);
        if (it == scenes.end() || !it->second) throw Error("scene not found: " + e.scene_id);
        r = run_episode(*it->second, e, policy, cfg, grus.at(it->second->feature_dim()));
      } catch (const std::exception& ex) {
        r = EpisodeResult{};
        r.episode_id = e.episode_id;
        r.scene_id = e.scene_id;
        r.status = EpisodeStatus::Error;
        r.error = ex.what();
      }
    }
  };
  const int threads = std::min<int>(parallelism, static_cast<int>(std::max<std::size_t>(1, episodes.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<MetricsReport> ok;
  for (const EpisodeResult& r : out.episodes) {
    if (r.status == EpisodeStatus::Error)
      ++out.errors;
    else
      ok.push_back(r.metrics);
  }
  out.aggregate = aggregate(ok);
  return out;
}

std::unique_ptr<Policy> make_policy(std::string_view name, std::uint64_t seed,
                                    const std::optional<std::filesystem::path>& scores) {
  if (name == "oracle") return std::make_unique<OraclePolicy>();
  if (name == "random") return std::make_unique<RandomPolicy>(seed);
  if (name == "heuristic") return std::make_unique<HeuristicPolicy>(seed);
  if (name == "replay") {
    if (!scores) throw InvalidArgument("replay policy needs a score file");
    return std::make_unique<ReplayPolicy>(ReplayPolicy::load(*scores));
  }
  throw InvalidArgument("unknown policy: " + std::string(name));
}

}  // namespace avln
