#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "avln/controller.hpp"
#include "avln/records.hpp"
#include "avln/runner.hpp"

using namespace avln;

namespace {

const Scene& city() {
  static const Scene s = generate_city(CityParams{.seed = 31, .extent = 300.0});
  return s;
}

const std::vector<Episode>& episodes() {
  static const std::vector<Episode> e = [] {
    DatasetParams p;
    p.episodes = 20;
    p.seed = 5;
    return generate_dataset(city(), p, StepConfig{});
  }();
  return e;
}

SceneSet scenes() {
  return {{city().scene_id(), std::shared_ptr<const Scene>(&city(), [](const Scene*) {})}};
}

std::filesystem::path temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "avln_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string report_text(const SuiteResult& s) {
  std::ostringstream out;
  write_report(out, s);
  for (const auto& r : s.episodes) write_trajectory(out, r);
  return out.str();
}

}  // namespace

TEST_CASE("generated episodes are collision-free grid walks") {
  const StepConfig cfg{};
  for (const Episode& e : episodes()) {
    CHECK(e.scene_id == city().scene_id());
    CHECK(e.gt_path.front() == e.start_pose.position);
    CHECK(e.gt_path.size() >= 11);
    CHECK(e.gt_path.size() <= 41);
    CHECK_FALSE(e.instruction.empty());
    for (std::size_t i = 1; i < e.gt_path.size(); ++i) {
      const Vec3 d = e.gt_path[i] - e.gt_path[i - 1];
      const bool horizontal = d.z == 0.0 && d.horizontal_norm() == doctest::Approx(cfg.horizontal_step);
      const bool vertical = d.x == 0.0 && d.y == 0.0 && std::abs(d.z) == cfg.vertical_step;
      CHECK((horizontal || vertical));
      CHECK_FALSE(segment_blocked(city(), e.gt_path[i - 1], e.gt_path[i]));
    }
  }
  DatasetParams p;
  p.episodes = 20;
  p.seed = 5;
  const auto again = generate_dataset(city(), p, cfg);
  REQUIRE(again.size() == episodes().size());
  for (std::size_t i = 0; i < again.size(); ++i) CHECK(again[i].gt_path == episodes()[i].gt_path);
}

TEST_CASE("episode files round-trip and an empty dataset still has a header") {
  const auto path = temp_path("episodes.jsonl");
  save_episodes(episodes(), path);
  const auto back = load_episodes(path);
  REQUIRE(back.size() == episodes().size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].episode_id == episodes()[i].episode_id);
    CHECK(back[i].start_pose == episodes()[i].start_pose);
    CHECK(back[i].instruction == episodes()[i].instruction);
    CHECK(back[i].gt_path == episodes()[i].gt_path);
  }

  DatasetParams none;
  none.episodes = 0;
  const auto empty_path = temp_path("none.jsonl");
  save_episodes(generate_dataset(city(), none, StepConfig{}), empty_path);
  std::ifstream in(empty_path);
  std::string header, rest;
  std::getline(in, header);
  CHECK(nlohmann::json::parse(header).at("count") == 0);
  CHECK_FALSE(std::getline(in, rest));
  CHECK(load_episodes(empty_path).empty());
}

TEST_CASE("a budget of one runs exactly one decision") {
  RunConfig cfg;
  cfg.step.max_steps = 1;
  const Episode& e = episodes().front();
  const auto r = run_episode(city(), e, RandomPolicy(3), cfg, make_gru(cfg, city().feature_dim()));
  CHECK(r.decisions == 1);
  CHECK(r.trajectory.size() >= 2);
  CHECK(r.trajectory.size() <= 2);
  CHECK(r.status == EpisodeStatus::Budget);
}

TEST_CASE("oracle episodes succeed and metrics match an offline rescore") {
  RunConfig cfg;
  const auto suite = run_suite(episodes(), scenes(), OraclePolicy(), cfg);
  CHECK(suite.errors == 0);
  CHECK(suite.aggregate.sr >= 0.9);
  for (const auto& r : suite.episodes) {
    const Episode& e = *std::find_if(episodes().begin(), episodes().end(),
                                     [&](const Episode& x) { return x.episode_id == r.episode_id; });
    CHECK(score_trajectory(executed_path(r.trajectory), e.gt_path, r.status, cfg.step) == r.metrics);
    for (const auto& t : r.trajectory)
      if (t.action) {
        CHECK(*t.action != Action::MoveLeft);
        CHECK(*t.action != Action::MoveRight);
      }
  }

  // Trajectory log round trip.
  const auto path = temp_path("traj.jsonl");
  {
    std::ofstream out(path);
    for (const auto& r : suite.episodes) write_trajectory(out, r);
  }
  const auto logged = read_trajectory_log(path);
  for (const auto& r : suite.episodes) {
    const auto& l = logged.at(r.episode_id);
    CHECK(l.entries == r.trajectory);
    CHECK(l.status == r.status);
    CHECK(l.decisions == r.decisions);
  }
}

TEST_CASE("suites are independent of thread count and repeatable") {
  RunConfig cfg;
  const RandomPolicy random(9);
  const auto one = run_suite(episodes(), scenes(), random, cfg, 1);
  const auto four = run_suite(episodes(), scenes(), random, cfg, 4);
  CHECK(report_text(one) == report_text(four));
  const std::vector<Episode> twice{episodes()[0], episodes()[0]};
  const auto dup = run_suite(twice, scenes(), random, cfg, 2);
  CHECK(report_line(dup.episodes[0]) == report_line(dup.episodes[1]));
}

TEST_CASE("missing scenes become per-episode errors") {
  std::vector<Episode> es{episodes()[0], episodes()[1]};
  es[1].scene_id = "nowhere";
  const auto s = run_suite(es, scenes(), OraclePolicy(), RunConfig{}, 2);
  CHECK(s.errors == 1);
  CHECK(s.episodes[1].status == EpisodeStatus::Error);
  CHECK(s.episodes[0].status != EpisodeStatus::Error);
  CHECK(s.aggregate.episodes == 1);
  const auto line = report_line(s.episodes[1]);
  CHECK(line.at("status") == "error");
  CHECK(line.contains("error"));
}

TEST_CASE("aggregate line formats rates as percentages") {
  const auto s = run_suite(episodes(), scenes(), OraclePolicy(), RunConfig{}, 2);
  const auto agg = aggregate_line(s).at("aggregate");
  CHECK(agg.at("sr") == format_percent(s.aggregate.sr));
  CHECK(agg.at("episodes") == episodes().size());
}

TEST_CASE("with every ablation flag off the loop is the minimal pipeline") {
  RunConfig cfg;
  cfg.ablation = {false, false, false, false};
  const auto gru = make_gru(cfg, city().feature_dim());
  const StepConfig& sc = cfg.step;
  for (const Episode& e : episodes()) {
    const auto r = run_episode(city(), e, OraclePolicy(), cfg, gru);

    // Hand-assembled: four horizontal views, teacher argmax, middle level, go_to.
    std::vector<TrajectoryEntry> traj{{0, 0, std::nullopt, e.start_pose}};
    Pose pose = e.start_pose;
    Path executed{pose.position};
    int used = 0;
    for (int step = 0; used < sc.max_steps; ++step) {
      auto cs = make_candidates(get_skybox(city(), pose), sc, step);
      cs.resize(4);
      const TeacherLabel label = teacher_label(cs, cs.size(), executed, e.gt_path, cfg.lookahead, sc);
      if (!label.candidate) break;
      ControlOutcome o;
      try {
        o = go_to(city(), pose, cs[*label.candidate].position, sc, sc.max_steps - used);
      } catch (const StuckError& err) {
        o = err.partial();
      }
      for (std::size_t i = 0; i < o.actions.size(); ++i) {
        traj.push_back({++used, step, o.actions[i], o.poses[i]});
        if (o.poses[i].position != executed.back()) executed.push_back(o.poses[i].position);
      }
      pose = o.final_pose;
    }
    CHECK(r.trajectory == traj);
  }
}

TEST_CASE("teacher export and score lines replay the same run") {
  RunConfig cfg;
  cfg.record_teacher = true;
  const std::vector<Episode> few(episodes().begin(), episodes().begin() + 5);
  const auto base = run_suite(few, scenes(), OraclePolicy(), cfg);

  const auto teacher = temp_path("teacher.jsonl");
  const auto scores = temp_path("scores.jsonl");
  {
    std::ofstream t(teacher), s(scores);
    for (const auto& r : base.episodes) {
      write_teacher_tuples(t, r);
      write_score_lines(s, r);
    }
  }
  std::ifstream in(teacher);
  std::string line;
  std::getline(in, line);
  const auto first = nlohmann::json::parse(line);
  CHECK(first.at("schema") == kTeacherSchema);
  CHECK(first.contains("c_gt"));
  CHECK(first.at("candidates").size() == first.at("d_v_gt").size());

  RunConfig plain;
  for (const auto& file : {teacher, scores}) {
    const auto replayed = run_suite(few, scenes(), ReplayPolicy::load(file), plain);
    for (std::size_t i = 0; i < few.size(); ++i)
      CHECK(replayed.episodes[i].trajectory == base.episodes[i].trajectory);
  }
}

TEST_CASE("BEV snapshots round-trip") {
  RunConfig cfg;
  cfg.record_bev = true;
  const auto r = run_episode(city(), episodes()[0], OraclePolicy(), cfg,
                             make_gru(cfg, city().feature_dim()));
  REQUIRE(r.bev.has_value());
  CHECK_FALSE(r.bev->cells.empty());
  const auto back = bev_snapshot_from_json(bev_snapshot_json(r.episode_id, *r.bev));
  CHECK(back.cells == r.bev->cells);
  CHECK(back.origin == r.bev->origin);
  for (const auto& [cell, h] : r.bev->cells)
    for (double v : h) {
      CHECK(v > -1.0);
      CHECK(v < 1.0);
    }
}

TEST_CASE("configuration and lookups reject bad input") {
  RunConfig cfg;
  cfg.local_map_size = 4;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  CHECK_THROWS_AS(make_policy("telepathy", 0), InvalidArgument);
  CHECK_THROWS_AS(make_policy("replay", 0), InvalidArgument);
  CHECK(make_policy("heuristic", 0)->name() == "heuristic");
  CHECK(episode_status_from_string("budget") == EpisodeStatus::Budget);
  Episode wrong = episodes()[0];
  wrong.scene_id = "elsewhere";
  CHECK_THROWS_AS(run_episode(city(), wrong, OraclePolicy(), RunConfig{},
                              make_gru(RunConfig{}, city().feature_dim())),
                  InvalidArgument);
}
