#include "avln/records.hpp"

#include <fstream>
#include <ostream>

namespace avln {

using json = nlohmann::json;

json vec_to_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json pose_to_json(const Pose& p) {
  return {{"position", vec_to_json(p.position)}, {"heading", p.heading.degrees()}};
}

Pose pose_from_json(const json& j) {
  return {vec_from_json(j.at("position")), Heading(j.at("heading").get<double>())};
}

json report_line(const EpisodeResult& r) {
  json j = {{"episode_id", r.episode_id}, {"scene_id", r.scene_id},
            {"status", to_string(r.status)}};
  if (r.status == EpisodeStatus::Error) {
    j["error"] = r.error;
    return j;
  }
  j["ne"] = r.metrics.ne;
  j["success"] = r.metrics.success;
  j["osr"] = r.metrics.oracle_success;
  j["ndtw"] = r.metrics.ndtw;
  j["sdtw"] = r.metrics.sdtw;
  j["decisions"] = r.decisions;
  j["actions"] = r.trajectory.empty() ? 0 : r.trajectory.back().step;
  return j;
}

json aggregate_line(const SuiteResult& s) {
  const AggregateMetrics& a = s.aggregate;
  return {{"aggregate",
           {{"episodes", a.episodes},
            {"errors", s.errors},
            {"ne", a.ne},
            {"sr", format_percent(a.sr)},
            {"osr", format_percent(a.osr)},
            {"ndtw", a.ndtw},
            {"sdtw", a.sdtw}}}};
}

void write_report(std::ostream& out, const SuiteResult& s) {
  for (const EpisodeResult& r : s.episodes) out << report_line(r).dump() << '\n';
  out << aggregate_line(s).dump() << '\n';
}

void write_trajectory(std::ostream& out, const EpisodeResult& r) {
  for (const TrajectoryEntry& t : r.trajectory) {
    out << json{{"episode_id", r.episode_id},
                {"step", t.step},
                {"decision", t.decision},
                {"action", t.action ? std::string(to_string(*t.action)) : "Start"},
                {"pose", pose_to_json(t.pose)}}
               .dump()
        << '\n';
  }
  out << json{{"episode_id", r.episode_id}, {"end", to_string(r.status)}, {"decisions", r.decisions}}
             .dump()
      << '\n';
}

std::map<std::string, LoggedTrajectory> read_trajectory_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read trajectory log: " + path.string());
  std::map<std::string, LoggedTrajectory> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    LoggedTrajectory& t = out[j.at("episode_id").get<std::string>()];
    if (j.contains("end")) {
      t.status = episode_status_from_string(j.at("end").get<std::string>());
      t.decisions = j.value("decisions", 0);
      continue;
    }
    TrajectoryEntry e;
    e.step = j.at("step").get<int>();
    e.decision = j.value("decision", 0);
    const std::string action = j.at("action").get<std::string>();
    if (action != "Start") e.action = action_from_string(action);
    e.pose = pose_from_json(j.at("pose"));
    t.entries.push_back(e);
  }
  return out;
}

namespace {

json feature_ref(const std::string& scene_id, const Candidate& c) {
  return {{"scene_id", scene_id}, {"pose", pose_to_json(c.origin)}, {"view", to_string(c.view())}};
}

json candidate_json(const std::string& scene_id, const Candidate& c) {
  return {{"view", to_string(c.view())},
          {"provenance", c.provenance == Provenance::Live ? "live" : "pool"},
          {"observed_step", c.observed_step},
          {"position", vec_to_json(c.position)},
          {"vertical", {vec_to_json(c.vertical[0]), vec_to_json(c.vertical[1]),
                        vec_to_json(c.vertical[2])}},
          {"feature_ref", feature_ref(scene_id, c)}};
}

}  // namespace

void write_teacher_tuples(std::ostream& out, const EpisodeResult& r) {
  for (const StepRecord& s : r.steps) {
    if (!s.teacher) throw Error("step " + std::to_string(s.step) + " has no teacher label");
    json cands = json::array();
    for (const Candidate& c : s.candidates) cands.push_back(candidate_json(r.scene_id, c));
    json dv = json::array();
    for (VerticalLevel v : s.teacher->vertical) dv.push_back(encode_vertical(v));
    json c_gt = s.teacher->candidate ? json(*s.teacher->candidate) : json("stop");
    out << json{{"schema", kTeacherSchema},
                {"episode_id", r.episode_id},
                {"step", s.step},
                {"pose", pose_to_json(s.pose)},
                {"live_count", s.live_count},
                {"candidates", cands},
                {"c_gt", c_gt},
                {"d_v_gt", dv},
                {"scores", s.teacher->scores}}
               .dump()
        << '\n';
  }
}

void write_score_lines(std::ostream& out, const EpisodeResult& r) {
  for (const StepRecord& s : r.steps) {
    out << json{{"schema", kScoresSchema},
                {"episode_id", r.episode_id},
                {"step", s.step},
                {"scores", s.decision.scores},
                {"d_v", s.decision.vertical_offsets}}
               .dump()
        << '\n';
  }
}

void write_step_log(std::ostream& out, const EpisodeResult& r) {
  for (const StepRecord& s : r.steps) {
    json cands = json::array();
    for (const Candidate& c : s.candidates) cands.push_back(vec_to_json(c.position));
    json pool = json::array();
    for (const PoolEntry& e : s.pool)
      pool.push_back({{"position", vec_to_json(e.candidate.position)},
                      {"score", e.score},
                      {"step", e.step}});
    json j = {{"episode_id", r.episode_id},
              {"step", s.step},
              {"pose", pose_to_json(s.pose)},
              {"candidates", cands},
              {"live_count", s.live_count},
              {"scores", s.decision.scores},
              {"d_v", s.decision.vertical_offsets},
              {"selected", s.decision.selected ? json(*s.decision.selected) : json("stop")},
              {"actions", s.actions},
              {"pool", pool}};
    if (s.target) j["target"] = vec_to_json(*s.target);
    out << j.dump() << '\n';
  }
}

json bev_snapshot_json(const std::string& episode_id, const BevSnapshot& s) {
  json cells = json::array();
  for (const auto& [cell, h] : s.cells) cells.push_back({{"u", cell.u}, {"v", cell.v}, {"h", h}});
  return {{"episode_id", episode_id},
          {"origin", vec_to_json(s.origin)},
          {"cell_size", s.cell_size},
          {"hidden_dim", s.hidden_dim},
          {"cells", cells}};
}

BevSnapshot bev_snapshot_from_json(const json& j) {
  BevSnapshot s;
  s.origin = vec_from_json(j.at("origin"));
  s.cell_size = j.at("cell_size").get<double>();
  s.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  for (const json& c : j.at("cells"))
    s.cells[GridCell{c.at("u").get<std::int64_t>(), c.at("v").get<std::int64_t>()}] =
        c.at("h").get<std::vector<double>>();
  return s;
}

}  // namespace avln
