#include "avln/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "avln/rng.hpp"
#include "avln/simd.hpp"

namespace avln {

Decision make_decision(std::vector<double> scores, std::vector<double> vertical_offsets) {
  if (scores.empty()) throw InvalidArgument("decision needs at least the Stop slot");
  Decision d;
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;
  for (double& v : vertical_offsets) v = std::clamp(v, 0.0, 1.0);
  d.scores = std::move(scores);
  d.vertical_offsets = std::move(vertical_offsets);
  if (best != d.stop_slot()) d.selected = best;
  return d;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  const double na = std::sqrt(simd::dot(a, a));
  const double nb = std::sqrt(simd::dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return simd::dot(a, b) / (na * nb);
}

std::vector<double> oracle_scores(std::span<const double> teacher_scores,
                                  std::optional<std::size_t> teacher_choice) {
  std::vector<double> scores(teacher_scores.begin(), teacher_scores.end());
  if (!teacher_choice) {
    scores.push_back(2.0);
    return scores;
  }
  const std::size_t c = *teacher_choice;
  if (c >= scores.size()) throw InvalidArgument("teacher choice outside the candidate list");
  // Candidates the teacher did not consider can tie or beat its pick; demote them.
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (i != c && scores[i] >= scores[c]) scores[i] = -1.0;
  scores.push_back(-1.0);
  return scores;
}

Decision OraclePolicy::decide(const PolicyContext& ctx) const {
  if (!ctx.teacher) throw InvalidArgument("oracle policy needs teacher labels");
  const TeacherLabel& t = *ctx.teacher;
  if (t.scores.size() != ctx.candidates.size() || t.vertical.size() != ctx.candidates.size())
    throw InvalidArgument("teacher labels do not match the candidates");
  std::vector<double> dv;
  dv.reserve(t.vertical.size());
  for (VerticalLevel level : t.vertical) dv.push_back(encode_vertical(level));
  return make_decision(oracle_scores(t.scores, t.candidate), std::move(dv));
}

Decision RandomPolicy::decide(const PolicyContext& ctx) const {
  Rng rng(hash_combine(hash_combine(seed_, hash_string(ctx.episode_id)),
                       static_cast<std::uint64_t>(ctx.step)));
  const std::size_t n = ctx.candidates.size();
  std::vector<double> scores(n + 1);
  for (double& s : scores) s = rng.uniform();
  // Offsets are drawn over the three encoded levels so every class is equally likely.
  std::vector<double> dv(n);
  for (double& v : dv) v = 0.5 * static_cast<double>(rng.below(3));
  return make_decision(std::move(scores), std::move(dv));
}

std::vector<double> instruction_query(std::span<const std::string> tokens, std::size_t dim,
                                      std::uint64_t seed) {
  std::vector<double> q(dim, 0.0);
  for (const std::string& tok : tokens) {
    Rng rng(hash_combine(seed, hash_string(tok)));
    for (double& v : q) v += (rng.next_u64() & 1U) ? 1.0 : -1.0;
  }
  const double norm = std::sqrt(simd::dot(q, q));
  if (norm > 0.0)
    for (double& v : q) v /= norm;
  return q;
}

namespace {

bool stagnating(std::span<const Vec3> recent, int window, double radius) {
  if (window <= 0 || recent.size() < static_cast<std::size_t>(window)) return false;
  const Vec3 now = recent.back();
  for (std::size_t i = recent.size() - window; i < recent.size(); ++i)
    if (distance(recent[i], now) > radius) return false;
  return true;
}

bool cell_is_unexplored(const PolicyContext& ctx, Vec3 p) {
  if (!ctx.local_map) return true;
  if (!ctx.bev) {
    // Without a map to index into, an all-zero tensor means nothing is known.
    return std::all_of(ctx.local_map->data.begin(), ctx.local_map->data.end(),
                       [](double v) { return v == 0.0; });
  }
  const auto idx = ctx.bev->local_index(ctx.pose, p, ctx.local_map->size);
  if (!idx) return true;
  const auto cell = ctx.local_map->at(idx->first, idx->second);
  return std::all_of(cell.begin(), cell.end(), [](double v) { return v == 0.0; });
}

}  // namespace

std::vector<double> heuristic_score(const PolicyContext& ctx, std::span<const double> query,
                                    const HeuristicWeights& w) {
  const std::size_t n = ctx.candidates.size();
  std::vector<double> scores(n + 1, 0.0);
  const bool has_history = ctx.recent_positions.size() >= 2;
  const Vec3 anchor = has_history ? ctx.recent_positions.front() : ctx.pose.position;
  const double here = distance(ctx.pose.position, anchor);
  for (std::size_t i = 0; i < n; ++i) {
    const Candidate& c = ctx.candidates[i];
    double s = cosine_similarity(c.feature(), query);
    if (has_history)
      s += w.progress * (distance(c.position, anchor) - here) / ctx.step_config.horizontal_step;
    if (cell_is_unexplored(ctx, c.position)) s += w.coverage;
    scores[i] = s;
  }
  const double above_all = 1.0 + 2.0 * (w.progress + w.coverage) + 1.0;
  scores[n] = stagnating(ctx.recent_positions, w.stagnation_window,
                         ctx.step_config.horizontal_step / 2.0)
                  ? above_all
                  : -above_all;
  return scores;
}

Decision HeuristicPolicy::decide(const PolicyContext& ctx) const {
  if (ctx.candidates.empty()) throw InvalidArgument("heuristic policy needs candidates");
  const auto query = instruction_query(ctx.instruction, ctx.candidates[0].feature().size(), seed_);
  auto scores = heuristic_score(ctx, query, w_);

  // Vertical offset from how much better the live up view matches than the down view.
  double up = 0.0, down = 0.0;
  bool have_up = false, have_down = false;
  for (std::size_t i = 0; i < ctx.live_count && i < ctx.candidates.size(); ++i) {
    const Candidate& c = ctx.candidates[i];
    if (c.view() == ViewDirection::Up) {
      up = cosine_similarity(c.feature(), query);
      have_up = true;
    } else if (c.view() == ViewDirection::Down) {
      down = cosine_similarity(c.feature(), query);
      have_down = true;
    }
  }
  const double offset = (have_up && have_down) ? 0.5 + w_.vertical_gain * (up - down) : 0.5;
  std::vector<double> dv(ctx.candidates.size(), std::clamp(offset, 0.0, 1.0));
  return make_decision(std::move(scores), std::move(dv));
}

ReplayPolicy ReplayPolicy::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read replay score file: " + path.string());
  std::map<std::pair<std::string, int>, Record> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    if (j.contains("format")) continue;  // header
    Record r;
    r.scores = j.at("scores").get<std::vector<double>>();
    if (j.contains("c_gt")) {
      // Teacher export line: rebuild the oracle's scores from its label.
      const auto& c = j.at("c_gt");
      r.scores = oracle_scores(r.scores, c.is_string() ? std::nullopt
                                                       : std::optional(c.get<std::size_t>()));
    }
    if (j.contains("d_v")) r.vertical_offsets = j.at("d_v").get<std::vector<double>>();
    else if (j.contains("d_v_gt")) r.vertical_offsets = j.at("d_v_gt").get<std::vector<double>>();
    records[{j.at("episode_id").get<std::string>(), j.at("step").get<int>()}] = std::move(r);
  }
  return ReplayPolicy(std::move(records));
}

Decision ReplayPolicy::decide(const PolicyContext& ctx) const {
  const auto it = records_.find({std::string(ctx.episode_id), ctx.step});
  if (it == records_.end())
    throw Error("no replay record for episode " + std::string(ctx.episode_id) + " step " +
                std::to_string(ctx.step));
  const std::size_t n = ctx.candidates.size();
  std::vector<double> scores = it->second.scores;
  if (scores.size() == n) scores.push_back(-std::numeric_limits<double>::infinity());
  if (scores.size() != n + 1)
    throw Error("replay record has " + std::to_string(it->second.scores.size()) +
                " scores for " + std::to_string(n) + " candidates");
  std::vector<double> dv = it->second.vertical_offsets;
  if (dv.empty()) dv.assign(n, 0.5);
  if (dv.size() != n) throw Error("replay record vertical offsets do not match candidates");
  return make_decision(std::move(scores), std::move(dv));
}

}  // namespace avln
