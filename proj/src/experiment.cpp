#include "coloc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace coloc {

namespace {

std::string fmt(double v, int decimals = 10) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string fmt(const std::optional<double>& v, int decimals = 10) {
  return v ? fmt(*v, decimals) : std::string("nan");
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << content;
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

std::string tick_tag(std::size_t tick) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "t%06zu", tick);
  return buf;
}

}  // namespace

SnapshotOptions parse_tick_range(const std::string& text, std::filesystem::path dir) {
  SnapshotOptions opt;
  opt.dir = std::move(dir);
  const auto colon = text.find(':');
  try {
    std::size_t used = 0;
    if (colon == std::string::npos) {
      opt.first_tick = opt.last_tick = std::stoul(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
    } else {
      const std::string a = text.substr(0, colon);
      const std::string b = text.substr(colon + 1);
      opt.first_tick = std::stoul(a, &used);
      if (used != a.size()) throw std::invalid_argument(text);
      opt.last_tick = std::stoul(b, &used);
      if (used != b.size()) throw std::invalid_argument(text);
    }
  } catch (const std::logic_error&) {
    throw ScenarioError("--snapshots: expected <first>:<last> tick range, got '" + text + "'");
  }
  if (opt.last_tick < opt.first_tick) {
    throw ScenarioError("--snapshots: last tick precedes first tick");
  }
  return opt;
}

std::string run_file_name(std::uint64_t seed, Mode mode) {
  return "run_" + std::to_string(seed) + "_" + to_string(mode) + ".csv";
}

std::string particles_csv(const ParticleCloud& cloud) {
  std::string out = "agent_id,x,y,theta\n";
  for (const Pose2D& p : cloud.particles) {
    out += std::to_string(cloud.agent_id) + "," + fmt(p.x()) + "," + fmt(p.y()) + "," +
           fmt(p.theta()) + "\n";
  }
  return out;
}

RunRecord run_scenario(const Scenario& scenario, std::shared_ptr<const OccupancyGrid> map,
                       Mode mode, std::uint64_t seed,
                       const std::optional<SnapshotOptions>& snapshots) {
  RunRecord rec;
  rec.seed = seed;
  rec.mode = mode;
  rec.run_id = "s" + std::to_string(seed) + "_" + to_string(mode);

  Swarm swarm(scenario, std::move(map), mode, seed);
  const std::size_t ticks = scenario.tick_count();

  auto record = [&](double t, const std::vector<bool>& flags) {
    for (std::size_t i = 0; i < swarm.size(); ++i) {
      RunRow row;
      row.t = t;
      row.agent_id = swarm.agent(i).id();
      row.estimate = swarm.agent(i).estimate();
      row.truth = swarm.world().truth(i);
      row.position_error = std::hypot(row.estimate.x() - row.truth.x(),
                                      row.estimate.y() - row.truth.y());
      row.encounter = flags[i];
      rec.rows.push_back(row);
    }
  };
  auto snapshot_prefix = [&](std::size_t i, std::size_t tick) {
    return snapshots->dir / (std::string(to_string(mode)) + "_s" + std::to_string(seed) + "_a" +
                             std::to_string(swarm.agent(i).id()) + "_" + tick_tag(tick));
  };
  auto in_range = [&](std::size_t tick) {
    return snapshots && tick >= snapshots->first_tick && tick <= snapshots->last_tick;
  };

  if (snapshots) std::filesystem::create_directories(snapshots->dir);
  record(0.0, std::vector<bool>(swarm.size(), false));
  if (in_range(0)) {
    for (std::size_t i = 0; i < swarm.size(); ++i) {
      write_file(snapshot_prefix(i, 0).string() + ".csv", particles_csv(swarm.agent(i).cloud()));
    }
  }

  for (std::size_t k = 1; k <= ticks; ++k) {
    const bool snap = in_range(k);
    const TickReport report = swarm.tick(snap);
    record(report.time, report.in_encounter);
    if (!snap) continue;
    for (std::size_t i = 0; i < swarm.size(); ++i) {
      const std::string prefix = snapshot_prefix(i, k).string();
      const ParticleCloud& now = swarm.agent(i).cloud();
      if (report.in_encounter[i]) {
        write_file(prefix + "_pre.csv", particles_csv(report.pre_exchange[i]));
        write_file(prefix + "_post.csv", particles_csv(now));
      } else {
        write_file(prefix + ".csv", particles_csv(now));
      }
    }
  }
  return rec;
}

RunRecord run_scenario(const std::filesystem::path& scenario_path, Mode mode,
                       std::uint64_t seed, const std::optional<SnapshotOptions>& snapshots) {
  const Scenario sc = load_scenario(scenario_path);
  auto map = std::make_shared<const OccupancyGrid>(load_map(sc.map_image, sc.map_meta));
  return run_scenario(sc, std::move(map), mode, seed, snapshots);
}

std::string run_csv(const RunRecord& record) {
  std::string out =
      "t,agent_id,est_x,est_y,est_theta,truth_x,truth_y,truth_theta,position_error,"
      "encounter_flag\n";
  for (const RunRow& r : record.rows) {
    out += fmt(r.t, 6) + "," + std::to_string(r.agent_id) + "," + fmt(r.estimate.x()) + "," +
           fmt(r.estimate.y()) + "," + fmt(r.estimate.theta()) + "," + fmt(r.truth.x()) + "," +
           fmt(r.truth.y()) + "," + fmt(r.truth.theta()) + "," + fmt(r.position_error) + "," +
           (r.encounter ? "1" : "0") + "\n";
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

RunSummary summarize(const RunRecord& record, AgentId evaluated, double duration,
                     double threshold) {
  RunSummary s;
  s.run_id = record.run_id;
  s.seed = record.seed;
  s.mode = record.mode;

  std::vector<const RunRow*> rows;
  for (const auto& r : record.rows) {
    if (r.agent_id == evaluated) rows.push_back(&r);
  }
  if (rows.empty()) {
    s.ok = false;
    s.failure = "no rows for evaluated agent";
    return s;
  }

  for (const RunRow* r : rows) {
    if (r->encounter) {
      s.first_encounter_time = r->t;
      break;
    }
  }
  if (s.first_encounter_time) {
    double worst = 0.0;
    for (const RunRow* r : rows) {
      if (r->t >= *s.first_encounter_time) worst = std::max(worst, r->position_error);
    }
    s.post_encounter_max_error = worst;
  }

  // Walk backwards while the error stays under the bound.
  std::optional<double> converged;
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    if (!((*it)->position_error < threshold)) break;
    converged = (*it)->t;
  }
  s.convergence_time = converged;

  std::vector<double> late;
  for (const RunRow* r : rows) {
    if (r->t >= 0.5 * duration) late.push_back(r->position_error);
  }
  if (!late.empty()) s.post_midpoint_median_error = median(late);
  return s;
}

BatchResult batch(const std::filesystem::path& scenario_path, std::size_t n_runs,
                  std::uint64_t base_seed, const std::filesystem::path& out_dir,
                  unsigned threads) {
  if (n_runs < 1) throw ScenarioError("--runs: must be >= 1");
  const Scenario sc = load_scenario(scenario_path);
  auto map = std::make_shared<const OccupancyGrid>(load_map(sc.map_image, sc.map_meta));
  std::filesystem::create_directories(out_dir);

  struct Job {
    std::uint64_t seed;
    Mode mode;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < n_runs; ++i) {
    jobs.push_back({base_seed + i, Mode::kCooperative});
    jobs.push_back({base_seed + i, Mode::kStandalone});
  }

  BatchResult result;
  result.runs.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const Job& job = jobs[j];
      RunSummary& s = result.runs[j];
      try {
        const RunRecord rec = run_scenario(sc, map, job.mode, job.seed);
        write_file(out_dir / run_file_name(job.seed, job.mode), run_csv(rec));
        s = summarize(rec, sc.evaluated_agent, sc.duration);
      } catch (const std::exception& e) {
        s = RunSummary{};
        s.run_id = "s" + std::to_string(job.seed) + "_" + to_string(job.mode);
        s.seed = job.seed;
        s.mode = job.mode;
        s.ok = false;
        s.failure = e.what();
      }
    }
  };
  unsigned n_threads = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, jobs.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  auto mode_median = [&](Mode m, auto field) -> std::optional<double> {
    std::vector<double> v;
    for (const auto& s : result.runs) {
      const std::optional<double> value = field(s);
      if (s.ok && s.mode == m && value) v.push_back(*value);
    }
    if (v.empty()) return std::nullopt;
    return median(v);
  };
  auto post_mid = [](const RunSummary& s) { return s.post_midpoint_median_error; };
  auto conv = [](const RunSummary& s) { return s.convergence_time; };
  result.coop_median_post_midpoint_error = mode_median(Mode::kCooperative, post_mid);
  result.standalone_median_post_midpoint_error = mode_median(Mode::kStandalone, post_mid);
  result.coop_median_convergence_time = mode_median(Mode::kCooperative, conv);
  result.standalone_median_convergence_time = mode_median(Mode::kStandalone, conv);

  write_file(out_dir / "summary.csv", summary_csv(result));
  return result;
}

std::string summary_csv(const BatchResult& result) {
  std::string out =
      "run_id,seed,mode,status,first_encounter_time,post_encounter_max_error,"
      "convergence_time,post_midpoint_median_error\n";
  for (const auto& s : result.runs) {
    std::string status = s.ok ? "ok" : "failed";
    if (!s.ok && !s.failure.empty()) {
      std::string reason = s.failure;
      std::replace(reason.begin(), reason.end(), ',', ';');
      std::replace(reason.begin(), reason.end(), '\n', ' ');
      status += ": " + reason;
    }
    out += s.run_id + "," + std::to_string(s.seed) + "," + to_string(s.mode) + "," + status +
           "," + fmt(s.first_encounter_time, 6) + "," + fmt(s.post_encounter_max_error, 6) +
           "," + fmt(s.convergence_time, 6) + "," + fmt(s.post_midpoint_median_error, 6) + "\n";
  }
  out += "median,,coop,,,," + fmt(result.coop_median_convergence_time, 6) + "," +
         fmt(result.coop_median_post_midpoint_error, 6) + "\n";
  out += "median,,standalone,,,," + fmt(result.standalone_median_convergence_time, 6) + "," +
         fmt(result.standalone_median_post_midpoint_error, 6) + "\n";
  return out;
}

}  // namespace coloc
