// Experiment orchestrator: one subcommand per experiment, line-based
// key=value configs with flag overrides, CSV/JSON reports that echo their
// full config so any published table reruns byte-identically.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "driftzero/counting.hpp"
#include "driftzero/dimension.hpp"
#include "driftzero/errors.hpp"
#include "driftzero/percolation.hpp"
#include "driftzero/zeros.hpp"

using namespace dz;
using nlohmann::json;

namespace {

constexpr const char* kSchema = "driftzero-report/1";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Experiment parameters: config file lines key=value, then flag overrides.
struct Config {
  std::string experiment;
  std::map<std::string, std::string> kv;

  bool has(const std::string& k) const { return kv.count(k) != 0; }
  std::string gets(const std::string& k, const std::string& dflt) const {
    auto it = kv.find(k);
    return it == kv.end() ? dflt : it->second;
  }
  double getd(const std::string& k, double dflt) const {
    auto it = kv.find(k);
    if (it == kv.end()) return dflt;
    try {
      std::size_t pos = 0;
      const double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument(k);
      return v;
    } catch (const std::exception&) {
      throw std::invalid_argument("config: bad number for " + k + ": " + it->second);
    }
  }
  long long geti(const std::string& k, long long dflt) const {
    const double v = getd(k, static_cast<double>(dflt));
    return static_cast<long long>(v);
  }
  std::vector<double> list(const std::string& k, std::vector<double> dflt) const {
    auto it = kv.find(k);
    if (it == kv.end()) return dflt;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) out.push_back(std::stod(tok));
    if (out.empty()) throw std::invalid_argument("config: empty list for " + k);
    return out;
  }
};

void load_config_file(const std::string& path, Config& cfg) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const auto key = trim(line.substr(0, eq));
    if (!key.empty()) cfg.kv[key] = trim(line.substr(eq + 1));
  }
}

// Drift catalog: name:params, e.g. cantor:0.15, linear:1,0, constant:0.5,
// cube_root:3, cascade:0.25, fbm:0.25, loud:0.5,2,12.
DriftFunction parse_drift(const std::string& spec, SeedSpec seed) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) args.push_back(std::stod(tok));
  }
  auto arg = [&](std::size_t i, double dflt) { return i < args.size() ? args[i] : dflt; };
  if (name == "cantor") return DriftFunction::cantor(GammaParam(arg(0, 0.25)));
  if (name == "cascade") return DriftFunction::cascade(GammaParam(arg(0, 0.25)));
  if (name == "linear") return DriftFunction::linear(arg(0, 1.0), arg(1, 0.0));
  if (name == "constant") return DriftFunction::constant(arg(0, 0.0));
  if (name == "cube_root") return DriftFunction::cube_root(arg(0, 1.0));
  if (name == "loud")
    return DriftFunction::loud(LoudParams(arg(0, 0.5), static_cast<int>(arg(1, 2)),
                                          static_cast<int>(arg(2, 12))));
  if (name == "fbm") {
    const double hurst = arg(0, 0.25);
    return DriftFunction::fbm_sample(sample_fbm(4097, arg(1, 4.0), hurst, seed), hurst);
  }
  throw std::invalid_argument("config: unknown drift spec " + spec);
}

// Tabular report shared by every experiment.
struct Report {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::map<std::string, std::string> summary;

  void row(std::initializer_list<std::string> cells) { rows.emplace_back(cells); }
};

void write_report(const Report& rep, const Config& cfg, const std::string& out,
                  const std::string& format) {
  std::ostringstream body;
  if (format == "csv") {
    body << "# schema=" << kSchema << "\n# experiment=" << cfg.experiment << "\n";
    for (const auto& [k, v] : cfg.kv) body << "# config." << k << "=" << v << "\n";
    for (const auto& [k, v] : rep.summary) body << "# " << k << "=" << v << "\n";
    for (std::size_t i = 0; i < rep.columns.size(); ++i)
      body << (i ? "," : "") << rep.columns[i];
    body << "\n";
    for (const auto& r : rep.rows) {
      for (std::size_t i = 0; i < r.size(); ++i) body << (i ? "," : "") << r[i];
      body << "\n";
    }
  } else if (format == "json") {
    json j;
    j["schema"] = kSchema;
    j["experiment"] = cfg.experiment;
    j["config"] = cfg.kv;
    j["summary"] = rep.summary;
    j["columns"] = rep.columns;
    j["rows"] = rep.rows;
    body << j.dump(2) << "\n";
  } else {
    throw std::invalid_argument("config: format must be csv or json");
  }
  if (out.empty() || out == "-") {
    std::cout << body.str();
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw std::invalid_argument("config: cannot write " + out);
    f << body.str();
  }
}

// Index-sharded parallel loop; results land in task order so the report is
// identical for every thread count.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& task) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::vector<std::thread> pool;
  const int used = std::min<std::size_t>(threads, count);
  for (int w = 0; w < used; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += used) task(i);
    });
  for (auto& t : pool) t.join();
}

SeedSpec base_seed(const Config& cfg) {
  return {static_cast<std::uint64_t>(cfg.geti("seed", 0)), 0};
}

Report run_hitting(const Config& cfg) {
  const GammaParam gamma(cfg.getd("gamma", 0.25));
  const int n = static_cast<int>(cfg.geti("depth", 8));
  if (n < 1 || n > 12) throw resource_guard_error("hitting: depth outside [1,12]");
  Report rep;
  rep.columns = {"n", "min_prob", "max_prob", "c1_hat", "c1_hat_max"};
  for (int level = 1; level <= n; ++level) {
    double lo = 1.0, hi = 0.0;
    for (const auto& addr : enumerate_intervals(gamma, level)) {
      const double p = interval_hit_prob(gamma, addr);
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
    const double scale = std::ldexp(1.0, level);
    rep.row({std::to_string(level), fmt(lo), fmt(hi), fmt(scale * lo), fmt(scale * hi)});
  }
  return rep;
}

Report run_moments(const Config& cfg) {
  const GammaParam gamma(cfg.getd("gamma", 0.25));
  const int n = static_cast<int>(cfg.geti("depth", 8));
  const auto paths = static_cast<std::uint64_t>(cfg.geti("paths", 100000));
  const auto analytic = analytic_moments(gamma, n, n <= 10);
  const auto mc = mc_counting(gamma, n, paths, base_seed(cfg));
  Report rep;
  rep.columns = {"n", "mean_analytic", "second_analytic", "mean_mc", "second_mc",
                 "prob_positive", "se_mean", "se_prob"};
  rep.row({std::to_string(n), fmt(analytic.mean_analytic),
           analytic.second_moment_analytic ? fmt(*analytic.second_moment_analytic) : "nan",
           fmt(mc.mean_mc), fmt(mc.second_moment_mc), fmt(mc.prob_positive_mc),
           fmt(mc.se_mean), fmt(mc.se_prob)});
  return rep;
}

Report run_regime_scan(const Config& cfg) {
  const auto gammas = cfg.list("gammas", {0.15, 0.25, 0.35});
  const int n_min = static_cast<int>(cfg.geti("n_min", 6));
  const int n_max = static_cast<int>(cfg.geti("n_max", 14));
  const auto paths = static_cast<std::uint64_t>(cfg.geti("paths", 100000));
  Report rep;
  rep.columns = {"gamma", "n", "mean_mc", "prob_positive", "se_mean", "se_prob"};
  std::uint64_t stream = 0;
  for (const double g : gammas)
    for (int n = n_min; n <= n_max; ++n) {
      const auto mc = mc_counting(GammaParam(g), n, paths, base_seed(cfg).stream(stream++));
      rep.row({fmt(g), std::to_string(n), fmt(mc.mean_mc), fmt(mc.prob_positive_mc),
               fmt(mc.se_mean), fmt(mc.se_prob)});
    }
  return rep;
}

Report run_zeros(const Config& cfg) {
  const auto seed = base_seed(cfg);
  const auto drift = parse_drift(cfg.gets("drift", "cantor:" + fmt(cfg.getd("gamma", 0.25))),
                                 seed.stream(~std::uint64_t{0}));
  const int depth = static_cast<int>(cfg.geti("depth", 14));
  const auto z = detect_zeros(drift, cfg.getd("lo", 1.0), cfg.getd("hi", 2.0), depth, seed,
                              static_cast<std::uint64_t>(cfg.geti("refine", 1 << 20)));
  Report rep;
  rep.columns = {"t_lo", "t_hi", "status"};
  for (const auto& c : z.crossings)
    rep.row({fmt(c.t_lo), fmt(c.t_hi),
             c.status == CrossingStatus::confirmed_crossing ? "confirmed" : "possible"});
  rep.summary["confirmed"] = std::to_string(z.confirmed_count());
  rep.summary["possible"] = std::to_string(z.possible_count());
  rep.summary["resolution"] = fmt(z.resolution);
  return rep;
}

Report run_isolated(const Config& cfg, int threads) {
  const GammaParam gamma(cfg.getd("gamma", 0.15));
  const auto drift = DriftFunction::cantor(gamma);
  const int depth = static_cast<int>(cfg.geti("depth", 18));
  const double delta = cfg.getd("delta", std::ldexp(1.0, -8));
  const auto paths = static_cast<std::size_t>(cfg.geti("paths", 1000));
  const auto refine = static_cast<std::uint64_t>(cfg.geti("refine", 1 << 26));
  const bool annotate = cfg.geti("annotate", 1) != 0;
  std::optional<ExclusionParams> excl;
  if (cfg.has("n0"))
    excl = ExclusionParams{cfg.getd("gamma1", 0.2), static_cast<int>(cfg.geti("n0", 4)),
                           static_cast<int>(cfg.geti("digit_budget", 64))};
  const auto grid = make_drift_grid(drift, cfg.getd("lo", 1.0), cfg.getd("hi", 2.0), depth);
  const auto seed = base_seed(cfg);

  std::vector<IsolationReport> reports(paths);
  parallel_for(paths, threads, [&](std::size_t p) {
    const auto z = detect_zeros(drift, grid, seed.stream(p), refine);
    reports[p] = isolated_candidates(z, delta, annotate ? std::optional(gamma) : std::nullopt,
                                     excl);
  });

  Report rep;
  rep.columns = {"path", "location", "t_lo", "t_hi", "gap_left", "gap_right", "in_cantor",
                 "f_value_excluded"};
  std::size_t with_candidate = 0;
  for (std::size_t p = 0; p < paths; ++p) {
    with_candidate += !reports[p].candidates.empty();
    for (const auto& c : reports[p].candidates) {
      const char* excl_str = c.f_value_excluded == Membership::member ? "member"
                             : c.f_value_excluded == Membership::non_member ? "non_member"
                                                                            : "undecided";
      rep.row({std::to_string(p), fmt(c.location), fmt(c.t_lo), fmt(c.t_hi), fmt(c.gap_left),
               fmt(c.gap_right), c.in_cantor ? "1" : "0", excl_str});
    }
  }
  rep.summary["paths_with_candidate"] = std::to_string(with_candidate);
  rep.summary["frequency"] = fmt(static_cast<double>(with_candidate) / paths);
  rep.summary["cantor_level"] = std::to_string(reports.empty() ? 0 : reports[0].cantor_level);
  return rep;
}

Report run_singleton(const Config& cfg) {
  const SingletonDriftParams params(cfg.getd("c", 3.0), cfg.getd("ramp", 0.05),
                                    cfg.getd("q1", 1.2), cfg.getd("q2", 1.8),
                                    GammaParam(cfg.getd("gamma", 0.15)),
                                    cfg.getd("epsilon", 0.5));
  const auto report = singleton_experiment(params, cfg.getd("horizon", 100.0),
                                           static_cast<std::uint64_t>(cfg.geti("paths", 100000)),
                                           base_seed(cfg));
  Report rep;
  rep.columns = {"prob_no_zero_linear_tail", "se_linear_tail", "prob_single_crossing_cluster",
                 "se_cluster", "expected_linear_tail"};
  rep.row({fmt(report.prob_no_zero_linear_tail), fmt(report.se_linear_tail),
           fmt(report.prob_single_crossing_cluster), fmt(report.se_cluster),
           fmt(1.0 - std::exp(-2.0 * cfg.getd("epsilon", 0.5)))});
  return rep;
}

Report run_record_times(const Config& cfg) {
  const auto seed = base_seed(cfg);
  const auto drift = parse_drift(cfg.gets("drift", "cantor:" + fmt(cfg.getd("gamma", 0.25))),
                                 seed.stream(~std::uint64_t{0}));
  const int depth = static_cast<int>(cfg.geti("depth", 12));
  const double lo = cfg.getd("lo", 0.0), hi = cfg.getd("hi", 2.0);
  const double delta = cfg.getd("delta", std::ldexp(1.0, -6));
  const auto paths = static_cast<std::size_t>(cfg.geti("paths", 100));
  const std::size_t n = std::size_t{1} << depth;
  std::vector<double> grid(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
  Report rep;
  rep.columns = {"path", "records", "isolated_records"};
  for (std::size_t p = 0; p < paths; ++p) {
    const auto path = sample_bm(grid, seed.stream(p));
    const auto rec = record_times(path, drift, delta);
    rep.row({std::to_string(p), std::to_string(rec.record_times.size()),
             std::to_string(rec.isolated_count)});
  }
  return rep;
}

Report run_dimension(const Config& cfg, int threads) {
  const auto seed = base_seed(cfg);
  const int k_min = static_cast<int>(cfg.geti("k_min", 3));
  const int k_max = static_cast<int>(cfg.geti("k_max", 12));
  Report rep;
  if (cfg.gets("target", "zeros") == "cantor") {
    const GammaParam gamma(cfg.getd("gamma", 0.25));
    const int level = static_cast<int>(cfg.geti("level", 12));
    const auto table = box_count(cantor_intervals(gamma, level), k_min, k_max);
    rep.columns = {"k", "count"};
    for (std::size_t i = 0; i < table.ks.size(); ++i)
      rep.row({std::to_string(table.ks[i]), std::to_string(table.counts[i])});
    rep.summary["slope"] = fmt(table.slope);
    rep.summary["slope_se"] = fmt(table.slope_se);
    return rep;
  }
  const auto drift = parse_drift(cfg.gets("drift", "cantor:" + fmt(cfg.getd("gamma", 0.25))),
                                 seed.stream(~std::uint64_t{0}));
  const int depth = static_cast<int>(cfg.geti("depth", 16));
  const auto paths = static_cast<std::size_t>(cfg.geti("paths", 100));
  const auto refine = static_cast<std::uint64_t>(cfg.geti("refine", 1 << 22));
  const auto grid = make_drift_grid(drift, cfg.getd("lo", 1.0), cfg.getd("hi", 2.0), depth);
  std::vector<BoxCountTable> tables(paths);
  parallel_for(paths, threads, [&](std::size_t p) {
    tables[p] = box_count(detect_zeros(drift, grid, seed.stream(p), refine), k_min, k_max);
  });
  rep.columns = {"path", "slope", "slope_se"};
  double sum = 0.0;
  std::size_t defined = 0;
  for (std::size_t p = 0; p < paths; ++p) {
    if (!tables[p].slope_defined) continue;
    ++defined;
    sum += tables[p].slope;
    rep.row({std::to_string(p), fmt(tables[p].slope), fmt(tables[p].slope_se)});
  }
  rep.summary["mean_slope"] = fmt(defined ? sum / static_cast<double>(defined) : 0.0);
  rep.summary["paths_with_slope"] = std::to_string(defined);
  return rep;
}

Report run_percolation(const Config& cfg) {
  const int depth = static_cast<int>(cfg.geti("depth", 12));
  const auto paths = static_cast<std::size_t>(cfg.geti("paths", 10000));
  RetentionSchedule schedule = cfg.has("p")
                                   ? RetentionSchedule::constant_p(cfg.getd("p", 0.7), depth)
                               : cfg.has("beta")
                                   ? RetentionSchedule::constant_beta(cfg.getd("beta", 0.3), depth)
                                   : RetentionSchedule::reference(depth);
  const auto seed = base_seed(cfg);
  std::size_t survived = 0;
  for (std::size_t p = 0; p < paths; ++p)
    survived += sample_percolation(schedule, depth, 1.0, 2.0, seed.stream(p)).survives();
  const double freq = static_cast<double>(survived) / static_cast<double>(paths);
  Report rep;
  rep.columns = {"depth", "survival_freq", "se", "gw_survival_last_p"};
  rep.row({std::to_string(depth), fmt(freq),
           fmt(std::sqrt(freq * (1.0 - freq) / static_cast<double>(paths))),
           fmt(gw_survival(schedule.p(depth)))});
  rep.summary["clamped"] = schedule.clamped ? "1" : "0";
  return rep;
}

Report run_hawkes_joint(const Config& cfg) {
  const auto seed = base_seed(cfg);
  const auto drift = parse_drift(cfg.gets("drift", "cantor:" + fmt(cfg.getd("gamma", 0.25))),
                                 seed.stream(~std::uint64_t{0}));
  const int m_min = static_cast<int>(cfg.geti("m_min", 6));
  const int m_max = static_cast<int>(cfg.geti("m_max", 14));
  const auto paths = static_cast<std::uint64_t>(cfg.geti("paths", 10000));
  const auto schedule = RetentionSchedule::reference(m_max);
  Report rep;
  rep.columns = {"m", "epsilon", "mean_y", "se_y", "second_y", "prob_v_positive", "se_p"};
  for (int m = m_min; m <= m_max; ++m) {
    const auto r = joint_hawkes_experiment(drift, schedule, m, paths,
                                           seed.stream(static_cast<std::uint64_t>(m)),
                                           cfg.getd("epsilon", -1.0));
    rep.row({std::to_string(m), fmt(r.epsilon), fmt(r.mean_y), fmt(r.se_y), fmt(r.second_y),
             fmt(r.prob_v_positive), fmt(r.se_p)});
  }
  return rep;
}

Report run_defect(const Config& cfg) {
  const auto seed = base_seed(cfg);
  const auto drift = parse_drift(cfg.gets("drift", "loud:0.5,2,12"), seed.stream(~std::uint64_t{0}));
  const double alpha = cfg.getd("alpha", 0.5);
  const int n = static_cast<int>(cfg.geti("n", 2));
  const int grid_depth = static_cast<int>(cfg.geti("depth", 14));
  const auto intervals = defect_set(drift, alpha, n, grid_depth, cfg.getd("lo", 0.0),
                                    cfg.getd("hi", 1.0));
  Report rep;
  rep.columns = {"lo", "hi"};
  double measure = 0.0;
  for (const auto& iv : intervals) {
    measure += iv.hi - iv.lo;
    rep.row({fmt(iv.lo), fmt(iv.hi)});
  }
  const auto table = box_count(intervals, 2, std::min(grid_depth - 1, 20));
  rep.summary["interval_count"] = std::to_string(intervals.size());
  rep.summary["measure"] = fmt(measure);
  rep.summary["box_slope"] = fmt(table.slope);
  return rep;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"driftzero: zero sets of Brownian motion with variable drift"};
  app.require_subcommand(1);

  const std::vector<std::string> experiments = {
      "hitting",   "moments",      "regime-scan", "zeros",      "isolated", "singleton",
      "record-times", "dimension", "percolation", "hawkes-joint", "defect"};

  std::string config_path, out, format = "csv";
  std::vector<std::string> overrides;
  double gamma = -1.0;
  long long depth = -1, paths = -1, seed = -1;
  int threads = 1;
  for (const auto& name : experiments) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key=value config file");
    sub->add_option("--set", overrides, "extra key=value overrides");
    sub->add_option("--gamma", gamma, "Cantor ratio parameter");
    sub->add_option("--depth", depth, "dyadic depth / level");
    sub->add_option("--paths", paths, "Monte Carlo path count");
    sub->add_option("--seed", seed, "master seed (default env DRIFTZERO_SEED or 0)");
    sub->add_option("--threads", threads, "worker threads (never changes results)");
    sub->add_option("--out", out, "output file, - for stdout");
    sub->add_option("--format", format, "csv or json");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Config cfg;
  cfg.experiment = app.get_subcommands()[0]->get_name();
  try {
    if (const char* env = std::getenv("DRIFTZERO_SEED")) cfg.kv["seed"] = env;
    if (!config_path.empty()) load_config_file(config_path, cfg);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("config: bad --set " + kv);
      cfg.kv[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    if (gamma >= 0.0) cfg.kv["gamma"] = fmt(gamma);
    if (depth >= 0) cfg.kv["depth"] = std::to_string(depth);
    if (paths >= 0) cfg.kv["paths"] = std::to_string(paths);
    if (seed >= 0) cfg.kv["seed"] = std::to_string(seed);
    if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");

    Report rep;
    if (cfg.experiment == "hitting") rep = run_hitting(cfg);
    else if (cfg.experiment == "moments") rep = run_moments(cfg);
    else if (cfg.experiment == "regime-scan") rep = run_regime_scan(cfg);
    else if (cfg.experiment == "zeros") rep = run_zeros(cfg);
    else if (cfg.experiment == "isolated") rep = run_isolated(cfg, threads);
    else if (cfg.experiment == "singleton") rep = run_singleton(cfg);
    else if (cfg.experiment == "record-times") rep = run_record_times(cfg);
    else if (cfg.experiment == "dimension") rep = run_dimension(cfg, threads);
    else if (cfg.experiment == "percolation") rep = run_percolation(cfg);
    else if (cfg.experiment == "hawkes-joint") rep = run_hawkes_joint(cfg);
    else rep = run_defect(cfg);
    write_report(rep, cfg, out, format);
  } catch (const resource_guard_error& e) {
    std::cerr << "resource guard: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
