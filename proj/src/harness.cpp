#include "tdcarp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace tdcarp {

void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_lock);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

Instance load_instance(const InstanceSpec& spec) {
  if (!spec.generator) return parse_instance_file(spec.path);
  const GeneratorSpec& g = *spec.generator;
  const ClassicInstance base = g.base_path.empty() ? generate_classic_base(g.synthetic, g.base_seed)
                                                   : parse_classic_dat_file(g.base_path);
  return generate_td_parameters(base, g.type, g.slope_abs, g.policy, g.seed);
}

void validate(const ExperimentConfig& cfg) {
  validate(cfg.params);
  if (cfg.repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
  if (cfg.stop.generations < 0) throw std::invalid_argument("generations must be nonnegative");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

InitMode parse_init(const std::string& v) {
  if (v == "kgis") return InitMode::Kgis;
  if (v == "baseline") return InitMode::Baseline;
  throw std::invalid_argument("init must be kgis or baseline");
}

OperatorMode parse_operators(const std::string& v) {
  if (v == "kg") return OperatorMode::KnowledgeGuided;
  if (v == "traditional") return OperatorMode::Traditional;
  throw std::invalid_argument("operators must be kg or traditional");
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("expected true or false");
}

std::string label_of(const InstanceSpec& spec, const Instance* inst) {
  if (!spec.label.empty()) return spec.label;
  if (inst) return inst->name;
  return spec.path;
}

struct Loaded {
  std::string label;
  std::optional<Instance> inst;
  std::optional<ShortestPathMatrix> sp;
  std::string error;
};

std::vector<Loaded> load_all(const ExperimentConfig& cfg) {
  std::vector<Loaded> out;
  for (const InstanceSpec& spec : cfg.instances) {
    Loaded l;
    try {
      l.inst = load_instance(spec);
      l.sp = all_pairs_shortest_paths(*l.inst);
      l.label = label_of(spec, &*l.inst);
    } catch (const std::exception& e) {
      l.label = label_of(spec, nullptr);
      l.error = e.what();
      l.inst.reset();
    }
    out.push_back(std::move(l));
  }
  return out;
}

RunRecord single_run(const ExperimentConfig& cfg, const Loaded& l, int rep, const StopRule& stop,
                     const MemeticParams& params) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  RunRecord rec;
  rec.instance = l.label;
  rec.repetition = rep;
  rec.seed = cfg.base_seed + static_cast<std::uint64_t>(rep);
  MemeticParams p = params;
  p.seed = rec.seed;
  Rng rng(rec.seed);
  const KgmaResult res = kgma_run(*l.inst, *l.sp, p, rng, stop);
  rec.feasible = res.found_feasible;
  rec.init_best_tc = res.init_best_tc;
  rec.generations = res.generations;
  rec.reached_target = res.reached_target;
  rec.stats = res.stats;
  if (res.found_feasible) {
    rec.stage1_tc = res.best.eval.tc;
    rec.tc = rec.stage1_tc;
    rec.routes = static_cast<int>(res.best.solution.routes.size());
    if (cfg.optimize_departures) {
      DepartureOptions opt = cfg.departure;
      opt.seed = rec.seed;
      rec.tc = stage2(*l.inst, *l.sp, res.best.solution, opt).total;
    }
  }
  rec.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return rec;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "instance") {
        cfg.instances.push_back(InstanceSpec{value, std::nullopt, {}});
      } else if (key == "reps") {
        cfg.repetitions = std::stoi(value);
      } else if (key == "seed") {
        cfg.base_seed = std::stoull(value);
      } else if (key == "generations") {
        cfg.stop.generations = std::stoi(value);
        cfg.params.gnum = cfg.stop.generations;
      } else if (key == "wallclock") {
        cfg.stop.wallclock_seconds = std::stod(value);
      } else if (key == "target") {
        cfg.stop.target_cost = std::stod(value);
      } else if (key == "psize") {
        cfg.params.psize = std::stoi(value);
      } else if (key == "osnum") {
        cfg.params.osnum = std::stoi(value);
      } else if (key == "pls") {
        cfg.params.pls = std::stod(value);
      } else if (key == "lambda") {
        cfg.params.lambda = std::stod(value);
      } else if (key == "pf") {
        cfg.params.pf = std::stod(value);
      } else if (key == "init") {
        cfg.params.init = parse_init(value);
      } else if (key == "operators") {
        cfg.params.operators = parse_operators(value);
      } else if (key == "stage2") {
        cfg.optimize_departures = parse_bool(value);
      } else if (key == "workers") {
        cfg.workers = std::stoi(value);
      } else if (key == "out") {
        cfg.output_dir = value;
      } else if (key.rfind("reference.", 0) == 0) {
        cfg.references[key.substr(10)] = std::stod(value);
      } else {
        throw ParseError(line_no, "unknown key '" + key + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(line_no, "bad value for '" + key + "': " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  return parse_config(in);
}

std::vector<InstanceRow> aggregate(const std::vector<RunRecord>& runs,
                                   const std::map<std::string, double>& references) {
  std::vector<InstanceRow> rows;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<double>> costs;
  std::vector<std::vector<double>> times;
  for (const RunRecord& r : runs) {
    auto [it, inserted] = index.try_emplace(r.instance, rows.size());
    if (inserted) {
      rows.push_back(InstanceRow{});
      rows.back().instance = r.instance;
      costs.emplace_back();
      times.emplace_back();
    }
    const std::size_t k = it->second;
    ++rows[k].runs;
    times[k].push_back(r.seconds);
    if (r.feasible) {
      ++rows[k].feasible_runs;
      costs[k].push_back(r.tc);
    }
  }
  for (std::size_t k = 0; k < rows.size(); ++k) {
    InstanceRow& row = rows[k];
    row.time = mean(times[k]);
    if (costs[k].empty()) {
      row.error = "no feasible run";
      continue;
    }
    row.ave = mean(costs[k]);
    row.std = sample_std(costs[k]);
    row.best = *std::min_element(costs[k].begin(), costs[k].end());
    if (const auto ref = references.find(row.instance); ref != references.end()) {
      row.reference = ref->second;
      row.ave_pdr = pdr(row.ave, ref->second);
    }
  }
  return rows;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const std::vector<Loaded> loaded = load_all(cfg);
  std::vector<std::pair<int, int>> jobs;
  for (int i = 0; i < static_cast<int>(loaded.size()); ++i) {
    if (!loaded[i].inst) continue;
    for (int rep = 0; rep < cfg.repetitions; ++rep) jobs.emplace_back(i, rep);
  }
  ExperimentReport report;
  report.runs.resize(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), cfg.workers, [&](int j) {
    report.runs[j] = single_run(cfg, loaded[jobs[j].first], jobs[j].second, cfg.stop, cfg.params);
  });

  const std::vector<InstanceRow> computed = aggregate(report.runs, cfg.references);
  for (const Loaded& l : loaded) {
    if (!l.inst) {
      InstanceRow row;
      row.instance = l.label;
      row.error = l.error;
      report.rows.push_back(row);
      continue;
    }
    for (const InstanceRow& row : computed) {
      if (row.instance == l.label) report.rows.push_back(row);
    }
  }
  std::vector<double> pdrs;
  for (const InstanceRow& row : report.rows) {
    if (row.ave_pdr) pdrs.push_back(*row.ave_pdr);
  }
  if (!pdrs.empty()) report.ave_pdr = mean(pdrs);
  return report;
}

WinDrawLoss compare(const ExperimentReport& a, const ExperimentReport& b, double alpha) {
  auto samples = [](const ExperimentReport& r, const std::string& name) {
    std::vector<double> out;
    for (const RunRecord& run : r.runs) {
      if (run.instance == name && run.feasible) out.push_back(run.tc);
    }
    return out;
  };
  WinDrawLoss out;
  for (const InstanceRow& row : a.rows) {
    const std::vector<double> xa = samples(a, row.instance);
    const std::vector<double> xb = samples(b, row.instance);
    if (xa.size() < 2 || xb.size() < 2) continue;
    const Comparison c = rank_sum_test(xa, xb, alpha).outcome;
    out.per_instance[row.instance] = c;
    if (c == Comparison::Better) ++out.win;
    if (c == Comparison::Equivalent) ++out.draw;
    if (c == Comparison::Worse) ++out.loss;
  }
  return out;
}

std::vector<int> count_best(const std::vector<const ExperimentReport*>& reports) {
  std::vector<int> counts(reports.size(), 0);
  if (reports.empty()) return counts;
  for (const InstanceRow& row : reports.front()->rows) {
    std::vector<std::optional<double>> best(reports.size());
    double lowest = kInfinity;
    for (std::size_t k = 0; k < reports.size(); ++k) {
      for (const InstanceRow& r : reports[k]->rows) {
        if (r.instance == row.instance && r.error.empty()) best[k] = r.best;
      }
      if (best[k]) lowest = std::min(lowest, *best[k]);
    }
    for (std::size_t k = 0; k < reports.size(); ++k) {
      if (best[k] && *best[k] == lowest) ++counts[k];
    }
  }
  return counts;
}

double TimingRow::time_ratio(MoveKind k) const {
  const int i = static_cast<int>(k);
  return kg_seconds[i] > 0.0 ? traditional_seconds[i] / kg_seconds[i] : kInfinity;
}

double TimingRow::count_ratio(MoveKind k) const {
  const int i = static_cast<int>(k);
  return kg_evaluations[i] > 0 ? static_cast<double>(traditional_evaluations[i]) / kg_evaluations[i] : kInfinity;
}

std::vector<TimingRow> ablation_timing(const ExperimentConfig& cfg) {
  validate(cfg);
  const std::vector<Loaded> loaded = load_all(cfg);
  std::vector<TimingRow> rows;
  for (const Loaded& l : loaded) {
    if (!l.inst) continue;
    TimingRow row;
    row.instance = l.label;
    std::vector<RunRecord> kg(cfg.repetitions);
    std::vector<RunRecord> trad(cfg.repetitions);
    MemeticParams pk = cfg.params;
    pk.operators = OperatorMode::KnowledgeGuided;
    MemeticParams pt = cfg.params;
    pt.operators = OperatorMode::Traditional;
    ExperimentConfig no_stage2 = cfg;
    no_stage2.optimize_departures = false;
    // Timings are per operator, so runs stay sequential to avoid contention.
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
      kg[rep] = single_run(no_stage2, l, rep, cfg.stop, pk);
      trad[rep] = single_run(no_stage2, l, rep, cfg.stop, pt);
    }
    for (int k = 0; k < 3; ++k) {
      for (int rep = 0; rep < cfg.repetitions; ++rep) {
        row.kg_seconds[k] += kg[rep].stats.seconds[k];
        row.traditional_seconds[k] += trad[rep].stats.seconds[k];
        row.kg_evaluations[k] += kg[rep].stats.counters[k].criterion2_evaluations;
        row.kg_pruned[k] += kg[rep].stats.counters[k].pruned_by_criterion1;
        row.kg_enumerated[k] += kg[rep].stats.counters[k].moves_enumerated;
        row.traditional_evaluations[k] += trad[rep].stats.counters[k].full_route_evaluations;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<InitAblationRow> ablation_init(const ExperimentConfig& cfg) {
  validate(cfg);
  const std::vector<Loaded> loaded = load_all(cfg);
  std::vector<InitAblationRow> rows;
  for (const Loaded& l : loaded) {
    if (!l.inst) continue;
    InitAblationRow row;
    row.instance = l.label;
    row.kgis_best.resize(cfg.repetitions);
    row.baseline_best.resize(cfg.repetitions);
    parallel_for(cfg.repetitions, cfg.workers, [&](int rep) {
      auto best_of = [&](InitMode mode) {
        InitConfig init;
        init.psize = cfg.params.psize;
        init.max_retries = cfg.params.init_retries;
        init.mode = mode;
        Rng rng(cfg.base_seed + static_cast<std::uint64_t>(rep));
        double best = kInfinity;
        for (const Solution& s : kgis_population(*l.inst, *l.sp, init, rng).individuals) {
          const SolutionEvaluation e = evaluate_solution(*l.inst, *l.sp, s);
          if (e.feasible()) best = std::min(best, e.tc);
        }
        return best;
      };
      row.kgis_best[rep] = best_of(InitMode::Kgis);
      row.baseline_best[rep] = best_of(InitMode::Baseline);
    });
    row.kgis_mean = mean(row.kgis_best);
    row.baseline_mean = mean(row.baseline_best);
    rows.push_back(row);
  }
  return rows;
}

std::vector<TargetRow> runtime_to_target(const ExperimentConfig& cfg, const std::map<std::string, double>& targets) {
  validate(cfg);
  const std::vector<Loaded> loaded = load_all(cfg);
  std::vector<TargetRow> rows;
  for (const Loaded& l : loaded) {
    if (!l.inst) continue;
    const auto target = targets.find(l.label);
    if (target == targets.end()) continue;
    TargetRow row;
    row.instance = l.label;
    row.target = target->second;
    StopRule stop = cfg.stop;
    stop.generations = kTargetGenerationCap;
    stop.target_cost = target->second;
    MemeticParams params = cfg.params;
    params.gnum = kTargetGenerationCap;
    ExperimentConfig no_stage2 = cfg;
    no_stage2.optimize_departures = false;
    std::vector<RunRecord> runs(cfg.repetitions);
    parallel_for(cfg.repetitions, cfg.workers,
                 [&](int rep) { runs[rep] = single_run(no_stage2, l, rep, stop, params); });
    for (const RunRecord& r : runs) {
      row.seconds.push_back(r.reached_target ? std::optional<double>(r.seconds) : std::nullopt);
      row.generations.push_back(r.generations);
    }
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::json counters_json(const OperatorStats& stats) {
  nlohmann::json out = nlohmann::json::object();
  for (MoveKind k : {MoveKind::SingleInsertion, MoveKind::DoubleInsertion, MoveKind::Swap}) {
    const SearchCounters& c = stats[k];
    out[to_string(k)] = {{"moves_enumerated", c.moves_enumerated},
                         {"pruned_by_criterion1", c.pruned_by_criterion1},
                         {"criterion2_evaluations", c.criterion2_evaluations},
                         {"full_route_evaluations", c.full_route_evaluations},
                         {"improvements", c.improvements},
                         {"seconds", stats.seconds[static_cast<int>(k)]}};
  }
  return out;
}

template <typename T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

void write_report_json(std::ostream& out, const ExperimentReport& report) {
  nlohmann::json j;
  j["note"] = "time per run excludes instance parsing and shortest-path precomputation";
  j["ave_pdr"] = optional_json(report.ave_pdr);
  j["rows"] = nlohmann::json::array();
  for (const InstanceRow& r : report.rows) {
    j["rows"].push_back({{"instance", r.instance},
                         {"runs", r.runs},
                         {"feasible_runs", r.feasible_runs},
                         {"ave", r.ave},
                         {"std", r.std},
                         {"best", r.best},
                         {"time", r.time},
                         {"reference", optional_json(r.reference)},
                         {"ave_pdr", optional_json(r.ave_pdr)},
                         {"error", r.error}});
  }
  j["runs"] = nlohmann::json::array();
  for (const RunRecord& r : report.runs) {
    j["runs"].push_back({{"instance", r.instance},
                         {"repetition", r.repetition},
                         {"seed", r.seed},
                         {"feasible", r.feasible},
                         {"tc", r.tc},
                         {"stage1_tc", r.stage1_tc},
                         {"init_best_tc", r.init_best_tc},
                         {"routes", r.routes},
                         {"generations", r.generations},
                         {"seconds", r.seconds},
                         {"reached_target", r.reached_target},
                         {"counters", counters_json(r.stats)}});
  }
  out << j.dump(2) << '\n';
}

void write_report_csv(std::ostream& out, const ExperimentReport& report) {
  out << "instance,runs,feasible_runs,ave,std,best,time,reference,ave_pdr,error\n";
  for (const InstanceRow& r : report.rows) {
    out << r.instance << ',' << r.runs << ',' << r.feasible_runs << ',' << format_real(r.ave) << ','
        << format_real(r.std) << ',' << format_real(r.best) << ',' << format_real(r.time) << ','
        << (r.reference ? format_real(*r.reference) : "") << ',' << (r.ave_pdr ? format_real(*r.ave_pdr) : "")
        << ',' << r.error << '\n';
  }
}

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& runs) {
  out << "instance,repetition,seed,feasible,tc,stage1_tc,init_best_tc,routes,generations,seconds,reached_target\n";
  for (const RunRecord& r : runs) {
    out << r.instance << ',' << r.repetition << ',' << r.seed << ',' << r.feasible << ',' << format_real(r.tc)
        << ',' << format_real(r.stage1_tc) << ',' << format_real(r.init_best_tc) << ',' << r.routes << ','
        << r.generations << ',' << format_real(r.seconds) << ',' << r.reached_target << '\n';
  }
}

void write_timing_json(std::ostream& out, const std::vector<TimingRow>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const TimingRow& r : rows) {
    nlohmann::json row = {{"instance", r.instance}};
    for (MoveKind k : {MoveKind::SingleInsertion, MoveKind::DoubleInsertion, MoveKind::Swap}) {
      const int i = static_cast<int>(k);
      row[to_string(k)] = {{"kg_seconds", r.kg_seconds[i]},
                           {"traditional_seconds", r.traditional_seconds[i]},
                           {"time_ratio", r.time_ratio(k)},
                           {"kg_evaluations", r.kg_evaluations[i]},
                           {"kg_pruned", r.kg_pruned[i]},
                           {"kg_enumerated", r.kg_enumerated[i]},
                           {"traditional_evaluations", r.traditional_evaluations[i]},
                           {"count_ratio", r.count_ratio(k)}};
    }
    j.push_back(row);
  }
  out << j.dump(2) << '\n';
}

void write_timing_csv(std::ostream& out, const std::vector<TimingRow>& rows) {
  out << "instance,operator,traditional_seconds,kg_seconds,ratio,traditional_evaluations,kg_evaluations,"
         "kg_pruned,count_ratio\n";
  for (const TimingRow& r : rows) {
    for (MoveKind k : {MoveKind::SingleInsertion, MoveKind::DoubleInsertion, MoveKind::Swap}) {
      const int i = static_cast<int>(k);
      out << r.instance << ',' << to_string(k) << ',' << format_real(r.traditional_seconds[i]) << ','
          << format_real(r.kg_seconds[i]) << ',' << format_real(r.time_ratio(k)) << ','
          << r.traditional_evaluations[i] << ',' << r.kg_evaluations[i] << ',' << r.kg_pruned[i] << ','
          << format_real(r.count_ratio(k)) << '\n';
    }
  }
}

void write_init_csv(std::ostream& out, const std::vector<InitAblationRow>& rows) {
  out << "instance,kgis_mean,baseline_mean,seeds\n";
  for (const InitAblationRow& r : rows) {
    out << r.instance << ',' << format_real(r.kgis_mean) << ',' << format_real(r.baseline_mean) << ','
        << r.kgis_best.size() << '\n';
  }
}

void write_target_csv(std::ostream& out, const std::vector<TargetRow>& rows) {
  out << "instance,target,run,seconds,generations\n";
  for (const TargetRow& r : rows) {
    for (std::size_t k = 0; k < r.seconds.size(); ++k) {
      out << r.instance << ',' << format_real(r.target) << ',' << k << ','
          << (r.seconds[k] ? format_real(*r.seconds[k]) : "DNF") << ',' << r.generations[k] << '\n';
    }
  }
}

}  // namespace tdcarp
