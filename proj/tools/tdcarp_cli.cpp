#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tdcarp/departure.hpp"
#include "tdcarp/harness.hpp"
#include "tdcarp/oracle.hpp"

using namespace tdcarp;
using nlohmann::json;

namespace {

struct Common {
  std::uint64_t seed = 1;
  int reps = 20;
  int generations = 50;
  double lambda = 1.0;
  std::string init = "kgis";
  std::string operators = "kg";
  std::string out;
  std::string format = "json";
  std::string config;
  int workers = 0;
  std::vector<std::string> instances;
};

void add_common(CLI::App* app, Common& c, bool with_instances = true) {
  app->add_option("--seed", c.seed, "Base seed");
  app->add_option("--reps", c.reps, "Repetitions per instance");
  app->add_option("--generations", c.generations, "Generations per run");
  app->add_option("--lambda", c.lambda, "Gap tolerance of the pruning test (inf disables)");
  app->add_option("--init", c.init, "Initialization")->check(CLI::IsMember({"kgis", "baseline"}));
  app->add_option("--operators", c.operators, "Local search operators")->check(CLI::IsMember({"kg", "traditional"}));
  app->add_option("--out", c.out, "Output directory");
  app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--config", c.config, "key=value config file");
  app->add_option("--workers", c.workers, "Worker threads (0 = all cores)");
  if (with_instances) app->add_option("instances", c.instances, "Extended-DAT instance files");
}

ExperimentConfig to_config(const Common& c, const CLI::App& app) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : parse_config_file(c.config);
  auto given = [&](const char* flag) { return app.count(flag) > 0; };
  if (c.config.empty() || given("--seed")) cfg.base_seed = c.seed;
  if (c.config.empty() || given("--reps")) cfg.repetitions = c.reps;
  if (c.config.empty() || given("--generations")) {
    cfg.stop.generations = c.generations;
    cfg.params.gnum = c.generations;
  }
  if (c.config.empty() || given("--lambda")) cfg.params.lambda = c.lambda;
  if (c.config.empty() || given("--init")) cfg.params.init = c.init == "kgis" ? InitMode::Kgis : InitMode::Baseline;
  if (c.config.empty() || given("--operators")) {
    cfg.params.operators = c.operators == "kg" ? OperatorMode::KnowledgeGuided : OperatorMode::Traditional;
  }
  if (given("--out")) cfg.output_dir = c.out;
  if (given("--workers")) cfg.workers = c.workers;
  for (const std::string& p : c.instances) cfg.instances.push_back(InstanceSpec{p, std::nullopt, {}});
  return cfg;
}

/// Writes to DIR/name when an output directory is set, else to stdout.
void emit(const std::string& dir, const std::string& name, const std::function<void(std::ostream&)>& write) {
  if (dir.empty()) {
    write(std::cout);
    return;
  }
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write(out);
  std::cerr << "wrote " << path.string() << '\n';
}

json plan_json(const Solution& sol) {
  json routes = json::array();
  for (const Route& r : sol.routes) {
    json tasks = json::array();
    for (Visit v : r.visits) tasks.push_back(std::to_string(v.task + 1) + (v.reversed ? "-" : "+"));
    routes.push_back(tasks);
  }
  return routes;
}

std::map<std::string, double> read_targets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open targets file " + path);
  std::map<std::string, double> out;
  std::string name;
  double value = 0.0;
  while (in >> name >> value) out[name] = value;
  return out;
}

IntervalPolicy policy_named(const std::string& name) {
  return name == "flat" ? flat_everywhere_policy() : IntervalPolicy{};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Arc routing with time-dependent service costs: solver and benchmark harness"};
  app.require_subcommand(1);

  // solve
  Common solve_opts;
  std::string dump_solution;
  std::string trace_path;
  bool no_stage2 = false;
  double wallclock = kInfinity;
  double target = -kInfinity;
  auto* solve = app.add_subcommand("solve", "Run the two-stage solver on one instance");
  add_common(solve, solve_opts, false);
  std::string solve_instance;
  solve->add_option("instance", solve_instance, "Extended-DAT instance file")->required();
  solve->add_option("--dump-solution", dump_solution, "Write the final plan to this file");
  solve->add_option("--trace", trace_path, "Write the per-generation trace CSV to this file");
  solve->add_option("--wallclock", wallclock, "Stop after this many seconds");
  solve->add_option("--target", target, "Stop once this cost is reached");
  solve->add_flag("--no-stage2", no_stage2, "Keep all departure times at 0");

  Common bench_opts;
  auto* bench = app.add_subcommand("bench", "Repeated runs per instance with Ave/Std/Best/Time rows");
  add_common(bench, bench_opts);

  Common ablate_init_opts;
  auto* ablate_init = app.add_subcommand("ablate-init", "Initial population best: KGIS vs knowledge-free");
  add_common(ablate_init, ablate_init_opts);

  Common ablate_ops_opts;
  auto* ablate_ops = app.add_subcommand("ablate-operators", "Operator time and evaluation counts: kg vs traditional");
  add_common(ablate_ops, ablate_ops_opts);

  Common ttt_opts;
  std::string targets_path;
  auto* ttt = app.add_subcommand("time-to-target", "Wall-clock until a target cost (600 generation cap)");
  add_common(ttt, ttt_opts);
  ttt->add_option("--targets", targets_path, "File of 'instance-name cost' lines")->required();

  std::string gen_base;
  std::string gen_type = "3lp";
  double gen_slope = 1.0;
  std::string gen_policy = "random";
  std::uint64_t gen_seed = 1;
  std::uint64_t base_seed = 1;
  std::string gen_out;
  SyntheticBaseSpec synth;
  auto* gen = app.add_subcommand("gen", "Generate a time-dependent instance from classic or synthetic base data");
  gen->add_option("--base", gen_base, "Classic DAT file (omit for a synthetic base)");
  gen->add_option("--type", gen_type, "Instance type")->transform(CLI::IsMember({"2lp", "3lp"}, CLI::ignore_case));
  gen->add_option("--slope", gen_slope, "Absolute slope of the cost functions");
  gen->add_option("--policy", gen_policy, "Interval policy")->check(CLI::IsMember({"flat", "random"}));
  gen->add_option("--seed", gen_seed, "Interval seed");
  gen->add_option("--base-seed", base_seed, "Synthetic base seed");
  gen->add_option("--vertices", synth.n_vertices, "Synthetic base vertices");
  gen->add_option("--edges", synth.n_edges, "Synthetic base edges");
  gen->add_option("--required", synth.n_required, "Synthetic base required edges");
  gen->add_option("--name", synth.name, "Synthetic base name");
  gen->add_option("--output,-o", gen_out, "Output file (stdout if omitted)");

  std::string conv_in;
  std::string conv_out;
  auto* convert = app.add_subcommand("convert", "Convert a classic DAT file to the extended format (flat costs)");
  convert->add_option("input", conv_in, "Classic DAT file")->required();
  convert->add_option("--output,-o", conv_out, "Output file (stdout if omitted)");
  convert->add_option("--type", gen_type, "Instance type")->transform(CLI::IsMember({"2lp", "3lp"}, CLI::ignore_case));

  std::string oracle_instance;
  OracleBudget budget;
  auto* oracle = app.add_subcommand("oracle", "Exhaustive optimum of a small instance");
  oracle->add_option("instance", oracle_instance, "Extended-DAT instance file")->required();
  oracle->add_option("--max-tasks", budget.max_tasks, "Refuse larger instances");
  oracle->add_option("--grid-steps", budget.grid_steps, "Departure grid resolution");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      ExperimentConfig cfg = to_config(solve_opts, *solve);
      const Instance inst = parse_instance_file(solve_instance);
      const ShortestPathMatrix sp = all_pairs_shortest_paths(inst);
      MemeticParams params = cfg.params;
      params.seed = cfg.base_seed;
      StopRule stop = cfg.stop;
      stop.wallclock_seconds = wallclock;
      stop.target_cost = target;
      Rng rng(params.seed);
      const KgmaResult res = kgma_run(inst, sp, params, rng, stop);
      if (!res.found_feasible) {
        std::cerr << "no feasible plan found\n";
        return 2;
      }
      Solution final_plan = res.best.solution;
      DepartureResult dep;
      if (!no_stage2) {
        DepartureOptions opt;
        opt.seed = params.seed;
        dep = stage2(inst, sp, final_plan, opt);
        final_plan = with_departures(final_plan, dep);
      }
      const SolutionEvaluation eval = evaluate_solution(inst, sp, final_plan);
      if (!dump_solution.empty()) {
        std::ofstream out(dump_solution);
        write_solution(out, final_plan);
      }
      if (!trace_path.empty()) {
        std::ofstream out(trace_path);
        write_trace_csv(out, res.trace);
      }
      json j = {{"instance", inst.name},
                {"seed", params.seed},
                {"tc", eval.tc},
                {"stage1_tc", res.best.eval.tc},
                {"init_best_tc", res.init_best_tc},
                {"feasible", eval.feasible()},
                {"generations", res.generations},
                {"seconds", res.seconds},
                {"departure_method", no_stage2 ? "none" : to_string(dep.method)},
                {"departures", dep.times},
                {"plan", plan_json(final_plan)}};
      if (solve_opts.format == "csv") {
        emit(cfg.output_dir, "solve.csv", [&](std::ostream& o) {
          o << "instance,seed,tc,stage1_tc,generations,seconds\n"
            << inst.name << ',' << params.seed << ',' << format_real(eval.tc) << ','
            << format_real(res.best.eval.tc) << ',' << res.generations << ',' << format_real(res.seconds) << '\n';
        });
      } else {
        emit(cfg.output_dir, "solve.json", [&](std::ostream& o) { o << j.dump(2) << '\n'; });
      }
    } else if (*bench) {
      const ExperimentConfig cfg = to_config(bench_opts, *bench);
      const ExperimentReport report = run_experiment(cfg);
      if (bench_opts.format == "csv") {
        emit(cfg.output_dir, "report.csv", [&](std::ostream& o) { write_report_csv(o, report); });
        if (!cfg.output_dir.empty()) {
          emit(cfg.output_dir, "runs.csv", [&](std::ostream& o) { write_runs_csv(o, report.runs); });
        }
      } else {
        emit(cfg.output_dir, "report.json", [&](std::ostream& o) { write_report_json(o, report); });
      }
    } else if (*ablate_init) {
      const ExperimentConfig cfg = to_config(ablate_init_opts, *ablate_init);
      const auto rows = ablation_init(cfg);
      emit(cfg.output_dir, "ablate_init.csv", [&](std::ostream& o) { write_init_csv(o, rows); });
    } else if (*ablate_ops) {
      const ExperimentConfig cfg = to_config(ablate_ops_opts, *ablate_ops);
      const auto rows = ablation_timing(cfg);
      if (ablate_ops_opts.format == "csv") {
        emit(cfg.output_dir, "ablate_operators.csv", [&](std::ostream& o) { write_timing_csv(o, rows); });
      } else {
        emit(cfg.output_dir, "ablate_operators.json", [&](std::ostream& o) { write_timing_json(o, rows); });
      }
    } else if (*ttt) {
      const ExperimentConfig cfg = to_config(ttt_opts, *ttt);
      const auto rows = runtime_to_target(cfg, read_targets(targets_path));
      emit(cfg.output_dir, "time_to_target.csv", [&](std::ostream& o) { write_target_csv(o, rows); });
    } else if (*gen) {
      const ClassicInstance base =
          gen_base.empty() ? generate_classic_base(synth, base_seed) : parse_classic_dat_file(gen_base);
      const Instance inst =
          generate_td_parameters(base, gen_type == "2lp" ? InstanceType::TwoSegment : InstanceType::ThreeSegment,
                                 gen_slope, policy_named(gen_policy), gen_seed);
      if (gen_out.empty()) {
        write_instance(std::cout, inst);
      } else {
        std::ofstream out(gen_out);
        write_instance(out, inst);
      }
    } else if (*convert) {
      const Instance inst =
          generate_td_parameters(parse_classic_dat_file(conv_in),
                                 gen_type == "2lp" ? InstanceType::TwoSegment : InstanceType::ThreeSegment, 0.0,
                                 flat_everywhere_policy(), 0);
      if (conv_out.empty()) {
        write_instance(std::cout, inst);
      } else {
        std::ofstream out(conv_out);
        write_instance(out, inst);
      }
    } else if (*oracle) {
      const Instance inst = parse_instance_file(oracle_instance);
      const ExactResult res = exact_solve(inst, budget);
      json j = {{"tc", res.tc},
                {"plan", plan_json(res.solution)},
                {"Dt", res.departures},
                {"grid_error_bound", res.grid_error_bound}};
      std::cout << j.dump(2) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
