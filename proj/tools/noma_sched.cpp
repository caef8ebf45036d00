// noma-sched: command-line front end for the scheduling library.

#include "noma/config.hpp"
#include "noma/feasibility.hpp"
#include "noma/oracle.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace noma;

namespace {

enum Exit : int {
  kOk = 0,
  kUsage = 1,
  kMissingFile = 2,
  kInvalidValue = 3,
  kInfeasible = 4,
  kTie = 5,
  kResourceLimit = 6,
  kIo = 7,
  kInternal = 8,
};

struct MissingFile : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Infeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_file(const std::string& path, const std::string& what) {
  if (!fs::is_regular_file(path)) throw MissingFile(what + " not found: " + path);
}

struct Overrides {
  std::string config;
  std::string instance;
  std::optional<std::uint64_t> seed;
  std::optional<long> slots;
  std::optional<int> users;
  std::optional<int> n_max;
  std::optional<int> jobs;
  std::optional<std::string> rate_model;
  std::optional<int> perturb_l;
  std::optional<double> step_size;
  std::optional<double> sampling_h;
  std::string output = "noma-out";
};

void add_config_flags(CLI::App* cmd, Overrides& o, bool instance_ok) {
  cmd->add_option("--config", o.config, "JSON scenario config");
  if (instance_ok) cmd->add_option("--instance", o.instance, "finite-support instance file");
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--slots", o.slots, "number of slots T");
  cmd->add_option("--users", o.users, "number of users n");
  cmd->add_option("--nmax", o.n_max, "largest virtual user");
  cmd->add_option("--output", o.output, "output directory")->capture_default_str();
  cmd->add_option("--jobs", o.jobs, "concurrent replications");
  cmd->add_option("--rate-model", o.rate_model, "shannon | truncated | staircase:<path>");
  cmd->add_option("--perturb-l", o.perturb_l, "perturbation scale l (0 disables)");
  cmd->add_option("--step-size", o.step_size, "constant threshold step s");
  cmd->add_option("--sampling-h", o.sampling_h, "history sampling fraction H");
}

ScenarioConfig effective_config(const Overrides& o) {
  ScenarioConfig c;
  if (!o.config.empty()) {
    require_file(o.config, "config");
    c = load_config(o.config);
  }
  auto apply = [](auto& field, const auto& value) {
    if (value) field = *value;
  };
  apply(c.seed, o.seed);
  apply(c.slots, o.slots);
  if (o.users && *o.users != c.users) {
    c.users = *o.users;
    c.family_members.clear();
    // Per-user vectors no longer fit; fall back to no demands unless sizes still agree.
    if (c.demand_lower.size() != c.users) c.demand_lower.resize(0);
    if (c.demand_upper.size() != c.users) c.demand_upper.resize(0);
    c.n_max = std::min(c.n_max, c.users);
  }
  apply(c.n_max, o.n_max);
  apply(c.jobs, o.jobs);
  apply(c.rate_model, o.rate_model);
  apply(c.perturb_l, o.perturb_l);
  apply(c.step_size, o.step_size);
  apply(c.sampling_h, o.sampling_h);
  if (c.rate_model.rfind("staircase:", 0) == 0) require_file(c.rate_model.substr(10), "staircase table");
  try {
    c.validate();
    (void)parse_rate_model(c.rate_model, c.channel);
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError("config", e.what());
  }
  return c;
}

InstanceFile load_instance(const std::string& path) {
  if (path.empty()) throw ConfigError("--instance", "an instance file is required");
  require_file(path, "instance");
  return read_instance_file(path);
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(fs::path(dir) / name);
  if (!out) throw std::ios_base::failure("cannot write " + (fs::path(dir) / name).string());
  out.precision(10);
  return out;
}

VectorQ parse_rational_list(const std::string& text) {
  std::string s = text;
  for (char& ch : s) {
    if (ch == ',') ch = ' ';
  }
  std::istringstream is(s);
  std::vector<Rational> values;
  for (std::string tok; is >> tok;) values.push_back(parse_rational(tok));
  VectorQ v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Eigen::Index>(i)) = values[i];
  return v;
}

// "{1} {2} {1,2} : 1/3 2/3 0" assigns weights to one tied set.
void add_tie_weight(StochasticTieBreak& rule, const VirtualUserFamily& family, const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ConfigError("--tie-weight", "expected '<members> : <weights>'");
  std::istringstream left(spec.substr(0, colon));
  std::vector<std::pair<std::size_t, Rational>> entries;
  const VectorQ weights = parse_rational_list(spec.substr(colon + 1));
  for (std::string tok; left >> tok;) {
    auto idx = family.index_of(VirtualUser::parse(tok));
    if (!idx) throw ConfigError("--tie-weight", tok + " is not in the family");
    if (entries.size() >= static_cast<std::size_t>(weights.size())) {
      throw ConfigError("--tie-weight", "more members than weights");
    }
    entries.emplace_back(*idx, weights(static_cast<Eigen::Index>(entries.size())));
  }
  if (entries.size() != static_cast<std::size_t>(weights.size())) {
    throw ConfigError("--tie-weight", "members and weights differ in number");
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::size_t> tied;
  std::vector<Rational> w;
  for (auto& [j, p] : entries) {
    tied.push_back(j);
    w.push_back(p);
  }
  rule.weights[tied] = w;
}

void print_summary(const std::vector<ScenarioResult>& results) {
  std::map<std::string, std::pair<double, int>> mean;
  std::vector<std::string> order;
  for (const auto& res : results) {
    for (const auto& arm : res.arms) {
      if (!mean.count(arm.name)) order.push_back(arm.name);
      mean[arm.name].first += arm.trace.utility;
      mean[arm.name].second += 1;
    }
  }
  for (const auto& name : order) {
    std::cout << name << " utility " << mean[name].first / mean[name].second << '\n';
  }
}

int cmd_simulate(const Overrides& o) {
  const auto config = effective_config(o);
  try {
    require_feasible(config.family(), config.demands());
  } catch (const InfeasibleDemands& e) {
    throw Infeasible(e.what());
  }
  const auto results = run_replications(config);
  write_scenario_outputs(o.output, config, results);
  open_output(o.output, "config.json") << dump_config(config);
  print_summary(results);
  return kOk;
}

int cmd_adapt(const Overrides& o, const std::string& tie_mode) {
  AdaptResult result;
  VirtualUserFamily family = VirtualUserFamily(1, {VirtualUser{1}});
  if (!o.instance.empty()) {
    const auto file = load_instance(o.instance);
    if (!file.demands) throw ConfigError("--instance", "instance has no demands block");
    family = file.instance.family();
    ScenarioConfig defaults;
    AdaptOptions opts;
    opts.step = o.step_size.value_or(defaults.step_size);
    opts.sampling_h = o.sampling_h.value_or(defaults.sampling_h);
    const int l = o.perturb_l.value_or(0);
    opts.perturbation = {std::max(l, 1), l > 0};
    opts.tie = tie_mode == "error" ? TieBreakRule(ErrorOnTie{})
               : tie_mode == "lowest" ? TieBreakRule(LowestIndex{})
                                      : TieBreakRule(StochasticTieBreak{});
    TemporalDemands demands{to_double(file.demands->lower), to_double(file.demands->upper)};
    if (demands.is_equality()) opts.mode = AdaptMode::RmEquality;
    Rng rng = stream_rng(o.seed.value_or(defaults.seed), 0, 3);
    DiscreteSource<double> source(file.instance);
    result = run_adaptation(source, demands, o.slots.value_or(1'000'000), opts, rng);
  } else {
    const auto config = effective_config(o);
    family = config.family();
    try {
      require_feasible(family, config.demands());
    } catch (const InfeasibleDemands& e) {
      throw Infeasible(e.what());
    }
    Rng placement = stream_rng(config.seed, 0, 0);
    Rng rng = stream_rng(config.seed, 0, 1);
    const auto& cp = config.channel;
    ChannelSource source(family, place_users(config.users, cp.cell_inner_radius, cp.cell_outer_radius, placement), cp,
                         parse_rate_model(config.rate_model, cp), config.shadowing, placement);
    AdaptOptions opts;
    opts.mode = config.adaptation;
    opts.step = config.step_size;
    opts.sampling_h = config.sampling_h;
    opts.perturbation = {std::max(config.perturb_l, 1), config.perturb_l > 0};
    opts.tie = StochasticTieBreak{};
    result = run_adaptation(source, config.demands(), config.slots, opts, rng);
  }
  auto trace = open_output(o.output, "thresholds.csv");
  write_trace_csv(trace, result.trace, family);
  std::cout << "utility " << result.trace.utility << '\n';
  std::cout << "shares";
  for (Eigen::Index i = 0; i < result.trace.shares.size(); ++i) std::cout << ' ' << result.trace.shares(i);
  std::cout << "\nlambda";
  for (Eigen::Index i = 0; i < result.lambda.size(); ++i) std::cout << ' ' << result.lambda(i);
  std::cout << "\nmax_residual " << result.max_residual << (result.converged ? "" : " (not converged)") << '\n';
  return kOk;
}

struct FamilyAndDemands {
  VirtualUserFamily family;
  std::optional<ExactDemands> demands;
};

FamilyAndDemands family_input(const Overrides& o) {
  if (!o.instance.empty()) {
    auto file = load_instance(o.instance);
    return {file.instance.family(), file.demands};
  }
  const auto config = effective_config(o);
  return {config.family(), to_exact(config.demands())};
}

int cmd_feasibility(const Overrides& o) {
  auto in = family_input(o);
  if (!in.demands) throw ConfigError("demands", "no demands given");
  auto witness = check_feasibility_box(in.family, *in.demands);
  if (!witness) {
    std::string why = "demands are infeasible";
    try {
      const auto violated = violated_by_box(feasible_region(in.family).region, *in.demands);
      if (!violated.empty()) {
        why += "; violated:";
        for (const auto& q : violated) why += " " + pretty(q) + ";";
        why.pop_back();
      }
    } catch (const ResourceLimitError&) {
    }
    throw Infeasible(why);
  }
  std::cout << "feasible\nw";
  for (Eigen::Index i = 0; i < witness->w.size(); ++i) std::cout << ' ' << to_string(witness->w(i));
  std::cout << '\n';
  write_certificate(std::cout, in.family, witness->certificate);
  return kOk;
}

int cmd_region(const Overrides& o, bool raw, bool show_basis) {
  const auto in = family_input(o);
  const auto pipeline = feasible_region(in.family);
  if (show_basis) {
    std::cout << "dual variables:";
    for (const auto& l : pipeline.dual.labels) std::cout << ' ' << l;
    std::cout << '\n';
    for (const auto& b : pipeline.basis) {
      std::cout << "basis";
      for (Eigen::Index k = 0; k < b.size(); ++k) std::cout << ' ' << b(k);
      std::cout << '\n';
    }
  }
  if (raw) {
    pipeline.region.serialize(std::cout);
  } else {
    for (const auto& line : pipeline.region.pretty()) std::cout << line << '\n';
  }
  return kOk;
}

int cmd_oracle(const Overrides& o, const std::string& lambda_text, const std::string& tie_mode,
               const std::vector<std::string>& tie_weights) {
  const auto file = load_instance(o.instance);
  const auto& family = file.instance.family();
  if (!lambda_text.empty()) {
    const VectorQ lambda = parse_rational_list(lambda_text);
    if (lambda.size() != family.users()) throw ConfigError("--lambda", "needs one threshold per user");
    TieBreakRule tie = ErrorOnTie{};
    if (tie_mode == "lowest") tie = LowestIndex{};
    if (tie_mode == "uniform" || !tie_weights.empty()) {
      StochasticTieBreak rule;
      for (const auto& spec : tie_weights) add_tie_weight(rule, family, spec);
      tie = rule;
    }
    const auto eval = exact_tbs_evaluate(file.instance, lambda, tie);
    std::cout << "utility " << to_string(eval.utility) << "\nshares";
    for (Eigen::Index i = 0; i < eval.shares.size(); ++i) std::cout << ' ' << to_string(eval.shares(i));
    std::cout << '\n';
    return kOk;
  }
  if (!file.demands) throw ConfigError("--instance", "instance has no demands block; pass --lambda instead");
  const auto sol = lp_optimal_stationary(file.instance, *file.demands);
  if (!sol) throw Infeasible("demands are infeasible for this instance");
  std::cout << "utility " << to_string(sol->utility) << "\nshares";
  for (Eigen::Index i = 0; i < sol->shares.size(); ++i) std::cout << ' ' << to_string(sol->shares(i));
  std::cout << '\n';
  return kOk;
}

int cmd_perturb_sweep(const Overrides& o) {
  const auto file = load_instance(o.instance);
  if (!file.demands) throw ConfigError("--instance", "instance has no demands block");
  const TemporalDemands demands{to_double(file.demands->lower), to_double(file.demands->upper)};
  const long slots = o.slots.value_or(1'000'000);
  ScenarioConfig defaults;
  auto csv = open_output(o.output, "perturb_sweep.csv");
  csv << "l,utility";
  for (int i = 1; i <= demands.users(); ++i) csv << ",A_" << i;
  csv << ",max_violation\n";
  std::cout.precision(6);
  for (int l : {1, 2, 4, 8, 16}) {
    AdaptOptions opts;
    opts.mode = AdaptMode::Algorithm2;
    opts.step = o.step_size.value_or(defaults.step_size);
    opts.sampling_h = o.sampling_h.value_or(defaults.sampling_h);
    opts.perturbation = {l, true};
    opts.tie = StochasticTieBreak{};
    Rng rng = stream_rng(o.seed.value_or(defaults.seed), l, 3);
    DiscreteSource<double> source(file.instance);
    const auto r = run_adaptation(source, demands, slots, opts, rng);
    csv << l << ',' << r.trace.utility;
    for (Eigen::Index i = 0; i < r.trace.shares.size(); ++i) csv << ',' << r.trace.shares(i);
    csv << ',' << r.trace.violations.maxCoeff() << '\n';
    std::cout << "l " << l << " utility " << r.trace.utility << " max_violation " << r.trace.violations.maxCoeff()
              << '\n';
  }
  return kOk;
}

int fail(int code, const std::string& reason) {
  std::string line = reason;
  std::replace(line.begin(), line.end(), '\n', ' ');
  std::cerr << "error: " << line << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporally fair threshold-based scheduling for NOMA: simulation, adaptation, feasibility and exact oracle."};
  app.name("noma-sched");
  app.require_subcommand(1);
  Overrides o;

  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo scenario with NOMA, OMA and round-robin arms");
  add_config_flags(simulate, o, false);

  auto* adapt = app.add_subcommand("adapt", "threshold adaptation on a channel scenario or an instance file");
  add_config_flags(adapt, o, true);
  std::string tie_mode = "uniform";
  adapt->add_option("--tie", tie_mode, "tie rule for instance runs: error | lowest | uniform")
      ->check(CLI::IsMember({"error", "lowest", "uniform"}));

  auto* feasibility = app.add_subcommand("feasibility", "decide whether the demands are achievable");
  add_config_flags(feasibility, o, true);

  auto* region = app.add_subcommand("region", "inequality description of the achievable shares");
  add_config_flags(region, o, true);
  bool raw = false, show_basis = false;
  region->add_flag("--raw", raw, "print 'c_1 ... c_n >= c_0' lines");
  region->add_flag("--show-basis", show_basis, "also print the dual Hilbert basis");

  auto* oracle = app.add_subcommand("oracle", "exact optimum or exact TBS evaluation on an instance file");
  add_config_flags(oracle, o, true);
  std::string lambda_text;
  std::string oracle_tie = "error";
  std::vector<std::string> tie_weights;
  oracle->add_option("--lambda", lambda_text, "thresholds, e.g. 1/10,0 (evaluates that TBS)");
  oracle->add_option("--tie", oracle_tie, "error | lowest | uniform")->check(CLI::IsMember({"error", "lowest", "uniform"}));
  oracle->add_option("--tie-weight", tie_weights, "'{1} {2} {1,2} : 1/3 2/3 0' (repeatable)");

  auto* sweep = app.add_subcommand("perturb-sweep", "heuristic adaptation with perturbation l = 1, 2, 4, 8, 16");
  add_config_flags(sweep, o, true);

  if (argc <= 1) {
    std::cout << app.help();
    return kUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*simulate) return cmd_simulate(o);
    if (*adapt) return cmd_adapt(o, tie_mode);
    if (*feasibility) return cmd_feasibility(o);
    if (*region) return cmd_region(o, raw, show_basis);
    if (*oracle) return cmd_oracle(o, lambda_text, oracle_tie, tie_weights);
    if (*sweep) return cmd_perturb_sweep(o);
  } catch (const MissingFile& e) {
    return fail(kMissingFile, e.what());
  } catch (const Infeasible& e) {
    return fail(kInfeasible, e.what());
  } catch (const TieError& e) {
    return fail(kTie, e.what());
  } catch (const ResourceLimitError& e) {
    return fail(kResourceLimit, e.what());
  } catch (const InvalidArgument& e) {
    return fail(kInvalidValue, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kInvalidValue, e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(kIo, e.what());
  } catch (const std::exception& e) {
    return fail(kInternal, e.what());
  }
  return kUsage;
}
