// ppg-smc: validate, compile and run probabilistic programs.
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ppgsmc/dsl/compiler.hpp"
#include "ppgsmc/dsl/zoo.hpp"
#include "ppgsmc/estimator.hpp"
#include "ppgsmc/ppg_json.hpp"
#include "ppgsmc/validate.hpp"

using namespace ppgsmc;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInvalid = 2, kDegenerate = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidModel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Resolved {
  PPG graph;
  Checkpoint start = 0;
  std::optional<Expr> result;
  std::string result_label;
  std::optional<double> bound;
  std::optional<int> horizon;
  std::string name;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidModel("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Resolved resolve(const std::string& model) {
  Resolved r;
  r.name = model;
  if (model.rfind("zoo:", 0) == 0) {
    dsl::ZooModel z = dsl::load_zoo(model.substr(4));
    r.graph = std::move(z.graph);
    r.start = z.start;
    r.result = z.target.h;
    r.result_label = z.target.label;
    r.bound = z.target.bound;
    r.horizon = z.horizon;
    return r;
  }
  std::string text = read_file(model);
  if (model.size() > 5 && model.substr(model.size() - 5) == ".json") {
    r.graph = ppg_from_json(text);
    return r;
  }
  dsl::ProgramAst ast = dsl::parse(text);
  r.graph = dsl::compile(ast);
  if (ast.result) {
    r.result = *ast.result;
    r.result_label = to_string(*ast.result, ast.var_names);
  }
  return r;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

struct Options {
  std::string model;
  std::string particles = "10000";
  int horizon = -1;
  std::optional<std::uint64_t> seed;
  std::string scheme = "systematic";
  std::string target;
  std::optional<double> bound;
  int replicates = 1;
  std::string output;
  int threads = 0;
};

std::uint64_t effective_seed(const Options& o) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("PPG_SMC_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError("PPG_SMC_SEED is not an unsigned integer");
    }
  }
  return 0;
}

void check_valid(const PPG& g) {
  auto rep = validate_ppg(g, 2000, 0);
  if (rep.ok()) return;
  std::ostringstream os;
  os << "model fails validation:";
  for (const auto& v : rep.violations) os << "\n  " << to_string(v);
  throw InvalidModel(os.str());
}

RunSpec make_spec(const Options& o, const Resolved& r, Eigen::Index n) {
  if (n < 1) throw UsageError("--particles must be at least 1");
  if (o.replicates < 1) throw UsageError("--replicates must be at least 1");
  if (o.threads < 0) throw UsageError("--threads must be nonnegative");
  RunSpec spec;
  spec.graph = &r.graph;
  spec.start = r.start;
  if (o.horizon != -1) {
    if (o.horizon < 1) throw UsageError("--horizon must be at least 1");
    spec.horizon = o.horizon;
  } else if (r.horizon) {
    spec.horizon = *r.horizon;
  } else {
    throw UsageError("--horizon is required for models outside the zoo");
  }
  spec.particles = n;
  auto scheme = parse_scheme(o.scheme);
  if (!scheme) throw UsageError("--scheme must be systematic or multinomial");
  spec.scheme = *scheme;
  spec.seed = effective_seed(o);
  spec.engine.threads = o.threads;
  spec.model = r.name;
  if (!o.target.empty()) {
    Expr h = dsl::parse_expression(o.target, r.graph.var_names);
    spec.target = make_target(std::move(h), o.bound, o.target);
  } else if (r.result) {
    spec.target = make_target(*r.result, o.bound ? o.bound : r.bound, r.result_label);
  } else {
    throw UsageError("model has no return expression; pass --target");
  }
  return spec;
}

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

void print_table(std::ostream& os, const EstimateReport& r) {
  os << "model            " << r.model << "\n"
     << "target           " << r.target << "  (M = " << fmt(r.bound) << ")\n"
     << "particles        " << r.n_particles << "\n"
     << "horizon          " << r.horizon << "\n"
     << "seed             " << r.seed << "\n"
     << "beta_L           " << fmt(r.beta_L) << "\n"
     << "beta_U           " << fmt(r.beta_U) << "\n"
     << "alpha_t          " << fmt(r.alpha_t) << "\n"
     << "ess              " << fmt(r.ess) << "\n"
     << "terminated mass  " << fmt(r.termination_mass) << "\n"
     << "wall time (s)    " << fmt(r.wall_time) << "\n";
  if (r.stats)
    os << "replicates       " << r.replicates.size() << "  (beta_L sd " << fmt(r.stats->beta_L.sd) << ")\n";
  if (r.diag.score_clamps || r.diag.default_distributions || r.diag.zero_weight_steps || r.diag.mask_violations)
    os << "diagnostics      clamps " << r.diag.score_clamps << ", defaults " << r.diag.default_distributions
       << ", zero-weight steps " << r.diag.zero_weight_steps << ", mask violations " << r.diag.mask_violations
       << "\n";
}

int cmd_run(const Options& o) {
  if (o.model.empty()) throw UsageError("--model is required");
  Resolved r = resolve(o.model);
  check_valid(r.graph);
  std::vector<std::string> ns = split_list(o.particles);
  if (ns.size() != 1) throw UsageError("run takes a single --particles value");
  RunSpec spec = make_spec(o, r, std::stoll(ns[0]));
  EstimateReport rep = replicate(spec, o.replicates);
  std::string fmt_out = o.output.empty() ? "table" : o.output;
  if (fmt_out == "json")
    std::cout << to_json(rep) << "\n";
  else if (fmt_out == "csv")
    std::cout << csv_header() << "\n" << to_csv_row(rep) << "\n";
  else if (fmt_out == "table")
    print_table(std::cout, rep);
  else
    throw UsageError("--output must be json, csv or table");
  return kOk;
}

int cmd_bench(const Options& o) {
  std::vector<std::string> models = split_list(o.model);
  if (models.empty())
    for (const auto& n : dsl::zoo_names()) models.push_back("zoo:" + n);
  std::vector<std::string> ns = split_list(o.particles);
  std::string fmt_out = o.output.empty() ? "csv" : o.output;
  if (fmt_out != "csv" && fmt_out != "json") throw UsageError("bench --output must be csv or json");
  if (fmt_out == "csv") std::cout << csv_header() << "\n";
  for (const auto& m : models) {
    Resolved r = resolve(m);
    check_valid(r.graph);
    for (const auto& n : ns) {
      RunSpec spec = make_spec(o, r, std::stoll(n));
      EstimateReport rep = replicate(spec, o.replicates);
      if (fmt_out == "csv")
        std::cout << to_csv_row(rep) << "\n" << std::flush;
      else
        std::cout << to_json(rep, true) << "\n" << std::flush;
    }
  }
  return kOk;
}

int cmd_validate(const Options& o) {
  if (o.model.empty()) throw UsageError("--model is required");
  Resolved r = resolve(o.model);
  auto rep = validate_ppg(r.graph, 10000, effective_seed(o));
  if (rep.ok()) {
    std::cout << "ok: " << r.graph.size() << " checkpoints, " << r.graph.transitions.size() << " transitions\n";
    return kOk;
  }
  for (const auto& v : rep.violations) std::cout << to_string(v) << "\n";
  return kInvalid;
}

int cmd_compile(const Options& o) {
  if (o.model.empty()) throw UsageError("--model is required");
  Resolved r = resolve(o.model);
  std::string fmt_out = o.output.empty() ? "json" : o.output;
  if (fmt_out == "json")
    std::cout << ppg_to_json(r.graph) << "\n";
  else if (fmt_out == "dot")
    std::cout << dsl::to_dot(r.graph);
  else
    throw UsageError("compile --output must be json or dot");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  retain_freed_memory();
  CLI::App app{"ppg-smc: particle filtering with certified bounds for probabilistic program graphs"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub, bool inference) {
    sub->add_option("--model", o.model, "model: path to .pp or .json, or zoo:name[:key=value]");
    sub->add_option("--seed", o.seed, "seed (default: PPG_SMC_SEED or 0)");
    sub->add_option("--output", o.output, "output format");
    if (!inference) return;
    sub->add_option("--particles", o.particles, "particle count (bench: comma-separated list)");
    sub->add_option("--horizon", o.horizon, "time horizon t");
    sub->add_option("--scheme", o.scheme, "systematic | multinomial");
    sub->add_option("--target", o.target, "target expression h over program variables");
    sub->add_option("--bound", o.bound, "upper bound M on the target");
    sub->add_option("--replicates", o.replicates, "independent replicates");
    sub->add_option("--threads", o.threads, "worker threads, 0 = sequential");
  };
  auto* run = app.add_subcommand("run", "estimate bounds for one model");
  add_common(run, true);
  auto* bench = app.add_subcommand("bench", "CSV table over models and particle counts");
  add_common(bench, true);
  auto* val = app.add_subcommand("validate", "check well-formedness of a model");
  add_common(val, false);
  auto* comp = app.add_subcommand("compile", "print the compiled PPG (json | dot)");
  add_common(comp, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (run->parsed()) return cmd_run(o);
    if (bench->parsed()) return cmd_bench(o);
    if (val->parsed()) return cmd_validate(o);
    if (comp->parsed()) return cmd_compile(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const EstimationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDegenerate;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kInvalid;
  } catch (const InvalidModel& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const StructureError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kUsage;
}
