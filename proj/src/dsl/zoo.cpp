#include "ppgsmc/dsl/zoo.hpp"

#include "ppgsmc/dsl/compiler.hpp"
#include "ppgsmc/errors.hpp"

namespace ppgsmc::dsl {

namespace {

struct Entry {
  const char* name;
  const char* file;
  const char* target;  // overrides the source's return when non-empty
  double bound;        // M; 0 = automatic
  int iterations;
  // horizon = prologue + period * iterations + epilogue
  int prologue, period, epilogue;
};

constexpr double kInf = ext::inf;

const Entry kEntries[] = {
    {"at", "at", "", kInf, 8, 2, 1, 1},
    {"dmm", "dmm", "", 1.0, 1000, 2, 1, 1},
    {"ht", "ht", "", kInf, 100, 2, 2, 2},
    {"brp", "brp", "", 1.0, 281, 2, 2, 1},
    {"niid", "niid", "", kInf, 100, 2, 1, 1},
    {"rw1", "rw1", "", 1.0, 101, 2, 1, 2},
    {"zc", "zc", "", 1.0, 1000, 2, 2, 1},
    {"rw2", "rw2", "", kInf, 101, 2, 1, 1},
};

const Entry& entry(const std::string& name) {
  for (const auto& e : kEntries)
    if (name == e.name) return e;
  throw Error("unknown zoo model '" + name + "'");
}

}  // namespace

const std::vector<std::string>& zoo_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& e : kEntries) v.push_back(e.name);
    return v;
  }();
  return names;
}

int zoo_horizon(const std::string& name, int iterations) {
  const Entry& e = entry(name);
  return e.prologue + e.period * iterations + e.epilogue;
}

ZooModel load_zoo(const std::string& spec) {
  std::string rest = spec;
  std::vector<std::string> parts;
  for (std::size_t p; (p = rest.find(':')) != std::string::npos; rest = rest.substr(p + 1))
    parts.push_back(rest.substr(0, p));
  parts.push_back(rest);

  std::string name = parts[0];
  ParamMap params;
  if (name == "zc.1") name = "zc", params["lambda"] = "0.99";
  else if (name == "zc.2") name = "zc", params["lambda"] = "0.5";
  else if (name == "rw2.1") name = "rw2", params["lambda"] = "0.5";
  else if (name == "rw2.2") name = "rw2", params["lambda"] = "0.9999";
  const Entry& e = entry(name);

  int iterations = e.iterations;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    auto eq = parts[i].find('=');
    if (eq == std::string::npos) throw Error("expected key=value in zoo spec '" + spec + "'");
    std::string key = parts[i].substr(0, eq), value = parts[i].substr(eq + 1);
    if (key == "iterations")
      iterations = std::stoi(value);
    else
      params[key] = value;
  }

  const auto& srcs = embedded_sources();
  auto it = srcs.find(e.file);
  if (it == srcs.end()) throw Error(std::string("missing embedded source ") + e.file);
  ProgramAst ast = parse(it->second, params);

  ZooModel m;
  m.name = spec;
  m.source_name = e.file;
  m.params = ast.params;
  m.graph = compile(ast);
  m.iterations = iterations;
  m.horizon = zoo_horizon(name, iterations);
  Expr h = ast.result ? *ast.result : lit(0.0);
  std::string label = ast.result ? to_string(h, ast.var_names) : "0";
  m.target = make_target(std::move(h), e.bound > 0 ? std::optional<double>(e.bound) : std::nullopt, label);
  return m;
}

std::map<std::string, ZooModel> model_zoo() {
  std::map<std::string, ZooModel> out;
  for (const auto& n : zoo_names()) out.emplace(n, load_zoo(n));
  return out;
}

}  // namespace ppgsmc::dsl
