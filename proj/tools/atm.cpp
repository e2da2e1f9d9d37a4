// Command-line driver: run scripts on a simulated fabric, evolve relations,
// or check request scripts.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "atm/codec.hpp"
#include "atm/evolution.hpp"
#include "atm/session.hpp"

namespace {

enum Exit { kOk = 0, kInputError = 1, kProtocolError = 2 };

struct Paths {
  std::string dataset;
  std::string script;
  std::string trace = "trace.jsonl";
  std::string metrics = "metrics.json";
  std::string config;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError(path + ": file not found");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

atm::ExtractionPolicy parse_extraction(const std::string& text) {
  if (text == "tags") return atm::ExtractionPolicy::ExplicitTags;
  if (text == "tags+text") return atm::ExtractionPolicy::TagsPlusTextTokens;
  throw UsageError("unknown extraction policy '" + text + "'");
}

struct Flags {
  std::string topology, placement, routing, extraction;
  std::uint64_t seed = 0;
  double theta = 0.25;
  std::uint32_t epochs = 0;
};

/// Config file values first; explicitly passed flags win.
atm::RunConfig resolve(const CLI::App& app, const Flags& f, Paths& paths) {
  atm::RunConfig config;
  std::string placement = "round-robin", routing = "walk", extraction = "tags";
  if (!paths.config.empty()) {
    atm::Json j;
    try {
      j = atm::Json::parse(read_file(paths.config));
    } catch (const atm::Json::exception& e) {
      throw UsageError(paths.config + ": malformed config: " + e.what());
    }
    config.topology = j.value("topology", config.topology);
    placement = j.value("placement", placement);
    routing = j.value("routing", routing);
    extraction = j.value("extraction", extraction);
    config.seed = j.value("seed", config.seed);
    config.theta = j.value("theta", config.theta);
    config.epochs = j.value("epochs", config.epochs);
    paths.dataset = j.value("dataset", paths.dataset);
    paths.script = j.value("script", paths.script);
    paths.trace = j.value("trace", paths.trace);
    paths.metrics = j.value("metrics", paths.metrics);
  }
  auto given = [&](const char* name) { return app.count(name) > 0; };
  if (given("--topology")) config.topology = f.topology;
  if (given("--placement")) placement = f.placement;
  if (given("--routing")) routing = f.routing;
  if (given("--extraction")) extraction = f.extraction;
  if (given("--seed")) config.seed = f.seed;
  if (given("--theta")) config.theta = f.theta;
  if (given("--epochs")) config.epochs = f.epochs;

  auto p = atm::parse_placement(placement);
  if (!p) throw UsageError("unknown placement policy '" + placement + "'");
  config.placement = *p;
  auto r = atm::parse_routing(routing);
  if (!r) throw UsageError("unknown routing policy '" + routing + "'");
  config.routing = *r;
  config.extraction = parse_extraction(extraction);
  atm::Topology::parse(config.topology);
  atm::validate_theta(config.theta);
  return config;
}

void add_common(CLI::App* cmd, Flags& f, Paths& paths) {
  cmd->add_option("--topology", f.topology, "Mesh extent, e.g. 4x4 or 2x2x2");
  cmd->add_option("--placement", f.placement, "round-robin | keyword-hash | affinity");
  cmd->add_option("--routing", f.routing, "walk | flood | multicast");
  cmd->add_option("--extraction", f.extraction, "tags | tags+text");
  cmd->add_option("--dataset", paths.dataset, "JSON Lines dataset");
  cmd->add_option("--seed", f.seed, "Fabric seed");
  cmd->add_option("--theta", f.theta, "Relation similarity threshold in (0,1]");
  cmd->add_option("--epochs", f.epochs, "Gossip epochs");
  cmd->add_option("--metrics", paths.metrics, "Output JSON path");
  cmd->add_option("--config", paths.config, "JSON config file; flags take precedence");
}

/// Parses and compiles a script; prints positioned diagnostics on failure.
bool compile_script(const std::string& path, const std::string& text, std::vector<atm::Request>& out) {
  auto parsed = atm::parse_program(text);
  if (!parsed.ok()) {
    std::cerr << path << ":" << parsed.error->str() << "\n";
    return false;
  }
  atm::RequestCompiler compiler;
  for (const auto& ast : parsed.requests) {
    try {
      out.push_back(compiler.compile(ast));
    } catch (const atm::CompileError& e) {
      std::cerr << path << ":" << e.span().line << ":" << e.span().column << ": " << e.what() << "\n";
      return false;
    }
  }
  return true;
}

/// Registration and placement problems are reported against the dataset.
atm::Fabric load_fabric(const atm::RunConfig& config, const std::string& dataset) {
  auto raw = atm::load_dataset(dataset);
  try {
    return atm::prepare_fabric(config, raw);
  } catch (const atm::RegistrationError& e) {
    throw UsageError(dataset + ": " + e.what());
  } catch (const atm::PlacementError& e) {
    throw UsageError(dataset + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError(path + ": cannot open for writing");
  out << text;
}

int cmd_run(const CLI::App& app, const Flags& f, Paths paths) {
  atm::RunConfig config = resolve(app, f, paths);
  if (paths.dataset.empty()) throw UsageError("--dataset is required");
  if (paths.script.empty()) throw UsageError("--script is required");
  std::string text = read_file(paths.script);
  std::vector<atm::Request> requests;
  if (!compile_script(paths.script, text, requests)) return kInputError;

  atm::Fabric fabric = load_fabric(config, paths.dataset);
  std::vector<atm::RequestEntry> entries;
  std::ostringstream trace;
  for (const auto& request : requests) {
    entries.push_back(atm::execute(fabric, request, config));
    atm::write_trace(trace, entries.back().fabric.trace);
  }
  write_text(paths.trace, trace.str());
  write_text(paths.metrics, atm::metrics_report(config, entries).dump(2) + "\n");
  for (const auto& e : entries) {
    const auto& r = e.fabric.result;
    std::cout << "request " << e.request.id << ": " << atm::to_string(r.status) << " counters=("
              << r.counters.processing << "," << r.counters.rejection << ") payload="
              << atm::to_json(r.payload)["value"].dump() << "\n";
  }
  return kOk;
}

int cmd_evolve(const CLI::App& app, const Flags& f, Paths paths) {
  if (!app.count("--metrics") && paths.config.empty()) paths.metrics = "relations.json";
  atm::RunConfig config = resolve(app, f, paths);
  if (paths.dataset.empty()) throw UsageError("--dataset is required");
  const std::uint32_t epochs = config.epochs;
  config.epochs = 0;
  atm::Fabric fabric = load_fabric(config, paths.dataset);
  auto result = atm::evolve(fabric, config.theta, epochs, config.exec);
  atm::Json out;
  out["topology"] = config.topology;
  out["theta"] = config.theta;
  out["epochs"] = epochs;
  out["edges"] = atm::to_json(result.graph);
  write_text(paths.metrics, out.dump(2) + "\n");
  std::cout << result.graph.edges.size() << " edges after " << epochs << " epochs\n";
  return kOk;
}

int cmd_check(const std::string& path) {
  std::string text = read_file(path);
  std::vector<atm::Request> requests;
  if (!compile_script(path, text, requests)) return kInputError;
  std::cout << requests.size() << " requests\n";
  for (const auto& r : requests) {
    std::cout << "#" << r.id << " " << (r.mode == atm::MatchMode::Any ? "ANY" : "ALL") << " keywords="
              << r.keywords.size() << " conditions=" << r.conditions.size() << " op=" << r.op << ": "
              << r.source_text << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anti-Turing fabric simulator"};
  app.require_subcommand(1);

  Flags run_flags, evolve_flags;
  Paths run_paths, evolve_paths;
  auto* run = app.add_subcommand("run", "Execute a request script on the fabric");
  add_common(run, run_flags, run_paths);
  run->add_option("--script", run_paths.script, "Request script (.atm)");
  run->add_option("--trace", run_paths.trace, "Trace output (JSON Lines)");

  auto* evolve = app.add_subcommand("evolve", "Run relation evolution epochs");
  add_common(evolve, evolve_flags, evolve_paths);

  std::string check_path;
  auto* check = app.add_subcommand("check", "Parse and compile a script");
  check->add_option("script,--script", check_path, "Request script (.atm)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInputError;
  }

  try {
    if (*run) return cmd_run(*run, run_flags, run_paths);
    if (*evolve) return cmd_evolve(*evolve, evolve_flags, evolve_paths);
    if (*check) return cmd_check(check_path);
  } catch (const atm::ProtocolViolation& e) {
    std::cerr << "protocol violation: " << e.what() << "\n";
    return kProtocolError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
