#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qhv/demos.hpp"
#include "qhv/scenario.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qhv::ScenarioError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

qhv::RunOptions options_from_env(std::uint64_t seed) {
  qhv::RunOptions opts;
  opts.seed = seed;
  if (const char* cap = std::getenv("QHV_ATOM_CAP")) {
    try {
      std::size_t pos = 0;
      const unsigned long long value = std::stoull(cap, &pos);
      if (pos != std::string(cap).size() || value == 0) throw std::invalid_argument(cap);
      opts.atom_cap = value;
    } catch (const std::exception&) {
      throw qhv::ScenarioError("QHV_ATOM_CAP must be a positive integer, got '" +
                               std::string(cap) + "'");
    }
  }
  return opts;
}

int run_text(const std::string& text, std::uint64_t seed,
             const std::string& format, const std::string& out_path) {
  const qhv::ScenarioDocument doc = qhv::parse_scenario(text);
  const qhv::ScenarioReport report = qhv::run_scenario(doc, options_from_env(seed));
  const qhv::ReportFormat fmt = format == "csv" ? qhv::ReportFormat::kCsv
                                                : qhv::ReportFormat::kHuman;
  const std::string rendered = qhv::emit_report(report, fmt);
  if (out_path.empty()) {
    std::cout << rendered;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw qhv::ScenarioError("cannot write '" + out_path + "'");
    out << rendered;
  }
  return report.all_pass() ? kExitPass : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Builds signed-measure models of joint projective measurements "
               "on finite observable catalogs and runs their verification "
               "suites from scenario files."};
  app.require_subcommand(1);

  std::string file;
  std::string demo_name;
  std::string format = "human";
  std::string out_path;
  std::uint64_t seed = 0;

  CLI::App* run = app.add_subcommand("run", "Run a scenario file");
  run->add_option("file", file, "Scenario JSON file")->required();
  run->add_option("--seed", seed, "Seed for randomized trials");
  run->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"human", "csv"}));
  run->add_option("--out", out_path, "Write the report to this path");

  CLI::App* validate = app.add_subcommand("validate", "Parse and check a scenario file");
  validate->add_option("file", file, "Scenario JSON file")->required();

  std::string demo_help = "Run a bundled scenario (";
  bool first = true;
  for (const auto& [name, _] : qhv::bundled_scenarios()) {
    if (!first) demo_help += ", ";
    demo_help += name;
    first = false;
  }
  demo_help += ")";
  CLI::App* demo = app.add_subcommand("demo", demo_help);
  demo->add_option("name", demo_name, "Demo name")->required();
  demo->add_option("--seed", seed, "Seed for randomized trials");
  demo->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"human", "csv"}));
  demo->add_option("--out", out_path, "Write the report to this path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (run->parsed()) {
      return run_text(read_file(file), seed, format, out_path);
    }
    if (validate->parsed()) {
      qhv::parse_scenario(read_file(file));
      std::cout << "ok: " << file << "\n";
      return kExitPass;
    }
    const auto& demos = qhv::bundled_scenarios();
    const auto it = demos.find(demo_name);
    if (it == demos.end()) {
      std::cerr << "unknown demo '" << demo_name << "'\n";
      return kExitUsage;
    }
    return run_text(it->second, seed, format, out_path);
  } catch (const qhv::ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
