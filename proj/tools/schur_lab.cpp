#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "schurlab/errors.hpp"
#include "schurlab/io.hpp"
#include "schurlab/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitExpectMismatch = 2;
constexpr int kExitConfig = 64;
constexpr int kExitIo = 74;

struct Flags {
  std::string config;
  std::string out;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string expect;
};

int run(const std::string& command, const Flags& flags) {
  using schurlab::ErrorKind;
  using schurlab::Json;
  Json config;
  try {
    config = Json::parse(schurlab::read_file(flags.config));
  } catch (const Json::parse_error& e) {
    schurlab::fail(ErrorKind::ConfigInvalid, std::string("config is not valid JSON: ") + e.what());
  }
  if (!config.is_object()) schurlab::fail(ErrorKind::ConfigInvalid, "config must be a JSON object");
  if (!config.contains("command")) config["command"] = command;
  if (config.at("command") != command) {
    schurlab::fail(ErrorKind::ConfigInvalid,
                   "config command " + config.at("command").dump() + " does not match '" + command + "'");
  }

  std::string format = flags.format;
  if (format.empty()) format = config.value("format", "json");
  if (format != "json" && command != "norms") {
    schurlab::fail(ErrorKind::ConfigInvalid, "csv and svg output are only available for norms");
  }
  std::string out_path = flags.out;
  if (out_path.empty() && config.contains("output")) out_path = config.at("output").get<std::string>();

  schurlab::RunOptions options;
  options.seed = flags.seed;
  options.jobs = flags.jobs;
  const schurlab::RunResult result = schurlab::run_experiment(config, options);

  std::string text;
  if (format == "csv") {
    text = schurlab::records_to_csv(result.records);
  } else if (format == "svg") {
    text = schurlab::norm_growth_svg(result.records, result.report.at("symbol_id").get<std::string>() +
                                                         ", p = " + result.report.at("p").dump());
  } else {
    text = result.report.dump(2) + "\n";
  }
  if (out_path.empty() || out_path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
  } else {
    schurlab::write_file_atomic(out_path, text);
  }

  if (flags.expect.empty()) return kExitOk;
  const bool expect_pass = flags.expect == "pass";
  if (result.pass != expect_pass) {
    std::cerr << "schur-lab: outcome '" << (result.pass ? "pass" : "fail") << "' differs from --expect "
              << flags.expect << "\n";
    return kExitExpectMismatch;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for idempotent Schur multipliers"};
  app.require_subcommand(1);
  Flags flags;
  const char* commands[][2] = {
      {"classify", "Classify the boundary of a symbol's domain"},
      {"norms", "Estimate multiplier norm lower bounds on growing grids"},
      {"squarefn", "Test the directional square-function inequality"},
      {"cotlar", "Check the pointwise Cotlar identity on a group acting on the line"},
      {"groupcheck", "Codimension-one subalgebra and boundary checks"},
      {"transfer", "Compare Fourier and Schur multiplier bounds on a cyclic group"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "Output path; stdout when omitted");
    sub->add_option("--format", flags.format, "Output format")->check(CLI::IsMember({"json", "csv", "svg"}));
    sub->add_option("--seed", flags.seed, "Override the config seed");
    sub->add_option("--jobs", flags.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--expect", flags.expect, "Exit with 2 unless the outcome matches")
        ->check(CLI::IsMember({"pass", "fail"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, flags);
  } catch (const schurlab::Error& e) {
    std::cerr << "schur-lab: " << e.what() << "\n";
    if (e.kind() == schurlab::ErrorKind::ConfigInvalid) return kExitConfig;
    if (e.kind() == schurlab::ErrorKind::IOError) return kExitIo;
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "schur-lab: " << e.what() << "\n";
    return kExitError;
  }
}
