// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

// sbora <gradcheck|train|bench|merge|quantize> [--config FILE] [--key value ...]
//
// Settings come from the command's defaults, then the key=value config file,
// then the flags. Exit codes: 0 ok, 1 check failed, 2 usage or config error.

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>

#include "sbora/commands.hpp"
#include "sbora/errors.hpp"
#include "sbora/report.hpp"

namespace {

using namespace sbora::cli;

struct Command {
  const char* name;
  const char* help;
  std::vector<KeySpec> (*schema)();
  int (*run)(const RunConfig&, std::ostream&, std::ostream&);
};

const Command kCommands[] = {
    {"gradcheck", "finite-difference check of adapter gradients", gradcheck_schema, run_gradcheck},
    {"train", "train an adapter on a synthetic teacher-student task", train_schema, run_train},
    {"bench", "sweep analytic and instrumented operation counts", bench_schema, run_bench},
    {"merge", "merge adapter checkpoints into the base weights", merge_schema, run_merge},
    {"quantize", "NF4-quantize a base checkpoint", quantize_schema, run_quantize},
};

struct Parsed {
  std::string config_path;
  std::map<std::string, std::string> flags;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sbora: sampling-based low-rank adapters"};
  app.require_subcommand(1);
  std::map<std::string, Parsed> parsed;
  std::map<std::string, CLI::App*> subs;
  for (const auto& cmd : kCommands) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    auto& p = parsed[cmd.name];
    sub->add_option("--config", p.config_path, "key=value settings file");
    for (const auto& key : cmd.schema()) {
      auto desc = key.help + " (default: " + (key.fallback.empty() ? "none" : key.fallback) + ")";
      sub->add_option_function<std::string>(
          "--" + key.name, [&p, name = key.name](const std::string& v) { p.flags[name] = v; }, desc);
    }
    subs[cmd.name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    (void)app.exit(e);
    return kExitUsage;
  }

  for (const auto& cmd : kCommands) {
    if (!subs[cmd.name]->parsed()) continue;
    const auto& p = parsed[cmd.name];
    try {
      RunConfig cfg(cmd.name, cmd.schema());
      if (!p.config_path.empty()) cfg.load_file(p.config_path);
      for (const auto& [key, value] : p.flags) cfg.set(key, value);
      return cmd.run(cfg, std::cout, std::cerr);
    } catch (const ConfigError& e) {
      std::cerr << "sbora " << cmd.name << ": " << e.what() << "\n";
      return kExitUsage;
    } catch (const std::exception& e) {
      std::cerr << "sbora " << cmd.name << ": " << e.what() << "\n";
      return kExitFailed;
    }
  }
  return kExitUsage;
}
