// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include "paralab/cli/cli.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <ostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "paralab/cli/run_dir.hpp"
#include "paralab/common/error.hpp"
#include "paralab/common/hash.hpp"

namespace paralab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

OptionDef out_option() {
  return OptionDef{"out", OptionType::Path, "runs", "root directory for run directories"};
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    fail(ErrorCode::MalformedJson, path.string() + ": " + e.what());
  }
}

std::string type_name(OptionType t) {
  switch (t) {
    case OptionType::Path: return "PATH";
    case OptionType::Int: return "INT";
    case OptionType::Double: return "NUM";
    case OptionType::StringList: return "TEXT,...";
    case OptionType::IntList: return "INT,...";
    default: return "TEXT";
  }
}

struct Bound {
  const CommandDef* cmd = nullptr;
  CLI::App* app = nullptr;
  std::string config_file;
  std::map<std::string, std::vector<std::string>> raw;
  std::map<std::string, bool> flags;
  std::map<std::string, CLI::Option*> options;
};

void bind(CLI::App& app, Bound& b) {
  app.add_option("--config", b.config_file, "JSON file whose keys mirror the flags");
  for (const auto& o : b.cmd->options) {
    const std::string flag = "--" + o.key;
    CLI::Option* opt = nullptr;
    if (o.type == OptionType::Bool) {
      opt = app.add_flag(flag, b.flags[o.key], o.help);
    } else if (o.type == OptionType::StringList || o.type == OptionType::IntList) {
      opt = app.add_option(flag, b.raw[o.key], o.help)->delimiter(',')->expected(1, -1);
    } else {
      opt = app.add_option(flag, b.raw[o.key], o.help)->expected(1)->multi_option_policy(
          CLI::MultiOptionPolicy::TakeLast);
    }
    if (o.type != OptionType::Bool) opt->type_name(type_name(o.type));
    if (o.required) opt->description(o.help + " (required)");
    b.options[o.key] = opt;
  }
}

json resolve(const Bound& b) {
  json config = json::object();
  json defaults = json::object();
  for (const auto& o : b.cmd->options) {
    config[o.key] = nullptr;
    if (!o.fallback.is_null()) defaults[o.key] = o.fallback;
  }
  const fs::path cwd = fs::current_path();
  merge_config(*b.cmd, config, defaults, cwd);
  if (!b.config_file.empty()) {
    const fs::path file = fs::absolute(b.config_file);
    merge_config(*b.cmd, config, read_json(file), file.parent_path());
  }
  json flags = json::object();
  for (const auto& o : b.cmd->options) {
    if (b.options.at(o.key)->count() == 0) continue;
    flags[o.key] = parse_flag(o, o.type == OptionType::Bool ? std::vector<std::string>{}
                                                            : b.raw.at(o.key));
  }
  merge_config(*b.cmd, config, flags, cwd);
  check_required(*b.cmd, config);
  return config;
}

std::vector<CommandDef> build_commands() {
  std::vector<CommandDef> cmds = {gen_paraphrases_command(), train_toy_command(),
                                  dump_activations_command(), correlate_command(),
                                  manipulate_command(),       erase_command(),
                                  overlap_command(),          evaluate_command(),
                                  plot_command()};
  for (auto& c : cmds) c.options.push_back(out_option());
  return cmds;
}

void error_line(std::ostream& err, std::string_view code, std::string_view message) {
  err << json{{"error", code}, {"message", message}}.dump() << "\n";
}

}  // namespace

const std::vector<CommandDef>& commands() {
  static const std::vector<CommandDef> cmds = build_commands();
  return cmds;
}

const CommandDef* find_command(std::string_view name) {
  for (const auto& c : commands()) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

fs::path replay(const fs::path& manifest_path, const fs::path& out_root, std::ostream& log) {
  const json manifest = read_json(manifest_path);
  if (!manifest.is_object() || !manifest.contains("command") || !manifest.contains("config")) {
    fail(ErrorCode::InvalidArgument, manifest_path.string() + " is not a run manifest");
  }
  const auto* cmd = find_command(manifest.at("command").get<std::string>());
  if (!cmd) fail(ErrorCode::InvalidArgument, "unknown command in manifest");
  json config = default_config(*cmd);
  merge_config(*cmd, config, manifest.at("config"), fs::absolute(manifest_path).parent_path());
  if (!out_root.empty()) config["out"] = fs::absolute(out_root).lexically_normal().string();

  const json recorded = manifest.value("inputs", json::object());
  const json current = input_hashes(*cmd, config);
  for (const auto& [key, entry] : recorded.items()) {
    if (!current.contains(key) || current.at(key).at("hash") != entry.at("hash")) {
      fail(ErrorCode::InputChanged, "input --" + key + " (" + entry.value("path", "") +
                                        ") no longer matches the manifest");
    }
  }

  const fs::path dir =
      execute(*cmd, config, log, fs::absolute(manifest_path).lexically_normal().string());
  const json outputs = output_hashes(dir);
  std::vector<std::string> differing;
  std::size_t compared = 0;
  const json original = manifest.value("outputs", json::object());
  for (const auto& [name, hash] : original.items()) {
    if (!name.ends_with(".csv")) continue;
    ++compared;
    if (!outputs.contains(name) || outputs.at(name) != hash) differing.push_back(name);
  }
  if (!differing.empty()) {
    std::string names;
    for (const auto& n : differing) names += (names.empty() ? "" : ", ") + n;
    fail(ErrorCode::ReplayMismatch, "replayed CSV outputs differ: " + names);
  }
  log << compared << " CSV outputs byte-identical\n";
  return dir;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"paraphrase-pair neuron analysis toolkit", "paralab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::vector<std::unique_ptr<Bound>> bound;
  for (const auto& c : commands()) {
    auto b = std::make_unique<Bound>();
    b->cmd = &c;
    b->app = app.add_subcommand(c.name, c.help);
    bind(*b->app, *b);
    bound.push_back(std::move(b));
  }
  std::string manifest, replay_out;
  auto* replay_app = app.add_subcommand("replay", "rerun a manifest and compare its CSV outputs");
  replay_app->add_option("--manifest", manifest, "manifest.json of an earlier run")->required();
  replay_app->add_option("--out", replay_out, "root for the new run directory");

  auto usage = [&]() -> std::string {
    for (auto* sub : app.get_subcommands()) return sub->help();
    return app.help();
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << usage();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    error_line(err, "Usage", e.what());
    out << usage();
    return kExitUsage;
  }

  try {
    if (replay_app->parsed()) {
      replay(manifest, replay_out, out);
      return 0;
    }
    for (const auto& b : bound) {
      if (b->app->parsed()) {
        execute(*b->cmd, resolve(*b), out);
        return 0;
      }
    }
  } catch (const Error& e) {
    error_line(err, to_string(e.code()), e.what());
    if (e.code() == ErrorCode::Usage) {
      out << usage();
      return kExitUsage;
    }
    return kExitError;
  } catch (const std::exception& e) {
    error_line(err, "Internal", e.what());
    return kExitError;
  }
  return kExitError;
}

}  // namespace paralab::cli
