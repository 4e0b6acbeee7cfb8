// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include "paralab/cli/run_dir.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "paralab/common/error.hpp"
#include "paralab/common/hash.hpp"

namespace paralab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path create_run_dir(const fs::path& root, std::string_view command) {
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) fail(ErrorCode::Io, "cannot create " + root.string() + ": " + ec.message());
  const std::string prefix = std::string(command) + "-";
  int next = 1;
  for (const auto& entry : fs::directory_iterator(root)) {
    const auto name = entry.path().filename().string();
    if (!name.starts_with(prefix)) continue;
    const auto digits = name.substr(prefix.size());
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) continue;
    next = std::max(next, std::stoi(digits) + 1);
  }
  for (;; ++next) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d", next);
    const fs::path dir = root / (prefix + buf);
    if (fs::create_directory(dir, ec)) return dir;
    if (ec) fail(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
  }
}

json content_hash(const fs::path& path) {
  if (!fs::is_directory(path)) return git_blob_hash_file(path);
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(path)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  json out = json::object();
  for (const auto& f : files) out[f.lexically_relative(path).generic_string()] = git_blob_hash_file(f);
  return out;
}

json output_hashes(const fs::path& dir) {
  json out = content_hash(dir);
  out.erase(std::string(kManifestName));
  return out;
}

json input_hashes(const CommandDef& cmd, const json& config) {
  json out = json::object();
  for (const auto& o : cmd.options) {
    if (!o.input) continue;
    const auto& v = config.at(o.key);
    if (v.is_null()) continue;
    const fs::path p = v.get<std::string>();
    if (!fs::exists(p)) fail(ErrorCode::Io, "--" + o.key + ": " + p.string() + " does not exist");
    out[o.key] = {{"path", p.string()}, {"hash", content_hash(p)}};
  }
  return out;
}

fs::path execute(const CommandDef& cmd, const json& config, std::ostream& log,
                 const json& provenance) {
  const json inputs = input_hashes(cmd, config);
  const fs::path dir = create_run_dir(config.at("out").get<std::string>(), cmd.name);
  RunContext run{dir, log};
  try {
    cmd.execute(config, run);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(dir, ec);
    throw;
  }
  json manifest = {{"tool", "paralab"},
                   {"version", kToolVersion},
                   {"command", cmd.name},
                   {"config", config},
                   {"inputs", inputs},
                   {"outputs", output_hashes(dir)}};
  if (!provenance.is_null()) manifest["replay_of"] = provenance;
  write_file(dir / kManifestName, manifest.dump(2) + "\n");
  log << "run directory: " << dir.string() << "\n";
  return dir;
}

}  // namespace paralab::cli
