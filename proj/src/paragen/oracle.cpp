// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include "paralab/paragen/oracle.hpp"

#include <netdb.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "paralab/common/error.hpp"
#include "paralab/paragen/lexicon.hpp"

namespace paralab::paragen {

namespace {

constexpr std::array<std::string_view, 10> kSuffixes = {
    "ment", "tion", "sion", "ance", "ence", "al", "ure", "ity", "ness", "ing"};

constexpr std::array<std::string_view, 15> kDeterminers = {
    "the", "a", "an", "this", "that", "these", "those", "my",
    "your", "his", "her", "its", "our", "their", "whose"};

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool nominal(std::string_view w) {
  return std::any_of(kSuffixes.begin(), kSuffixes.end(),
                     [&](auto suf) { return ends_with(w, suf); });
}

bool determiner(std::string_view w) {
  return std::find(kDeterminers.begin(), kDeterminers.end(), w) != kDeterminers.end();
}

}  // namespace

std::string FallbackOracle::mask_fill_best(std::span<const std::string> /*tokens*/,
                                           std::size_t /*position*/,
                                           std::span<const std::string> candidates) {
  if (candidates.empty()) fail(ErrorCode::Oracle, "no candidates to choose from");
  for (const auto& p : options_.priority) {
    if (std::find(candidates.begin(), candidates.end(), p) != candidates.end()) return p;
  }
  return candidates.front();
}

double FallbackOracle::sentence_logprob(std::span<const std::string> tokens) {
  double lp = -static_cast<double>(tokens.size());
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (nominal(to_lower(tokens[i - 1])) && determiner(to_lower(tokens[i]))) lp -= options_.penalty;
  }
  return lp;
}

nlohmann::json handle_request(Oracle& oracle, const nlohmann::json& request) {
  try {
    if (!request.is_object()) return {{"error", "request must be an object"}};
    const auto op = request.find("op");
    if (op == request.end() || !op->is_string()) return {{"error", "missing op"}};
    const auto tokens_it = request.find("tokens");
    if (tokens_it == request.end() || !tokens_it->is_array()) return {{"error", "missing tokens"}};
    const auto tokens = tokens_it->get<std::vector<std::string>>();
    if (*op == "logprob") {
      const double lp = oracle.sentence_logprob(tokens);
      if (!std::isfinite(lp)) return {{"error", "non-finite score"}};
      return {{"lp", lp}};
    }
    if (*op == "mask_fill") {
      const auto pos = request.find("pos");
      const auto cands = request.find("cands");
      if (pos == request.end() || !pos->is_number_integer() || pos->get<long long>() < 0) {
        return {{"error", "missing pos"}};
      }
      if (cands == request.end() || !cands->is_array() || cands->empty()) {
        return {{"error", "missing cands"}};
      }
      const auto p = pos->get<std::size_t>();
      if (p > tokens.size()) return {{"error", "pos out of range"}};
      const auto c = cands->get<std::vector<std::string>>();
      return {{"choice", oracle.mask_fill_best(tokens, p, c)}};
    }
    return {{"error", "unknown op: " + op->get<std::string>()}};
  } catch (const nlohmann::json::exception& e) {
    return {{"error", std::string("bad request: ") + e.what()}};
  } catch (const std::exception& e) {
    return {{"error", e.what()}};
  }
}

std::string handle_line(Oracle& oracle, std::string_view line) {
  const auto request = nlohmann::json::parse(line, nullptr, false);
  if (request.is_discarded()) return nlohmann::json{{"error", "malformed json"}}.dump();
  return handle_request(oracle, request).dump();
}

void serve(Oracle& oracle, std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out << handle_line(oracle, line) << '\n' << std::flush;
  }
}

namespace {

[[noreturn]] void sys_fail(const std::string& what) {
  fail(ErrorCode::Oracle, what + ": " + std::strerror(errno));
}

int connect_unix(const std::string& path) {
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (path.size() >= sizeof addr.sun_path) fail(ErrorCode::Oracle, "socket path too long");
  std::memcpy(addr.sun_path, path.c_str(), path.size() + 1);
  const int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (fd < 0) sys_fail("socket");
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    ::close(fd);
    sys_fail("connect " + path);
  }
  return fd;
}

int connect_tcp(const std::string& hostport) {
  const auto colon = hostport.rfind(':');
  if (colon == std::string::npos) fail(ErrorCode::Oracle, "tcp endpoint needs host:port");
  const auto host = hostport.substr(0, colon), port = hostport.substr(colon + 1);
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (const int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &res); rc != 0) {
    fail(ErrorCode::Oracle, "resolve " + hostport + ": " + ::gai_strerror(rc));
  }
  int fd = -1;
  for (auto* ai = res; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) sys_fail("connect " + hostport);
  return fd;
}

}  // namespace

ProtocolOracle::ProtocolOracle(std::string_view endpoint) {
  const auto colon = endpoint.find(':');
  if (colon == std::string_view::npos) {
    fail(ErrorCode::Oracle, "oracle endpoint needs a scheme: " + std::string(endpoint));
  }
  const std::string scheme(endpoint.substr(0, colon)), rest(endpoint.substr(colon + 1));
  if (scheme == "unix") {
    read_fd_ = write_fd_ = connect_unix(rest);
  } else if (scheme == "tcp") {
    read_fd_ = write_fd_ = connect_tcp(rest);
  } else if (scheme == "exec") {
    int to_child[2], from_child[2];
    if (::pipe(to_child) != 0) sys_fail("pipe");
    if (::pipe(from_child) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      sys_fail("pipe");
    }
    const pid_t pid = ::fork();
    if (pid < 0) sys_fail("fork");
    if (pid == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::close(to_child[0]);
      ::close(to_child[1]);
      ::close(from_child[0]);
      ::close(from_child[1]);
      ::execl("/bin/sh", "sh", "-c", rest.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    write_fd_ = to_child[1];
    read_fd_ = from_child[0];
    child_ = pid;
  } else {
    fail(ErrorCode::Oracle, "unknown oracle scheme: " + scheme);
  }
}

ProtocolOracle::~ProtocolOracle() {
  if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
  if (read_fd_ >= 0) ::close(read_fd_);
  if (child_ > 0) {
    int status = 0;
    ::waitpid(child_, &status, 0);
  }
}

std::string ProtocolOracle::read_line() {
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    char chunk[4096];
    const ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n < 0) sys_fail("oracle read");
    if (n == 0) fail(ErrorCode::Oracle, "oracle closed the connection");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

nlohmann::json ProtocolOracle::call(const nlohmann::json& request) {
  const std::string line = request.dump() + "\n";
  struct sigaction ignore {}, old {};
  ignore.sa_handler = SIG_IGN;
  ::sigaction(SIGPIPE, &ignore, &old);
  std::size_t sent = 0;
  while (sent < line.size()) {
    const ssize_t n = ::write(write_fd_, line.data() + sent, line.size() - sent);
    if (n < 0 && errno == EINTR) continue;
    if (n < 0) {
      ::sigaction(SIGPIPE, &old, nullptr);
      sys_fail("oracle write");
    }
    sent += static_cast<std::size_t>(n);
  }
  ::sigaction(SIGPIPE, &old, nullptr);
  auto reply = nlohmann::json::parse(read_line(), nullptr, false);
  if (reply.is_discarded() || !reply.is_object()) fail(ErrorCode::Oracle, "malformed oracle reply");
  if (reply.contains("error")) fail(ErrorCode::Oracle, "oracle error: " + reply["error"].dump());
  return reply;
}

std::string ProtocolOracle::mask_fill_best(std::span<const std::string> tokens,
                                           std::size_t position,
                                           std::span<const std::string> candidates) {
  const auto reply = call({{"op", "mask_fill"},
                           {"tokens", std::vector<std::string>(tokens.begin(), tokens.end())},
                           {"pos", position},
                           {"cands", std::vector<std::string>(candidates.begin(), candidates.end())}});
  const auto it = reply.find("choice");
  if (it == reply.end() || !it->is_string()) fail(ErrorCode::Oracle, "reply lacks a choice");
  auto choice = it->get<std::string>();
  if (std::find(candidates.begin(), candidates.end(), choice) == candidates.end()) {
    fail(ErrorCode::Oracle, "oracle chose a non-candidate: " + choice);
  }
  return choice;
}

double ProtocolOracle::sentence_logprob(std::span<const std::string> tokens) {
  const auto reply =
      call({{"op", "logprob"}, {"tokens", std::vector<std::string>(tokens.begin(), tokens.end())}});
  const auto it = reply.find("lp");
  if (it == reply.end() || !it->is_number()) fail(ErrorCode::Oracle, "reply lacks lp");
  const double lp = it->get<double>();
  if (!std::isfinite(lp)) fail(ErrorCode::Oracle, "non-finite lp");
  return lp;
}

std::unique_ptr<Oracle> make_oracle(std::string_view spec) {
  if (spec.empty() || spec == "fallback") return std::make_unique<FallbackOracle>();
  if (spec == "fallback:length") {
    FallbackOracle::Options options;
    options.penalty = 0.0;
    return std::make_unique<FallbackOracle>(std::move(options));
  }
  return std::make_unique<ProtocolOracle>(spec);
}

}  // namespace paralab::paragen
