#include <doctest.h>

#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <sstream>
#include <thread>

#include "paralab/common/error.hpp"
#include "paralab/paragen/oracle.hpp"

using namespace paralab::paragen;
using nlohmann::json;
using paralab::ErrorCode;

namespace {

// Accepts one connection and answers requests with the fallback oracle.
void serve_fd(int listener) {
  const int fd = ::accept(listener, nullptr, nullptr);
  ::close(listener);
  if (fd < 0) return;
  FallbackOracle oracle;
  std::string buf;
  char chunk[512];
  for (;;) {
    const ssize_t n = ::read(fd, chunk, sizeof chunk);
    if (n <= 0) break;
    buf.append(chunk, static_cast<std::size_t>(n));
    for (auto nl = buf.find('\n'); nl != std::string::npos; nl = buf.find('\n')) {
      const std::string reply = handle_line(oracle, buf.substr(0, nl)) + "\n";
      buf.erase(0, nl + 1);
      if (::write(fd, reply.data(), reply.size()) < 0) break;
    }
  }
  ::close(fd);
}

void exercise(Oracle& o) {
  std::vector<std::string> tokens = {"she", "left", "the", "party"};
  std::vector<std::string> cands = {"during", "upon"};
  CHECK(o.mask_fill_best(tokens, 1, cands) == "upon");
  CHECK(o.sentence_logprob(tokens) == -4.0);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const paralab::Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("request handler") {
  FallbackOracle o;
  CHECK(handle_request(o, {{"op", "mask_fill"}, {"tokens", {"a"}}, {"pos", 0},
                           {"cands", {"x", "of"}}}) == json{{"choice", "of"}});
  CHECK(handle_request(o, {{"op", "mask_fill"}, {"tokens", {"a"}}, {"pos", 0}, {"cands", {"x"}}}) ==
        json{{"choice", "x"}});
  CHECK(handle_request(o, {{"op", "logprob"}, {"tokens", {"a", "b"}}}) == json{{"lp", -2.0}});
  CHECK(handle_request(o, {{"op", "logprob"}}).contains("error"));
  CHECK(handle_request(o, {{"op", "fly"}, {"tokens", json::array()}}).contains("error"));
  CHECK(handle_request(o, {{"op", "mask_fill"}, {"tokens", {"a"}}, {"pos", 5}, {"cands", {"x"}}})
            .contains("error"));
  CHECK(handle_request(o, {{"op", "mask_fill"}, {"tokens", {"a"}}, {"pos", 0}, {"cands", json::array()}})
            .contains("error"));
  CHECK(handle_request(o, {{"op", "logprob"}, {"tokens", {1, 2}}}).contains("error"));
  CHECK(handle_request(o, json::array()).contains("error"));
  CHECK(json::parse(handle_line(o, "{oops")).contains("error"));
}

TEST_CASE("single-candidate identity and determinism over the handler") {
  FallbackOracle o;
  const json req = {{"op", "mask_fill"}, {"tokens", {"he", "came"}}, {"pos", 1}, {"cands", {"then"}}};
  CHECK(handle_request(o, req)["choice"] == "then");
  CHECK(handle_request(o, req) == handle_request(o, req));
}

TEST_CASE("serve answers line by line") {
  FallbackOracle o;
  std::istringstream in(R"({"op":"logprob","tokens":["a"]})" "\n\n" R"({"op":"x","tokens":[]})" "\n");
  std::ostringstream out;
  serve(o, in, out);
  std::istringstream lines(out.str());
  std::string l1, l2, l3;
  std::getline(lines, l1);
  std::getline(lines, l2);
  CHECK(json::parse(l1) == json{{"lp", -1.0}});
  CHECK(json::parse(l2).contains("error"));
  CHECK_FALSE(std::getline(lines, l3));
}

TEST_CASE("exec transport") {
  ProtocolOracle o(std::string("exec:") + FAKE_ORACLE);
  exercise(o);
  exercise(o);
}

TEST_CASE("exec transport rejects out-of-set answers and dead peers") {
  ProtocolOracle rogue(std::string("exec:") + FAKE_ORACLE + " --rogue");
  std::vector<std::string> tokens = {"a"}, cands = {"x", "y"};
  CHECK(code_of([&] { rogue.mask_fill_best(tokens, 0, cands); }) == ErrorCode::Oracle);
  ProtocolOracle dead("exec:true");
  CHECK(code_of([&] { dead.sentence_logprob(tokens); }) == ErrorCode::Oracle);
}

TEST_CASE("unix socket transport") {
  const std::string path = "/tmp/paralab-oracle-" + std::to_string(::getpid()) + ".sock";
  ::unlink(path.c_str());
  const int listener = ::socket(AF_UNIX, SOCK_STREAM, 0);
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  std::strcpy(addr.sun_path, path.c_str());
  REQUIRE(::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
  REQUIRE(::listen(listener, 1) == 0);
  std::thread server(serve_fd, listener);
  {
    ProtocolOracle o("unix:" + path);
    exercise(o);
  }
  server.join();
  ::unlink(path.c_str());
}

TEST_CASE("tcp transport") {
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  REQUIRE(::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
  socklen_t len = sizeof addr;
  REQUIRE(::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len) == 0);
  REQUIRE(::listen(listener, 1) == 0);
  std::thread server(serve_fd, listener);
  {
    ProtocolOracle o("tcp:127.0.0.1:" + std::to_string(ntohs(addr.sin_port)));
    exercise(o);
  }
  server.join();
}

TEST_CASE("bad endpoints") {
  CHECK(code_of([] { ProtocolOracle o("nowhere"); }) == ErrorCode::Oracle);
  CHECK(code_of([] { ProtocolOracle o("ftp:x"); }) == ErrorCode::Oracle);
  CHECK(code_of([] { ProtocolOracle o("unix:/nonexistent/sock"); }) == ErrorCode::Oracle);
  CHECK(dynamic_cast<FallbackOracle*>(make_oracle("fallback").get()) != nullptr);
  CHECK(dynamic_cast<FallbackOracle*>(make_oracle("fallback:length").get())->options().penalty == 0.0);
}
