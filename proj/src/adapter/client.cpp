#include "fraggen/adapter/client.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <sstream>

#include "fraggen/errors.hpp"
#include "fraggen/estree/json_codec.hpp"

namespace fraggen::adapter {

std::vector<std::string> Client::split_command(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string word;
  while (in >> word) out.push_back(word);
  return out;
}

Client::Client(std::vector<std::string> command) {
  if (command.empty()) throw AdapterError("empty adapter command");
  // A dead service must surface as an error reply, not kill us.
  signal(SIGPIPE, SIG_IGN);
  int in_pipe[2];
  int out_pipe[2];
  int exec_pipe[2];
  if (pipe2(in_pipe, O_CLOEXEC) != 0 || pipe2(out_pipe, O_CLOEXEC) != 0 ||
      pipe2(exec_pipe, O_CLOEXEC) != 0) {
    throw AdapterError(std::string("pipe: ") + std::strerror(errno));
  }
  std::vector<char*> argv;
  for (auto& a : command) argv.push_back(a.data());
  argv.push_back(nullptr);
  pid_ = fork();
  if (pid_ < 0) throw AdapterError(std::string("fork: ") + std::strerror(errno));
  if (pid_ == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    execvp(argv[0], argv.data());
    const int e = errno;
    (void)!write(exec_pipe[1], &e, sizeof e);
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  close(exec_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  int child_errno = 0;
  const bool failed = read(exec_pipe[0], &child_errno, sizeof child_errno) == sizeof child_errno;
  close(exec_pipe[0]);
  if (failed) {
    close(to_child_);
    close(from_child_);
    waitpid(pid_, nullptr, 0);
    throw AdapterError("cannot start adapter " + command[0] + ": " + std::strerror(child_errno));
  }
}

Client::~Client() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (pid_ > 0) {
    // Closing stdin ends a well-behaved service; give it a moment.
    for (int i = 0; i < 50; ++i) {
      if (waitpid(pid_, nullptr, WNOHANG) == pid_) return;
      usleep(10000);
    }
    kill(pid_, SIGKILL);
    waitpid(pid_, nullptr, 0);
  }
}

std::string Client::read_line() {
  while (true) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    char buf[65536];
    const ssize_t n = read(from_child_, buf, sizeof buf);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw AdapterError("adapter closed its output");
    buffer_.append(buf, static_cast<std::size_t>(n));
  }
}

nlohmann::json Client::request(nlohmann::json body) {
  const auto id = next_id_++;
  body["id"] = id;
  std::string line = body.dump() + "\n";
  for (std::size_t off = 0; off < line.size();) {
    const ssize_t n = write(to_child_, line.data() + off, line.size() - off);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw AdapterError("adapter closed its input");
    off += static_cast<std::size_t>(n);
  }
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(read_line());
  } catch (const nlohmann::json::parse_error& e) {
    throw AdapterError(std::string("adapter sent malformed JSON: ") + e.what());
  }
  if (!reply.is_object() || !reply.contains("id") || reply["id"] != id ||
      !reply.contains("ok") || !reply["ok"].is_boolean()) {
    throw AdapterError("adapter reply out of protocol: " + reply.dump());
  }
  return reply;
}

namespace {

ParseError error_of(const nlohmann::json& reply) {
  ParseError e;
  const auto& err = reply.contains("error") ? reply["error"] : nlohmann::json::object();
  e.kind = err.value("kind", "unknown");
  e.message = err.value("message", "");
  if (err.contains("line") && err["line"].is_number_integer()) e.line = err["line"].get<int>();
  if (err.contains("col") && err["col"].is_number_integer()) e.col = err["col"].get<int>();
  return e;
}

}  // namespace

ParseResult Client::parse(const std::string& source) {
  auto reply = request({{"op", "parse"}, {"source", source}});
  ParseResult out;
  if (!reply["ok"].get<bool>()) {
    out.error = error_of(reply);
    return out;
  }
  if (!reply.contains("ast")) throw AdapterError("parse reply without an ast");
  try {
    out.ast = estree::decode_ast_json(reply["ast"]);
  } catch (const Error& e) {
    out.error = {"unsupported", e.what(), std::nullopt, std::nullopt};
  }
  return out;
}

std::string Client::print(const estree::AstNode& ast) {
  auto reply = request({{"op", "print"}, {"ast", estree::encode_ast_json(ast)}});
  if (!reply["ok"].get<bool>()) {
    const auto e = error_of(reply);
    throw AdapterError("adapter could not print: " + e.kind + ": " + e.message);
  }
  if (!reply.contains("source") || !reply["source"].is_string()) {
    throw AdapterError("print reply without source");
  }
  return reply["source"].get<std::string>();
}

}  // namespace fraggen::adapter
