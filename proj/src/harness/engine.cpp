#include "fraggen/harness/engine.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fraggen/errors.hpp"

namespace fraggen::harness {

namespace {

std::string substitute(std::string s, const std::string& test, const std::string& binary) {
  for (const auto& [from, to] : {std::pair<std::string, std::string>{"{test}", test},
                                 std::pair<std::string, std::string>{"{binary}", binary}}) {
    for (std::size_t at = s.find(from); at != std::string::npos; at = s.find(from, at + to.size())) {
      s.replace(at, from.size(), to);
    }
  }
  return s;
}

std::string last_line(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::string last;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) last = line;
  }
  return last;
}

std::string first_line(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) return line;
  }
  return {};
}

void append_capped(std::string& out, const char* data, std::size_t n) {
  if (out.size() < kStderrCap) out.append(data, std::min(n, kStderrCap - out.size()));
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_string(OutcomeClass c) {
  switch (c) {
    case OutcomeClass::Pass: return "pass";
    case OutcomeClass::RuntimeError: return "runtime_error";
    case OutcomeClass::Crash: return "crash";
    case OutcomeClass::Timeout: return "timeout";
    case OutcomeClass::Other: return "other";
  }
  return "other";
}

std::string signal_name(int sig) {
  switch (sig) {
    case SIGSEGV: return "SIGSEGV";
    case SIGILL: return "SIGILL";
    case SIGABRT: return "SIGABRT";
    case SIGKILL: return "SIGKILL";
    case SIGBUS: return "SIGBUS";
    case SIGFPE: return "SIGFPE";
    case SIGTERM: return "SIGTERM";
    case SIGTRAP: return "SIGTRAP";
    default: return "SIG" + std::to_string(sig);
  }
}

void EngineConfig::validate() const {
  if (binary.empty()) throw ConfigError("engine binary not set");
  if (access(binary.c_str(), X_OK) != 0) {
    throw EngineUnavailable("engine binary is not executable: " + binary);
  }
  if (!(timeout_seconds > 0)) throw ConfigError("timeout must be positive");
}

EngineConfig EngineConfig::from_json(const nlohmann::json& j) {
  EngineConfig c;
  try {
    c.binary = j.at("binary").get<std::string>();
    if (j.contains("args")) c.args = j["args"].get<std::vector<std::string>>();
    c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
    if (j.contains("env")) c.env = j["env"].get<std::map<std::string, std::string>>();
    if (j.contains("error_patterns")) {
      c.error_patterns = j["error_patterns"].get<std::vector<std::string>>();
    }
    if (j.contains("extractor")) c.extractor = j["extractor"].get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad engine config: ") + e.what());
  }
  return c;
}

nlohmann::json EngineConfig::to_json() const {
  return {{"binary", binary},
          {"args", args},
          {"timeout_seconds", timeout_seconds},
          {"env", env},
          {"error_patterns", error_patterns},
          {"extractor", extractor}};
}

ExecutionOutcome run_process(const std::vector<std::string>& argv, double timeout_seconds,
                             const std::map<std::string, std::string>& env,
                             std::string* stdout_text) {
  if (argv.empty()) throw EngineUnavailable("empty command");
  int err_pipe[2];
  int out_pipe[2];
  int exec_pipe[2];
  if (pipe2(err_pipe, O_CLOEXEC) != 0 || pipe2(out_pipe, O_CLOEXEC) != 0 ||
      pipe2(exec_pipe, O_CLOEXEC) != 0) {
    throw EngineUnavailable(std::string("pipe: ") + std::strerror(errno));
  }
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  const auto start = std::chrono::steady_clock::now();
  const pid_t pid = fork();
  if (pid < 0) throw EngineUnavailable(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    setpgid(0, 0);
    const int devnull = open("/dev/null", O_RDWR);
    dup2(devnull, STDIN_FILENO);
    dup2(stdout_text ? out_pipe[1] : devnull, STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    for (const auto& [k, v] : env) setenv(k.c_str(), v.c_str(), 1);
    execvp(args[0], args.data());
    const int e = errno;
    (void)!write(exec_pipe[1], &e, sizeof e);
    _exit(127);
  }
  setpgid(pid, pid);
  close(err_pipe[1]);
  close(out_pipe[1]);
  close(exec_pipe[1]);

  int child_errno = 0;
  const bool exec_failed = read(exec_pipe[0], &child_errno, sizeof child_errno) == sizeof child_errno;
  close(exec_pipe[0]);
  if (exec_failed) {
    waitpid(pid, nullptr, 0);
    close(err_pipe[0]);
    close(out_pipe[0]);
    throw EngineUnavailable("cannot execute " + argv[0] + ": " + std::strerror(child_errno));
  }

  ExecutionOutcome out;
  std::string captured_out;
  const auto deadline = start + std::chrono::duration<double>(timeout_seconds);
  pollfd fds[2] = {{err_pipe[0], POLLIN, 0}, {out_pipe[0], POLLIN, 0}};
  int open_fds = 2;
  char buf[8192];
  int status = 0;
  bool reaped = false;
  while (true) {
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      out.timed_out = true;
      kill(-pid, SIGKILL);
      break;
    }
    if (open_fds == 0) {
      // Output closed; wait for exit while honoring the deadline.
      const pid_t r = waitpid(pid, &status, WNOHANG);
      if (r == pid) {
        reaped = true;
        break;
      }
      usleep(2000);
      continue;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
    const int ready = poll(fds, 2, static_cast<int>(std::min<long long>(left + 1, 50)));
    if (ready < 0 && errno != EINTR) break;
    for (int i = 0; i < 2; ++i) {
      if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      const ssize_t n = read(fds[i].fd, buf, sizeof buf);
      if (n > 0) {
        append_capped(i == 0 ? out.stderr_text : captured_out, buf, static_cast<std::size_t>(n));
      } else {
        close(fds[i].fd);
        fds[i].fd = -1;
        --open_fds;
      }
    }
  }
  for (auto& f : fds) {
    if (f.fd >= 0) close(f.fd);
  }
  if (!reaped) waitpid(pid, &status, 0);
  // Stray members of the group (e.g. a shell's children) do not outlive us.
  kill(-pid, SIGKILL);
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!out.timed_out) {
    if (WIFSIGNALED(status)) {
      out.signal = WTERMSIG(status);
    } else if (WIFEXITED(status)) {
      out.exit_code = WEXITSTATUS(status);
    }
  }
  if (stdout_text) *stdout_text = std::move(captured_out);
  return out;
}

ExecutionOutcome execute(const EngineConfig& cfg, const std::string& source,
                         const std::filesystem::path& scratch) {
  std::filesystem::create_directories(scratch);
  const auto test = scratch / "test.js";
  {
    std::ofstream f(test, std::ios::binary | std::ios::trunc);
    f << source;
    if (!f) throw Error("cannot write " + test.string());
  }
  std::vector<std::string> argv{cfg.binary};
  for (const auto& a : cfg.args) argv.push_back(substitute(a, test.string(), cfg.binary));
  return run_process(argv, cfg.timeout_seconds, cfg.env);
}

Classification classify(const ExecutionOutcome& o, const EngineConfig& cfg) {
  if (o.timed_out) return {OutcomeClass::Timeout, {}};
  if (o.signal) {
    const int s = *o.signal;
    if (s == SIGSEGV || s == SIGILL) return {OutcomeClass::Crash, signal_name(s)};
    return {OutcomeClass::Other, signal_name(s)};
  }
  if (o.exit_code && *o.exit_code == 0) return {OutcomeClass::Pass, {}};
  // Earliest match in stderr wins, so a wrapped error reports its own name.
  std::size_t best = std::string::npos;
  std::string name;
  for (const auto& p : cfg.error_patterns) {
    const auto at = o.stderr_text.find(p);
    if (at != std::string::npos && at < best) {
      best = at;
      name = p;
    }
  }
  if (!name.empty()) return {OutcomeClass::RuntimeError, name};
  return {OutcomeClass::Other, o.exit_code ? "exit " + std::to_string(*o.exit_code) : ""};
}

std::string dedup_key(const ExecutionOutcome& o, const EngineConfig& cfg,
                      const std::filesystem::path& test_file) {
  const std::string sig = o.signal ? signal_name(*o.signal) : "NOSIGNAL";
  std::string basis;
  if (!cfg.extractor.empty()) {
    std::vector<std::string> argv;
    for (const auto& a : cfg.extractor) argv.push_back(substitute(a, test_file.string(), cfg.binary));
    try {
      std::string text;
      auto r = run_process(argv, std::max(cfg.timeout_seconds, 10.0), cfg.env, &text);
      if (r.exit_code && *r.exit_code == 0) basis = first_line(text);
      if (!basis.empty()) basis = "frame:" + basis;
    } catch (const EngineUnavailable&) {
      basis.clear();
    }
  }
  if (basis.empty()) basis = "stderr:" + last_line(o.stderr_text);
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(basis)));
  return sig + "-" + hex;
}

}  // namespace fraggen::harness
