// Fake engine for harness tests: fraggen-stub-engine <mode> [test.js]
//   ok       exit 0
//   error    "TypeError: v0 is not a function" on stderr, exit 3
//   exit     exit 4 with no recognizable error
//   segv     SIGSEGV after printing frame "a"; segv-b prints frame "b"
//   ill      SIGILL
//   abort    SIGABRT
//   sleep    sleeps far past any timeout
//   content  behaves per the test's first line: crash[:<tag>], error, hang, else ok
//   frame    prints the top frame a debugger would report for `content` crashes

#include <csignal>
#include <cstdio>
#include <fstream>
#include <string>

#include <unistd.h>

namespace {

std::string first_line(const char* path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  return line;
}

[[noreturn]] void die(int sig, const std::string& frame) {
  std::fprintf(stderr, "stub engine: fatal in %s\n", frame.c_str());
  std::fflush(stderr);
  std::signal(sig, SIG_DFL);
  std::raise(sig);
  _exit(99);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <mode> [test]\n", argv[0]);
    return 64;
  }
  const std::string mode = argv[1];
  const char* test = argc > 2 ? argv[2] : "";
  if (mode == "ok") return 0;
  if (mode == "error") {
    std::fprintf(stderr, "test.js:1\nTypeError: v0 is not a function\n");
    return 3;
  }
  if (mode == "exit") {
    std::fprintf(stderr, "bye\n");
    return 4;
  }
  if (mode == "segv") die(SIGSEGV, "a");
  if (mode == "segv-b") die(SIGSEGV, "b");
  if (mode == "ill") die(SIGILL, "a");
  if (mode == "abort") die(SIGABRT, "a");
  if (mode == "sleep") {
    for (;;) pause();
  }
  const std::string line = first_line(test);
  if (mode == "frame") {
    if (line.rfind("// crash", 0) != 0) return 1;
    std::printf("0x%zx frame_%s\n", std::hash<std::string>{}(line) & 0xffff, line.c_str() + 3);
    return 0;
  }
  if (mode == "content") {
    if (line.rfind("// crash", 0) == 0) die(SIGSEGV, std::to_string(getpid()));
    if (line.rfind("// error", 0) == 0) {
      std::fprintf(stderr, "ReferenceError: v9 is not defined\n");
      return 1;
    }
    if (line.rfind("// hang", 0) == 0) {
      for (;;) pause();
    }
    return 0;
  }
  std::fprintf(stderr, "unknown mode %s\n", mode.c_str());
  return 64;
}
