#include "tuner/subprocess.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <regex>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

extern char **environ;

namespace tuner {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

void replace_all(std::string &s, std::string_view from, const std::string &to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos;
       pos += to.size())
    s.replace(pos, from.size(), to);
}

std::string first_word(const std::string &command) {
  std::istringstream in(command);
  std::string word;
  in >> word;
  return word;
}

bool executable(const std::string &path) {
  struct stat st {};
  return ::stat(path.c_str(), &st) == 0 && S_ISREG(st.st_mode) &&
         ::access(path.c_str(), X_OK) == 0;
}

void kill_group(pid_t pid) {
  ::kill(-pid, SIGKILL);
  ::kill(pid, SIGKILL);
}

std::string describe_status(int status) {
  if (WIFEXITED(status))
    return "exit status " + std::to_string(WEXITSTATUS(status));
  if (WIFSIGNALED(status))
    return "killed by signal " + std::to_string(WTERMSIG(status));
  return "abnormal termination";
}

} // namespace

std::string shell_quote(const std::string &s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out.push_back(c);
  }
  return out + "'";
}

std::string fnv1a_hex(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

extraction_result extract_alarms(const std::string &output, const adapter_config &cfg) {
  const std::regex pattern(cfg.alarm_pattern, std::regex::ECMAScript);
  extraction_result result;
  std::istringstream in(output);
  std::string line;
  while (std::getline(in, line)) {
    std::smatch m;
    if (!std::regex_search(line, m, pattern))
      continue;
    std::string id;
    bool anomaly = false;
    const std::size_t groups = m.size() > 1 ? m.size() - 1 : 0;
    for (std::size_t g = 1; g <= groups; ++g) {
      std::string field = trim(m[g].str());
      if (field.empty()) {
        anomaly = true;
        break;
      }
      if (std::find(cfg.hash_captures.begin(), cfg.hash_captures.end(), g) !=
          cfg.hash_captures.end())
        field = fnv1a_hex(field);
      if (g > 1)
        id += cfg.join;
      id += field;
    }
    if (groups == 0)
      id = trim(m[0].str());
    if (anomaly || id.empty()) {
      ++result.anomalies;
      continue;
    }
    result.alarms.push_back(std::move(id));
  }
  normalize_alarms(result.alarms);
  return result;
}

analysis_outcome run_subprocess(const analysis_task &task, const catalog &cat,
                                const adapter_config &cfg) {
  const auto start = clock_type::now();

  std::string args;
  try {
    for (const auto &a : render_cli_args(task.config, cat)) {
      if (!args.empty())
        args += ' ';
      args += shell_quote(a);
    }
  } catch (const render_error &ex) {
    return crashed{std::string("cannot render arguments: ") + ex.what(), 0.0};
  }
  std::string command = cfg.command_template;
  replace_all(command, "{program}", shell_quote(task.program_ref));
  replace_all(command, "{args}", args);

  // Everything the child needs is prepared before fork().
  std::vector<std::string> env_storage;
  std::vector<char *> envp;
  if (!cfg.env_passthrough.empty()) {
    auto names = cfg.env_passthrough;
    if (std::find(names.begin(), names.end(), "PATH") == names.end())
      names.push_back("PATH");
    for (const auto &name : names)
      if (const char *v = std::getenv(name.c_str()))
        env_storage.push_back(name + "=" + v);
    for (auto &s : env_storage)
      envp.push_back(s.data());
    envp.push_back(nullptr);
  }
  char **child_env = envp.empty() ? environ : envp.data();

  int fds[2];
  if (::pipe(fds) != 0)
    return crashed{std::string("pipe failed: ") + std::strerror(errno), 0.0};

  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    return crashed{std::string("fork failed: ") + std::strerror(errno), 0.0};
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(fds[1], STDOUT_FILENO);
    ::dup2(fds[1], STDERR_FILENO);
    ::close(fds[0]);
    ::close(fds[1]);
    const int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0)
      ::dup2(devnull, STDIN_FILENO);
    const char *argv[] = {"sh", "-c", command.c_str(), nullptr};
    ::execve("/bin/sh", const_cast<char *const *>(argv), child_env);
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(fds[1]);
  ::fcntl(fds[0], F_SETFL, ::fcntl(fds[0], F_GETFL) | O_NONBLOCK);

  std::string output;
  char buf[4096];
  auto drain = [&] {
    while (true) {
      const ssize_t n = ::read(fds[0], buf, sizeof buf);
      if (n > 0)
        output.append(buf, static_cast<std::size_t>(n));
      else
        return n == 0; // true on EOF
    }
  };

  int status = 0;
  bool exited = false;
  bool eof = false;
  while (true) {
    const double remaining = task.timeout - seconds_since(start);
    if (remaining <= 0.0)
      break;
    if (!eof) {
      pollfd pfd{fds[0], POLLIN, 0};
      const int wait_ms = static_cast<int>(std::min(remaining, 0.05) * 1000.0) + 1;
      if (::poll(&pfd, 1, wait_ms) > 0)
        eof = drain();
    } else {
      ::usleep(10000);
    }
    if (::waitpid(pid, &status, WNOHANG) == pid) {
      exited = true;
      break;
    }
  }

  if (!exited) {
    kill_group(pid);
    ::waitpid(pid, &status, 0);
    ::close(fds[0]);
    return timed_out{seconds_since(start)};
  }
  // Stragglers left in the group would hold the pipe open.
  kill_group(pid);
  drain();
  ::close(fds[0]);
  const double wall = seconds_since(start);

  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
    return crashed{describe_status(status), wall};

  auto extracted = extract_alarms(output, cfg);
  if (extracted.anomalies > 0)
    spdlog::warn("{}: {} output line(s) matched the alarm pattern with empty fields",
                 task.program_ref, extracted.anomalies);
  return completed{std::move(extracted.alarms), std::min(wall, task.timeout)};
}

subprocess_analyzer::subprocess_analyzer(catalog cat, adapter_config cfg)
    : cat_(std::move(cat)), cfg_(std::move(cfg)) {
  // Validate the pattern once, up front.
  (void)std::regex(cfg_.alarm_pattern, std::regex::ECMAScript);
}

analysis_outcome subprocess_analyzer::run(const analysis_task &task) {
  return run_subprocess(task, cat_, cfg_);
}

std::optional<std::string> subprocess_analyzer::unavailable_reason() const {
  const auto word = first_word(cfg_.command_template);
  if (word.empty())
    return "adapter command template is empty";
  if (word.find('/') != std::string::npos)
    return executable(word) ? std::nullopt
                            : std::optional<std::string>("'" + word + "' is not executable");
  const char *path = std::getenv("PATH");
  std::istringstream dirs(path ? path : "/usr/bin:/bin");
  std::string dir;
  while (std::getline(dirs, dir, ':'))
    if (!dir.empty() && executable(dir + "/" + word))
      return std::nullopt;
  return "command '" + word + "' not found on PATH";
}

} // namespace tuner
