#include "agone/detail/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>

#include "agone/detail/strings.hpp"

namespace agone::detail {

namespace {

bool is_executable_file(const std::filesystem::path& p) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(p, ec)) return false;
  return ::access(p.c_str(), X_OK) == 0;
}

}  // namespace

bool executable_exists(const std::string& name) {
  if (name.find('/') != std::string::npos) {
    return is_executable_file(name);
  }
  const char* path_env = std::getenv("PATH");
  if (!path_env) return false;
  for (const auto& dir : split(path_env, ':')) {
    if (dir.empty()) continue;
    if (is_executable_file(std::filesystem::path(dir) / name)) return true;
  }
  return false;
}

CommandResult run_command(const std::vector<std::string>& argv, const CommandOptions& options) {
  CommandResult result;
  if (argv.empty()) {
    result.spawn_failed = true;
    return result;
  }

  int out_pipe[2], err_pipe[2];
  if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0) {
    result.spawn_failed = true;
    return result;
  }

  const auto start = std::chrono::steady_clock::now();
  pid_t pid = fork();
  if (pid < 0) {
    result.spawn_failed = true;
    return result;
  }

  if (pid == 0) {
    // child
    setpgid(0, 0);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    close(err_pipe[1]);
    if (options.cwd && chdir(options.cwd->c_str()) != 0) {
      _exit(126);
    }
    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    execvp(cargv[0], cargv.data());
    _exit(127);
  }

  close(out_pipe[1]);
  close(err_pipe[1]);
  fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
  fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);

  const bool bounded = options.timeout.count() > 0;
  const auto deadline = start + options.timeout;
  bool open_out = true, open_err = true;
  char buf[4096];

  auto drain = [&](int fd, std::string& sink, bool& open_flag) {
    while (true) {
      ssize_t n = read(fd, buf, sizeof(buf));
      if (n > 0) {
        sink.append(buf, static_cast<std::size_t>(n));
      } else if (n == 0) {
        open_flag = false;
        return;
      } else {
        return;  // EAGAIN or error; poll decides
      }
    }
  };

  while (open_out || open_err) {
    struct pollfd fds[2];
    nfds_t nfds = 0;
    if (open_out) fds[nfds++] = {out_pipe[0], POLLIN, 0};
    if (open_err) fds[nfds++] = {err_pipe[0], POLLIN, 0};

    int wait_ms = 200;
    if (bounded) {
      auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (remaining.count() <= 0) {
        kill(-pid, SIGKILL);
        kill(pid, SIGKILL);
        result.timed_out = true;
        break;
      }
      wait_ms = static_cast<int>(std::min<std::int64_t>(remaining.count(), 200));
    }

    int rc = poll(fds, nfds, wait_ms);
    if (rc > 0) {
      for (nfds_t i = 0; i < nfds; ++i) {
        if (!(fds[i].revents & (POLLIN | POLLHUP))) continue;
        if (fds[i].fd == out_pipe[0]) {
          drain(out_pipe[0], result.out, open_out);
          if (fds[i].revents & POLLHUP && open_out) {
            drain(out_pipe[0], result.out, open_out);
            open_out = false;
          }
        } else {
          drain(err_pipe[0], result.err, open_err);
          if (fds[i].revents & POLLHUP && open_err) {
            drain(err_pipe[0], result.err, open_err);
            open_err = false;
          }
        }
      }
    }
  }

  close(out_pipe[0]);
  close(err_pipe[0]);

  int status = 0;
  waitpid(pid, &status, 0);
  result.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  if (result.timed_out) {
    result.exit_code = -1;
  } else if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
    if (result.exit_code == 127 && result.out.empty() && result.err.empty()) {
      result.spawn_failed = true;
    }
  } else {
    result.exit_code = -1;
  }
  return result;
}

}  // namespace agone::detail
