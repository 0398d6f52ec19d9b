#include "gsyn/support/process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <stdexcept>

namespace gsyn {

namespace {

void close_fd(int& fd) {
    if (fd >= 0) ::close(fd);
    fd = -1;
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, double timeout_s) {
    ProcessResult r;
    if (argv.empty() || argv[0].empty()) {
        r.error = "empty command";
        return r;
    }
    int out_pipe[2], err_pipe[2], exec_pipe[2];
    if (::pipe(out_pipe) != 0) throw std::runtime_error("pipe failed");
    if (::pipe(err_pipe) != 0) throw std::runtime_error("pipe failed");
    if (::pipe2(exec_pipe, O_CLOEXEC) != 0) throw std::runtime_error("pipe failed");

    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    const pid_t pid = ::fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid == 0) {
        const int devnull = ::open("/dev/null", O_RDONLY);
        ::dup2(devnull, 0);
        ::dup2(out_pipe[1], 1);
        ::dup2(err_pipe[1], 2);
        ::close(out_pipe[0]);
        ::close(err_pipe[0]);
        ::close(exec_pipe[0]);
        ::execvp(args[0], args.data());
        const int e = errno;
        [[maybe_unused]] auto n = ::write(exec_pipe[1], &e, sizeof e);
        ::_exit(127);
    }
    ::close(out_pipe[1]);
    ::close(err_pipe[1]);
    ::close(exec_pipe[1]);

    int exec_errno = 0;
    const bool exec_failed = ::read(exec_pipe[0], &exec_errno, sizeof exec_errno) == sizeof exec_errno;
    ::close(exec_pipe[0]);
    r.started = !exec_failed;

    int fds[2] = {out_pipe[0], err_pipe[0]};
    std::string* sinks[2] = {&r.out, &r.err};
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration<double>(std::isfinite(timeout_s) ? timeout_s : 1e9);
    char buf[65536];
    while (fds[0] >= 0 || fds[1] >= 0) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            r.timed_out = true;
            ::kill(pid, SIGKILL);
            break;
        }
        pollfd pfd[2];
        int n = 0;
        int which[2];
        for (int k = 0; k < 2; ++k)
            if (fds[k] >= 0) {
                pfd[n] = {fds[k], POLLIN, 0};
                which[n++] = k;
            }
        const int rc = ::poll(pfd, static_cast<nfds_t>(n), static_cast<int>(std::min<long long>(left.count(), 1000)));
        if (rc < 0 && errno != EINTR) break;
        for (int i = 0; i < n && rc > 0; ++i) {
            if (!(pfd[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
            const ssize_t got = ::read(pfd[i].fd, buf, sizeof buf);
            if (got > 0)
                sinks[which[i]]->append(buf, static_cast<std::size_t>(got));
            else if (got == 0 || errno != EINTR)
                close_fd(fds[which[i]]);
        }
    }
    close_fd(fds[0]);
    close_fd(fds[1]);

    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
    if (WIFSIGNALED(status)) r.signal = WTERMSIG(status);
    if (exec_failed) r.error = argv[0] + ": " + std::strerror(exec_errno);
    return r;
}

std::string fnv1a_digest(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

TempFile::TempFile(const std::string& suffix, const std::string& contents) {
    std::string tmpl = (std::filesystem::temp_directory_path() / "gsyn-XXXXXX").string() + suffix;
    std::vector<char> name(tmpl.begin(), tmpl.end());
    name.push_back('\0');
    const int fd = ::mkstemps(name.data(), static_cast<int>(suffix.size()));
    if (fd < 0) throw std::runtime_error("cannot create temporary file");
    path_ = name.data();
    std::size_t done = 0;
    while (done < contents.size()) {
        const ssize_t n = ::write(fd, contents.data() + done, contents.size() - done);
        if (n <= 0) {
            ::close(fd);
            throw std::runtime_error("cannot write temporary file " + path_);
        }
        done += static_cast<std::size_t>(n);
    }
    ::close(fd);
}

TempFile::~TempFile() {
    if (!path_.empty()) ::unlink(path_.c_str());
}

std::string find_executable(const std::string& name) {
    auto runnable = [](const std::string& p) {
        struct stat st {};
        return ::stat(p.c_str(), &st) == 0 && S_ISREG(st.st_mode) && ::access(p.c_str(), X_OK) == 0;
    };
    if (name.empty()) return {};
    if (name.find('/') != std::string::npos) return runnable(name) ? name : std::string{};
    const char* path = std::getenv("PATH");
    if (!path) return {};
    std::string dirs = path;
    std::size_t start = 0;
    while (start <= dirs.size()) {
        std::size_t end = dirs.find(':', start);
        if (end == std::string::npos) end = dirs.size();
        std::string dir = dirs.substr(start, end - start);
        if (dir.empty()) dir = ".";
        const std::string cand = dir + "/" + name;
        if (runnable(cand)) return cand;
        start = end + 1;
    }
    return {};
}

}  // namespace gsyn
