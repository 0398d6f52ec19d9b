#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gsyn {

// External solver invocation: `<executable> <args...> <file...>`.
struct SolverConfig {
    std::string executable;
    std::vector<std::string> args;
    double timeout_s = 300.0;
};

struct ProcessResult {
    bool started = false;
    bool timed_out = false;
    int exit_code = -1;  // -1 if killed by a signal or never started
    int signal = 0;
    std::string out;
    std::string err;
    std::string error;  // why the process could not be started
};

// Runs argv[0] (searched in PATH) with stdin closed, capturing stdout and
// stderr. The child is killed with SIGKILL once timeout_s elapses.
ProcessResult run_process(const std::vector<std::string>& argv, double timeout_s);

// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_digest(const std::string& data);

// Temporary file that is removed on destruction.
class TempFile {
public:
    TempFile(const std::string& suffix, const std::string& contents);
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;
    ~TempFile();

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

// Path of an executable: absolute/relative paths are checked directly,
// bare names are looked up in PATH. Empty if not found.
std::string find_executable(const std::string& name);

}  // namespace gsyn
