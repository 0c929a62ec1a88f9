#pragma once

// Helpers shared by the CLI and acceptance tests: run the built binary in a
// shell, capture its streams and exit code, and read the files it wrote.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace clitest {

namespace fs = std::filesystem;

struct RunResult
{
    int exit_code = -1;
    std::string out;
    std::string err;
    double seconds = 0.0;
};

inline std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Fresh empty directory under the system temp dir.
inline fs::path scratch_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("partop_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

inline RunResult run(const std::string& args, const fs::path& work)
{
    const fs::path out = work / "stdout.txt";
    const fs::path err = work / "stderr.txt";
    const std::string cmd =
        std::string("\"") + PARTOP_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" + err.string() + "\"";
    RunResult r;
    const auto t0 = std::chrono::steady_clock::now();
    const int status = std::system(cmd.c_str());
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    fs::remove(out);
    fs::remove(err);
    return r;
}

} // namespace clitest
