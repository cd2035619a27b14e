// Runs the command-line tool as a child process.

#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int
runCli(const std::string& args)
{
    const std::string cmd = std::string(WSNSIM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string
slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path
scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("wsnsim_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("cli exit codes")
{
    const fs::path dir = scratch("codes");
    CHECK(runCli("--print-config") == 0);
    CHECK(runCli("--help") == 0);
    CHECK(runCli("--no-such-flag") == 2);
    CHECK(runCli("--scenario 9") == 2);
    CHECK(runCli("--protocol AODX") == 2);
    CHECK(runCli("--config " + (dir / "missing.json").string()) == 2);
    {
        std::ofstream bad(dir / "bad.json");
        bad << R"({"protocls": ["AODV"]})";
    }
    CHECK(runCli("--config " + (dir / "bad.json").string()) == 2);
    // output directory cannot be created under a regular file
    {
        std::ofstream f(dir / "file");
        f << "x";
    }
    CHECK(runCli("--protocol DSDV --scenario 1 --runs 1 --sim-time 5 --out " + (dir / "file" / "sub").string()) == 3);
}

TEST_CASE("cli writes artifacts and reproduces a run from its metadata")
{
    const fs::path dir = scratch("artifacts");
    const fs::path first = dir / "first";
    const fs::path second = dir / "second";
    REQUIRE(runCli("--protocol AODV,DSDV --scenario 1 --runs 2 --sim-time 20 --seed 3 --out " + first.string()) == 0);
    for (const char* f : {"runs.csv", "aggregates.csv", "summary.txt", "metadata.json"})
    {
        CHECK(fs::exists(first / f));
    }
    REQUIRE(runCli("--config " + (first / "metadata.json").string() + " --out " + second.string()) == 0);
    CHECK(slurp(first / "runs.csv") == slurp(second / "runs.csv"));
    CHECK_FALSE(slurp(first / "runs.csv").empty());
}
