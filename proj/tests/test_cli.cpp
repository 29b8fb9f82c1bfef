#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Result {
    int status;
    std::string out;
};

Result run(const std::string& args)
{
    const std::string cmd = std::string(LOWREG_FEM_PATH) + " " + args + " 2>&1";
    Result r{-1, {}};
    FILE* p = popen(cmd.c_str(), "r");
    if (!p)
        return r;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, p))
        r.out += buf;
    const int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

fs::path scratch(const std::string& name)
{
    const fs::path d = fs::temp_directory_path() / ("lowreg_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

void write(const fs::path& p, const std::string& s)
{
    std::ofstream(p) << s;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(Cli, ListsCatalogs)
{
    const Result f = run("list-fields");
    EXPECT_EQ(f.status, 0);
    EXPECT_NE(f.out.find("grad_power_line"), std::string::npos);
    const Result d = run("list-domains");
    EXPECT_EQ(d.status, 0);
    EXPECT_NE(d.out.find("lprism"), std::string::npos);
}

TEST(Cli, RunWritesReports)
{
    const fs::path dir = scratch("run");
    write(dir / "c.json", R"({"domain":"cube","n0":1,"levels":2,"operator":"canonical","vtk":true})");
    const Result r = run("run --config " + (dir / "c.json").string() + " --out " + (dir / "out").string());
    EXPECT_EQ(r.status, 0) << r.out;
    EXPECT_TRUE(fs::exists(dir / "out" / "report.csv"));
    EXPECT_TRUE(fs::exists(dir / "out" / "report.json"));
    EXPECT_TRUE(fs::exists(dir / "out" / "level_1.vtk"));
    EXPECT_EQ(slurp(dir / "out" / "report.csv").substr(0, 6), "level,");
}

TEST(Cli, CheckFailureExitsWithTwo)
{
    const fs::path dir = scratch("check");
    write(dir / "c.json", R"({"levels":2,"operator":"canonical","check":{"eoc_min":3.0}})");
    const std::string base = "run --config " + (dir / "c.json").string() + " --out " + (dir / "out").string();
    EXPECT_EQ(run(base).status, 0);
    const Result r = run(base + " --check");
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.out.find("check failed"), std::string::npos);
}

TEST(Cli, BadInputExitsWithOne)
{
    const fs::path dir = scratch("bad");
    write(dir / "c.json", R"({"domain":"torus"})");
    EXPECT_EQ(run("run --config " + (dir / "c.json").string() + " --out " + (dir / "out").string()).status, 1);
    EXPECT_NE(run("run --config /nonexistent.json").status, 0);
    EXPECT_NE(run("").status, 0);
}
