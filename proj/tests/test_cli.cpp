#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "pshlab/experiment.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = PSHLAB_CLI_PATH;
const std::string kConfigs = PSHLAB_CONFIG_DIR;

int run(const std::string& args, const fs::path& log) {
    const std::string cmd = "\"" + kCli + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("pshlab-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    fs::path dir_;
};

}  // namespace

TEST_F(Cli, SmokeRunIsByteReproducible) {
    const std::string cfg = kConfigs + "/smoke.json";
    ASSERT_EQ(run("run --config \"" + cfg + "\" --out \"" + (dir_ / "a").string() + "\"", dir_ / "a.log"), 0)
        << slurp(dir_ / "a.log");
    ASSERT_EQ(run("run --config \"" + cfg + "\" --out \"" + (dir_ / "b").string() + "\"", dir_ / "b.log"), 0);
    const std::string a = slurp(dir_ / "a.csv");
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(dir_ / "b.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "a.summary.json"));
}

TEST_F(Cli, SeedOverrideChangesRandomSets) {
    const std::string cfg = kConfigs + "/smoke.json";
    ASSERT_EQ(run("run --config \"" + cfg + "\" --out \"" + (dir_ / "a").string() + "\"", dir_ / "a.log"), 0);
    ASSERT_EQ(run("run --config \"" + cfg + "\" --seed 99 --out \"" + (dir_ / "b").string() + "\"", dir_ / "b.log"), 0);
    EXPECT_NE(slurp(dir_ / "a.csv"), slurp(dir_ / "b.csv"));
}

TEST_F(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run("", dir_ / "log"), 2);
    EXPECT_EQ(run("run", dir_ / "log"), 2);
    EXPECT_EQ(run("frobnicate", dir_ / "log"), 2);
    EXPECT_EQ(run("run --config \"" + (dir_ / "missing.json").string() + "\"", dir_ / "log"), 2);
    {
        std::ofstream(dir_ / "bad.json") << R"({"scenario": "conjecture-scan", "resolution": "high"})";
    }
    EXPECT_EQ(run("run --config \"" + (dir_ / "bad.json").string() + "\"", dir_ / "log"), 2);
    EXPECT_NE(slurp(dir_ / "log").find("resolution"), std::string::npos);
    {
        std::ofstream(dir_ / "unknown.json") << R"({"scenario": "no-such-thing"})";
    }
    EXPECT_EQ(run("run --config \"" + (dir_ / "unknown.json").string() + "\"", dir_ / "log"), 2);
    EXPECT_EQ(run("run --config \"" + kConfigs + "/smoke.json\" --resolution 4", dir_ / "log"), 2);
}

TEST_F(Cli, ListScenarios) {
    ASSERT_EQ(run("list-scenarios", dir_ / "log"), 0);
    const std::string out = slurp(dir_ / "log");
    for (const char* s : {"conjecture-scan", "h-bounds", "extremal", "capacity", "claims", "bernstein", "brudnyi",
                          "product-case"}) {
        EXPECT_NE(out.find(s), std::string::npos) << s;
    }
    EXPECT_EQ(static_cast<std::size_t>(std::count(out.begin(), out.end(), '\n')), pshlab::kScenarios.size());
}

TEST_F(Cli, ShippedConfigsParse) {
    // every shipped config must load; an out-of-range resolution is rejected after parsing,
    // so a clean parse shows up as the resolution usage error rather than a config error
    for (const auto& entry : fs::directory_iterator(kConfigs)) {
        if (entry.path().extension() != ".json") continue;
        const int code = run("run --config \"" + entry.path().string() + "\" --resolution 4", dir_ / "log");
        EXPECT_EQ(code, 2) << entry.path();
        EXPECT_NE(slurp(dir_ / "log").find("--resolution"), std::string::npos) << entry.path() << slurp(dir_ / "log");
    }
}
