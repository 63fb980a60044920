#include <json.hpp>

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    std::string cmd = std::string(THETA_STRATA_BIN) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string curve(const std::string& name) { return std::string("-c ") + THETA_STRATA_DATA + "/" + name + ".json"; }

std::string write_temp(const std::string& name, const std::string& text) {
    std::string path = std::string(::testing::TempDir()) + name;
    std::ofstream(path) << text;
    return path;
}

int count_lines(const std::string& s) {
    int n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

} // namespace

TEST(Cli, TwoCycleTrivialBundleHasOneSection) {
    auto r = run(curve("two_cycle") + " h0 --degrees 0,0");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "1\n");
    EXPECT_EQ(run(curve("two_cycle") + " h0 --degrees 0,0 --gluing 2,3").out, "0\n");
}

TEST(Cli, ThetaGraphStableMultidegrees) {
    auto r = run(curve("theta") + " multidegrees --stable");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(count_lines(r.out), 2);
    EXPECT_EQ(count_lines(run(curve("theta") + " multidegrees").out), 4);
}

TEST(Cli, StrataJson) {
    auto r = run(curve("theta") + " --format json strata");
    ASSERT_EQ(r.code, 0);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["command"], "strata");
    EXPECT_EQ(j["result"]["kind"], "picard");
    EXPECT_EQ(j["result"]["count"], 2 + 3 + 1);
    auto t = nlohmann::json::parse(run(curve("theta") + " --format json strata --theta").out);
    EXPECT_EQ(t["result"]["summary"]["b_tilde"], 2);
    EXPECT_EQ(t["result"]["summary"]["component_count"], 2);
}

TEST(Cli, DotOutput) {
    auto r = run(curve("theta") + " --format dot strata");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("digraph strata {", 0), 0u);
    EXPECT_EQ(run(curve("theta") + " --format dot genus").code, 2);
}

TEST(Cli, BridgeGraph) {
    auto g = nlohmann::json::parse(run(curve("bridge") + " --format json genus").out);
    EXPECT_EQ(g["result"]["genus"], 2);
    EXPECT_EQ(g["result"]["bridges"], nlohmann::json::array({0}));
    EXPECT_EQ(run(curve("bridge") + " multidegrees --stable").out, "");
    auto s = nlohmann::json::parse(run(curve("bridge") + " --format json stabilize --degree 0,1").out);
    EXPECT_EQ(s["result"]["stable_degree"], nlohmann::json::array({0, 0}));
}

TEST(Cli, WCountJsonIsByteIdentical) {
    std::string args = curve("theta") + " --format json --seed 4 wcount --degrees 0,1 --primes 101 --sample 200";
    auto a = run(args), b = run(args), c = run(args + " --threads 1");
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    auto ja = nlohmann::json::parse(a.out), jc = nlohmann::json::parse(c.out);
    EXPECT_EQ(ja["result"], jc["result"]);
    EXPECT_EQ(ja["seed"], 4);
}

TEST(Cli, ExhaustiveWCountOnThetaGraph) {
    auto j = nlohmann::json::parse(run(curve("theta") + " --format json wcount --degrees 0,1 --primes 5,7").out);
    EXPECT_EQ(j["result"]["runs"][0]["count"], 3);
    EXPECT_EQ(j["result"]["runs"][1]["count"], 5);
}

TEST(Cli, AbelAndHyperelliptic) {
    auto a = nlohmann::json::parse(run(curve("rose3") + " --format json abel --points 0:4,0:6").out);
    EXPECT_EQ(a["result"]["bundle"]["degrees"], nlohmann::json::array({2}));
    EXPECT_EQ(run(curve("rose3") + " abel --points 0:0").code, 1);
    auto h = run(curve("rose3") + " hyperelliptic");
    EXPECT_EQ(h.code, 0);
    EXPECT_NE(h.out.find("hyperelliptic"), std::string::npos);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("genus").code, 2);
    EXPECT_EQ(run(curve("theta") + " h0").code, 2);
    EXPECT_EQ(run(curve("theta") + " h0 --degrees 0").code, 2);
    EXPECT_EQ(run(curve("theta") + " h0 --degrees a,b").code, 2);
    EXPECT_EQ(run(curve("theta") + " --format xml genus").code, 2);
    EXPECT_EQ(run(curve("theta") + " wcount --degrees 0,1 --sample 5").code, 2);
    EXPECT_EQ(run("selfcheck").code, 2);
    EXPECT_EQ(run("-c /nonexistent.json genus").code, 1);
    EXPECT_EQ(run(curve("bridge") + " h0 --degrees 0,0").code, 1);
    EXPECT_EQ(run(curve("rose3") + " --prime 3 hyperelliptic").code, 1);
    EXPECT_EQ(run("--version").code, 0);
}

TEST(Cli, SchemaErrorsNameTheField) {
    std::string bad = write_temp("bad_edge.json", R"({"vertices":[{"genus":0}],"edges":[[0,2]]})");
    std::string cmd = std::string(THETA_STRATA_BIN) + " -c " + bad + " genus 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    ASSERT_NE(pipe, nullptr);
    std::array<char, 512> buf{};
    std::string err;
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) err.append(buf.data(), n);
    int status = pclose(pipe);
    EXPECT_EQ(WEXITSTATUS(status), 1);
    EXPECT_NE(err.find("$.edges[0][1]"), std::string::npos) << err;
}

TEST(Cli, SelfcheckPasses) {
    auto r = run("--seed 1 selfcheck");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
    EXPECT_EQ(count_lines(r.out), 14);
}
