#include "gmqv/cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace gmqv {
namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string spec(const char* name) {
    return (std::filesystem::path(GMQV_SPEC_DIR) / name).string();
}

// Value of a "key,value" report line.
double report_value(const std::string& text, const std::string& key) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(key + ",", 0) == 0) return std::strtod(line.c_str() + key.size() + 1, nullptr);
    }
    ADD_FAILURE() << "no " << key << " line in\n" << text;
    return 0.0;
}

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TEST(Cli, ValidateBundled) {
    for (const char* name : {"brownian.gmspec", "ou.gmspec", "stitched.gmspec", "discmean.gmspec"}) {
        const CliRun r = run({"validate", spec(name)});
        EXPECT_EQ(r.code, kExitOk) << name << r.err;
        EXPECT_NE(r.out.find("\nvalid\n"), std::string::npos) << r.out;
        EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
    }
    const CliRun stitched = run({"validate", spec("stitched.gmspec")});
    EXPECT_NE(stitched.out.find("block_boundaries: 1 2\n"), std::string::npos) << stitched.out;
}

TEST(Cli, Kernel) {
    EXPECT_EQ(run({"kernel", spec("stitched.gmspec"), "--s", "0.3", "--t", "0.6"}).out, "0.12\n");
    EXPECT_EQ(run({"kernel", spec("stitched.gmspec"), "--s", "1.5", "--t", "2.5"}).out, "0\n");
    EXPECT_EQ(run({"kernel", spec("discmean.gmspec"), "--s", "0.5", "--t", "0.5", "--left-s"}).out,
              "0.5\n");
}

TEST(Cli, QuadvarBrownian) {
    const CliRun r = run({"quadvar", spec("brownian.gmspec"), "--t", "2.5"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(r.out,
              "t,2.5\ndeterministic_part,2.5\njumps,0\ntime,gauss_var,mean_jump\njump_cov\n"
              "law_mean,2.5\nlaw_variance,0\n");
}

TEST(Cli, QuadvarOu) {
    const CliRun r = run({"quadvar", spec("ou.gmspec"), "--t", "1"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NEAR(report_value(r.out, "law_mean"), 1.0, 1e-6);
}

TEST(Cli, QuadvarWithMean) {
    const CliRun r = run({"quadvar", spec("discmean.gmspec"), "--t", "0.6", "--with-mean"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("0.25,0,-2\n0.5,1,1\n"), std::string::npos) << r.out;
    EXPECT_NEAR(report_value(r.out, "law_mean"), 6.6, 1e-12);
    EXPECT_NEAR(report_value(r.out, "law_variance"), 6.0, 1e-12);
}

TEST(Cli, VerifyStitched) {
    const CliRun r = run({"verify", spec("stitched.gmspec"), "--t", "3", "--paths", "10000", "--seed", "7"});
    EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
    EXPECT_NE(r.out.find("PASS mean"), std::string::npos);
    EXPECT_NE(r.out.find("PASS variance"), std::string::npos);
}

TEST(Cli, VerifyBundledWithDefaults) {
    const std::vector<std::pair<const char*, const char*>> cases{
        {"brownian.gmspec", "1"}, {"ou.gmspec", "1"}, {"stitched.gmspec", "3"}, {"discmean.gmspec", "0.6"}};
    for (const auto& [name, t] : cases) {
        const CliRun r = run({"verify", spec(name), "--t", t});
        EXPECT_EQ(r.code, kExitOk) << name << "\n" << r.out << r.err;
    }
    const CliRun m = run({"verify", spec("discmean.gmspec"), "--t", "0.6", "--with-mean"});
    EXPECT_EQ(m.code, kExitOk) << m.out << m.err;
}

TEST(Cli, SimulateIsByteStable) {
    const std::vector<std::string> args{"simulate", spec("stitched.gmspec"), "--t", "2.5",
                                        "--cells", "2^4", "--paths", "3", "--seed", "9"};
    const CliRun a = run(args);
    const CliRun b = run(args);
    ASSERT_EQ(a.code, kExitOk) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out.rfind("path,time,side,centred_value,value\n", 0), 0u);
    EXPECT_NE(a.out.find("\n2,2,L,"), std::string::npos);

    std::vector<std::string> counted = args;
    counted[5] = "16";
    EXPECT_EQ(run(counted).out, a.out);

    const auto path = temp_file("gmqv_cli_paths.csv");
    std::vector<std::string> to_file = args;
    to_file.insert(to_file.end(), {"--out", path.string()});
    const CliRun f = run(to_file);
    EXPECT_EQ(f.code, kExitOk);
    EXPECT_TRUE(f.out.empty());
    EXPECT_EQ(slurp(path), a.out);
    std::filesystem::remove(path);
}

TEST(Cli, RealizedCsv) {
    const std::vector<std::string> args{"realized", spec("brownian.gmspec"), "--t", "1",
                                        "--levels", "3..5", "--paths", "200", "--seed", "4"};
    const CliRun a = run(args);
    ASSERT_EQ(a.code, kExitOk) << a.err;
    EXPECT_EQ(a.out, run(args).out);
    std::istringstream in(a.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "level,mesh,mc_mean,mc_var,mc_se,expected_realized,law_mean,law_var,n_paths");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        EXPECT_EQ(line.rfind(std::to_string(2 + rows) + ",", 0), 0u) << line;
        EXPECT_EQ(line.substr(line.size() - 4), ",200");
    }
    EXPECT_EQ(rows, 3);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, kExitUsage);
    EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(run({"validate", "/nonexistent/file.gmspec"}).code, kExitUsage);
    EXPECT_EQ(run({"quadvar", spec("brownian.gmspec")}).code, kExitUsage);
    EXPECT_EQ(run({"quadvar", spec("brownian.gmspec"), "--t", "inf"}).code, kExitUsage);
    EXPECT_EQ(run({"quadvar", spec("brownian.gmspec"), "--t", "nan"}).code, kExitUsage);
    EXPECT_EQ(run({"quadvar", spec("brownian.gmspec"), "--t", "-1"}).code, kExitUsage);
    EXPECT_EQ(run({"simulate", spec("brownian.gmspec"), "--t", "1", "--cells", "2^x"}).code,
              kExitUsage);
    EXPECT_EQ(run({"realized", spec("brownian.gmspec"), "--t", "1", "--levels", "5..3"}).code,
              kExitUsage);
    EXPECT_EQ(run({"verify", spec("brownian.gmspec"), "--t", "1", "--paths", "10"}).code, kExitUsage);
    EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST(Cli, SpecFileErrors) {
    const auto bad_syntax = temp_file("gmqv_cli_syntax.gmspec");
    std::ofstream(bad_syntax) << "interval 0 1\nblock 0 1\n f [0,1) \"x*\"\n g [0,1) \"1\"\n";
    const CliRun s = run({"validate", bad_syntax.string()});
    EXPECT_EQ(s.code, kExitUsage);
    EXPECT_NE(s.err.find("line 3"), std::string::npos) << s.err;

    const auto invalid = temp_file("gmqv_cli_invalid.gmspec");
    std::ofstream(invalid) << "interval 0 1\nblock 0 1\n f [0,1) \"1\"\n g [0,1) \"1+x\"\n";
    const CliRun v = run({"validate", invalid.string()});
    EXPECT_EQ(v.code, kExitFailure);
    EXPECT_NE(v.out.find("FAIL ratio-nondecreasing"), std::string::npos) << v.out;
    EXPECT_NE(v.out.find("\ninvalid\n"), std::string::npos);
    EXPECT_EQ(run({"quadvar", invalid.string(), "--t", "0.5"}).code, kExitFailure);

    const auto gap = temp_file("gmqv_cli_gap.gmspec");
    std::ofstream(gap) << "interval 0 2\nblock 0 2\n f [0,2) \"x\"\n g [0,1) \"1\"\n";
    const CliRun c = run({"quadvar", gap.string(), "--t", "0.5"});
    EXPECT_EQ(c.code, kExitFailure);
    EXPECT_NE(c.err.find("[1,2)"), std::string::npos) << c.err;

    for (const auto& p : {bad_syntax, invalid, gap}) std::filesystem::remove(p);
}

}  // namespace
}  // namespace gmqv
