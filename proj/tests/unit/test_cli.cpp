#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <json.hpp>

#include "mtn/corpus.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path work_dir() {
    static const fs::path dir = [] {
        const fs::path p = fs::temp_directory_path() / ("mtn_cli_" + std::to_string(::getpid()));
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

CliResult run(const std::string& args) {
    const fs::path err = work_dir() / "stderr.txt";
    const std::string cmd = std::string(MTN_CLI_PATH) + " " + args + " 2>" + err.string();
    CliResult r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr) return r;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = mtn::corpus::read_file(err);
    return r;
}

std::string fixture(const std::string& rel) { return (fs::path(MTN_FIXTURE_DIR) / rel).string(); }

TEST(Cli, ParsePrintsInterchange) {
    const CliResult r = run("parse " + fixture("valid/06_while.c"));
    ASSERT_EQ(r.code, 0) << r.err;
    const json doc = json::parse(r.out);
    EXPECT_EQ(doc["kind"], "TranslationUnit");
}

TEST(Cli, ParseEmitAstWritesFileThatReparses) {
    const fs::path out = work_dir() / "tree.ast.json";
    ASSERT_EQ(run("parse " + fixture("valid/14_switch_default.c") + " --emit-ast " + out.string()).code, 0);
    const CliResult again = run("parse " + out.string());
    ASSERT_EQ(again.code, 0) << again.err;
    EXPECT_EQ(json::parse(again.out), json::parse(mtn::corpus::read_file(out)));
}

TEST(Cli, SyntaxErrorIsSingleLineJson) {
    const CliResult r = run("parse " + fixture("malformed/01_missing_semicolon.c"));
    EXPECT_EQ(r.code, 1);
    ASSERT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
    const json e = json::parse(r.err);
    EXPECT_EQ(e["error"], "SyntaxError");
    EXPECT_EQ(e["line"], 3);
    EXPECT_EQ(e["column"], 5);
}

TEST(Cli, UsageErrorsAreReported) {
    const CliResult r = run("train classify --variant nope --data x --out y");
    EXPECT_NE(r.code, 0);
    EXPECT_TRUE(json::parse(r.err).contains("error"));
}

TEST(Cli, ParamCount) {
    const CliResult r = run("param-count --variant mtn-b --hidden 200");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["total"], 4210400);
    const CliResult a = run("param-count --variant mtn-a --hidden 320");
    EXPECT_EQ(json::parse(a.out)["total"], 4204800);
    const CliResult d = run("param-count --variant mtn-b --hidden 10 --disable-modules If,Seq");
    EXPECT_EQ(json::parse(d.out)["total"], 105 * 100 + 520 - (200 + 10) - (800 + 40) - 2 * (800 + 40));
}

TEST(Cli, GenTrainEvalEmbedPipeline) {
    const fs::path data = work_dir() / "corpus";
    const fs::path model = work_dir() / "m" / "model.json";
    ASSERT_EQ(run("gen-corpus --task classify --classes 3 --per-class 10 --seed 3 --out " + data.string()).code, 0);
    EXPECT_TRUE(fs::exists(data / "manifest.json"));
    const CliResult t = run("train classify --data " + data.string() +
                      " --variant mtn-a --hidden 6 --epochs 2 --seed 2 --out " + model.string());
    ASSERT_EQ(t.code, 0) << t.err;
    EXPECT_TRUE(fs::exists(model));
    EXPECT_TRUE(fs::exists(model.string() + ".adam.json"));
    const std::string log = mtn::corpus::read_file(model.string() + ".log.jsonl");
    EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 2);
    const json first = json::parse(log.substr(0, log.find('\n')));
    for (const char* k : {"epoch", "mean_loss", "val_metric", "wall_seconds"}) EXPECT_TRUE(first.contains(k)) << k;

    const CliResult e = run("eval classify --model " + model.string() + " --data " + data.string() + " --split test");
    ASSERT_EQ(e.code, 0) << e.err;
    const json report = json::parse(e.out);
    EXPECT_EQ(report["variant"], "mtn-a");
    EXPECT_TRUE(report.contains("accuracy"));

    const CliResult v = run("embed --model " + model.string() + " --input " + fixture("valid/06_while.c"));
    ASSERT_EQ(v.code, 0) << v.err;
    EXPECT_EQ(json::parse(v.out)["vector"].size(), 6u);
    const CliResult all = run("embed --model " + model.string() + " --data " + data.string() + " --split valid");
    EXPECT_EQ(std::count(all.out.begin(), all.out.end(), '\n'), 3);
}

TEST(Cli, UntrainedClassifierIsNearChance) {
    const fs::path data = work_dir() / "chance";
    const fs::path model = work_dir() / "chance_model.json";
    ASSERT_EQ(run("gen-corpus --task classify --classes 10 --per-class 100 --seed 5 --out " + data.string()).code, 0);
    ASSERT_EQ(run("train classify --data " + data.string() + " --hidden 8 --epochs 0 --seed 4 --out " + model.string()).code, 0);
    const CliResult e = run("eval classify --model " + model.string() + " --data " + data.string() + " --split train");
    ASSERT_EQ(e.code, 0) << e.err;
    // 800 balanced train files: binomial 3 sigma around 1/10.
    const double acc = json::parse(e.out)["accuracy"].get<double>();
    EXPECT_NEAR(acc, 0.1, 3.0 * std::sqrt(0.1 * 0.9 / 800.0));
}

TEST(Cli, MissingCorpusIsAnError) {
    const CliResult r = run("eval clone --model nope.json --data " + (work_dir() / "absent").string());
    EXPECT_EQ(r.code, 1);
    EXPECT_TRUE(json::parse(r.err).contains("error"));
}

}  // namespace
