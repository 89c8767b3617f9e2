#include <gtest/gtest.h>

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <set>

#include "mtn/corpus.hpp"
#include "mtn/frontend.hpp"
#include "mtn/random.hpp"

namespace {

using namespace mtn;
using namespace mtn::corpus;
namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("mtn_unit_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    return p;
}

// Sorted (relative path, bytes) listing of a directory tree.
std::vector<std::pair<std::string, std::string>> snapshot(const fs::path& root) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) out.emplace_back(fs::relative(e.path(), root).string(), read_file(e.path()));
    std::sort(out.begin(), out.end());
    return out;
}

TEST(Generator, EveryFamilyParsesAndRoundTrips) {
    for (Task task : {Task::Classify, Task::Clone}) {
        for (std::size_t f = 0; f < family_count(task); ++f) {
            for (std::uint64_t s = 0; s < 15; ++s) {
                const std::string text = generate_program(task, f, combine_seed(s, f), {});
                const ast::AstNode tree = ast::parse_source(text);
                EXPECT_EQ(ast::from_interchange(ast::to_interchange(tree)), tree);
            }
        }
    }
}

TEST(Generator, DeterministicPerSeed) {
    EXPECT_EQ(generate_program(Task::Clone, 4, 77, {}), generate_program(Task::Clone, 4, 77, {}));
    EXPECT_NE(generate_program(Task::Clone, 4, 77, {}), generate_program(Task::Clone, 4, 78, {}));
}

TEST(Generator, ClonesHaveStructurallyDistinctSolutions) {
    // Renaming aside, a problem must render to more than one tree shape.
    VariationKnobs plain{0.0, 0.0, 0, 0.0, 0.0};
    for (std::size_t p = 0; p < family_count(Task::Clone); ++p) {
        std::set<std::vector<std::string>> shapes;
        for (std::uint64_t s = 0; s < 30; ++s)
            shapes.insert(ast::preorder_tokens(ast::parse_source(generate_program(Task::Clone, p, s, plain)),
                                               ast::IdentifierMode::TypesOnly));
        EXPECT_GE(shapes.size(), 2u) << family_name(Task::Clone, p);
    }
}

TEST(Spec, Validation) {
    CorpusSpec s;
    EXPECT_NO_THROW(s.validate());
    s.classes = 1;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s.classes = 11;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s = {};
    s.per_class = 1;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s = {};
    s.knobs.rename = 1.5;
    EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(Corpus, GenerationIsByteIdenticalAndLoadable) {
    CorpusSpec spec;
    spec.classes = 4;
    spec.per_class = 10;
    spec.seed = 7;
    const fs::path a = scratch("corpus_a"), b = scratch("corpus_b");
    const Manifest m = generate_corpus(spec, a);
    generate_corpus(spec, b);
    EXPECT_EQ(snapshot(a), snapshot(b));
    EXPECT_EQ(m.files.size(), 40u);

    const Dataset d = load_corpus(a);
    EXPECT_EQ(d.trees.size(), 40u);
    std::set<std::string> seen;
    for (const char* split : {"train", "valid", "test"})
        for (std::size_t i : d.split(split)) EXPECT_TRUE(seen.insert(d.manifest.files[i].path).second);
    EXPECT_EQ(seen.size(), 40u);
    EXPECT_EQ(d.split("train").size(), 32u);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Corpus, ManifestRoundTrip) {
    Manifest m;
    m.spec.task = Task::Clone;
    m.spec.classes = 3;
    m.class_names = {"a", "b", "c"};
    m.files = {{"0/0.c", 0, "train"}, {"2/1.c", 2, "test"}};
    const std::string text = manifest_to_json(m);
    const Manifest back = manifest_from_json(text);
    EXPECT_EQ(manifest_to_json(back), text);
    EXPECT_THROW(manifest_from_json("{}"), std::runtime_error);
    EXPECT_THROW(manifest_from_json("[1]"), std::runtime_error);
}

TEST(Corpus, LoadsInterchangeTrees) {
    const fs::path dir = scratch("ast");
    fs::create_directories(dir);
    const ast::AstNode tree = ast::parse_source("int main() { do x--; while (x); }");
    write_atomic(dir / "prog.ast.json", ast::to_interchange(tree));
    EXPECT_EQ(load_tree(dir / "prog.ast.json"), tree);
    fs::remove_all(dir);
}

TEST(Census, SeqDominatesClassifyCorpus) {
    std::vector<ast::AstNode> trees;
    for (std::size_t f = 0; f < family_count(Task::Classify); ++f)
        for (std::uint64_t s = 0; s < 20; ++s)
            trees.push_back(ast::parse_source(generate_program(Task::Classify, f, combine_seed(5, s * 31 + f), {})));
    const auto census = dispatch_census(trees);
    auto at = [&](const char* k) { return census.count(k) ? census.at(k) : std::size_t{0}; };
    for (const char* k : {"If", "For", "While", "DoWhile", "Switch", "FuncDef", "Case"}) EXPECT_GT(at("Seq"), at(k)) << k;
    EXPECT_GT(at("If"), at("While"));
    EXPECT_GT(at("For"), at("While"));
    EXPECT_GT(at("While"), at("DoWhile"));
    EXPECT_GT(at("While"), at("Switch"));
}

TEST(Env, SeedFallback) {
    ::unsetenv("MTN_SEED");
    EXPECT_EQ(seed_from_env(4), 4u);
    ::setenv("MTN_SEED", "123", 1);
    EXPECT_EQ(seed_from_env(4), 123u);
    ::setenv("MTN_SEED", "x1", 1);
    EXPECT_EQ(seed_from_env(4), 4u);
    ::unsetenv("MTN_SEED");
}

}  // namespace
