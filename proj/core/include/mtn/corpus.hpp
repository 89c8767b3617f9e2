#pragma once

// Seeded synthetic C-subset corpora, their manifest and loader.
//
// A classify corpus has one template family per class; a clone corpus
// has one "problem" per class, each rendered through several
// structurally different solutions. Surface variation (renaming, loop
// style of helper loops, constant jitter, declaration shuffling and dead
// declarations) is applied on top.

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mtn/ast.hpp"

namespace mtn::corpus {

enum class Task : std::uint8_t { Classify, Clone };

std::string_view task_name(Task t) noexcept;
Task task_from_name(std::string_view name);

inline constexpr std::string_view kGeneratorVersion = "mtn-gen/1";
inline constexpr std::string_view kManifestFormat = "mtn-corpus/1";

struct VariationKnobs {
    double rename = 0.9;
    /// Probability that an auxiliary loop (array fill, output) flips
    /// between for and while form.
    double loop_swap = 0.5;
    /// Constants move by a uniform offset in [-jitter, jitter].
    int jitter = 10;
    double shuffle = 0.3;
    double dead_code = 0.2;
};

struct CorpusSpec {
    Task task = Task::Classify;
    /// Classes (classify) or problems (clone).
    std::size_t classes = 10;
    std::size_t per_class = 100;
    std::uint64_t seed = 1;
    VariationKnobs knobs;

    /// Throws std::invalid_argument.
    void validate() const;
};

/// Number of available families (classify) or problems (clone).
std::size_t family_count(Task task) noexcept;
std::string_view family_name(Task task, std::size_t family);

class GenerationExhausted : public std::runtime_error {
public:
    GenerationExhausted(std::string family, std::uint64_t seed);
    const std::string& family() const noexcept { return family_; }
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::string family_;
    std::uint64_t seed_;
};

/// One rendering attempt; the result is not checked against the parser.
std::string render_program(Task task, std::size_t family, std::uint64_t seed,
                           const VariationKnobs& knobs);

/// Renders until the program parses (up to 100 attempts).
std::string generate_program(Task task, std::size_t family, std::uint64_t seed,
                             const VariationKnobs& knobs);

struct ManifestEntry {
    /// Relative to the corpus root, '/'-separated.
    std::string path;
    std::size_t label = 0;
    /// "train", "valid" or "test".
    std::string split;
};

struct Manifest {
    std::string generator{kGeneratorVersion};
    CorpusSpec spec;
    std::vector<std::string> class_names;
    std::vector<ManifestEntry> files;
};

std::string manifest_to_json(const Manifest& manifest);
Manifest manifest_from_json(std::string_view text);

/// Writes `<root>/<class>/<idx>.c` and `<root>/manifest.json`. Splits are
/// 8:1:1 stratified per class.
Manifest generate_corpus(const CorpusSpec& spec, const std::filesystem::path& root);

/// Write to a sibling temp file, then rename over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

/// Parses `.c` sources or imports `.ast.json` interchange files.
ast::AstNode load_tree(const std::filesystem::path& path);

struct Dataset {
    Manifest manifest;
    std::vector<ast::AstNode> trees;

    std::size_t label(std::size_t i) const { return manifest.files[i].label; }
    /// File indices whose split matches, in manifest order.
    std::vector<std::size_t> split(std::string_view name) const;
};

/// Reads manifest.json and every listed file.
Dataset load_corpus(const std::filesystem::path& root);

/// Count of non-leaf units per dispatch target ("FuncDef", ..., "Seq",
/// "default") with every module enabled.
std::map<std::string, std::size_t> dispatch_census(const std::vector<ast::AstNode>& trees);

/// Value of MTN_SEED if set and numeric, else `fallback`.
std::uint64_t seed_from_env(std::uint64_t fallback);

}  // namespace mtn::corpus
