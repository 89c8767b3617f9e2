#include "mtn/corpus.hpp"

#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "mtn/frontend.hpp"
#include "mtn/model.hpp"
#include "mtn/random.hpp"
#include "mtn/training.hpp"

namespace mtn::corpus {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kMaxAttempts = 100;

void require_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(name) + " must be in [0, 1]");
}

ordered_json spec_to_json(const CorpusSpec& s) {
    ordered_json j = ordered_json::object();
    j["task"] = task_name(s.task);
    j["classes"] = s.classes;
    j["per_class"] = s.per_class;
    j["seed"] = s.seed;
    j["knobs"] = {{"rename", s.knobs.rename},
                  {"loop_swap", s.knobs.loop_swap},
                  {"jitter", s.knobs.jitter},
                  {"shuffle", s.knobs.shuffle},
                  {"dead_code", s.knobs.dead_code}};
    return j;
}

CorpusSpec spec_from_json(const ordered_json& j) {
    CorpusSpec s;
    s.task = task_from_name(j.at("task").get<std::string>());
    s.classes = j.at("classes").get<std::size_t>();
    s.per_class = j.at("per_class").get<std::size_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    const auto& k = j.at("knobs");
    s.knobs = {k.at("rename").get<double>(), k.at("loop_swap").get<double>(), k.at("jitter").get<int>(),
               k.at("shuffle").get<double>(), k.at("dead_code").get<double>()};
    return s;
}

std::string split_name(std::size_t which) {
    static constexpr std::array<std::string_view, 3> kNames = {"train", "valid", "test"};
    return std::string(kNames[which]);
}

}  // namespace

std::string_view task_name(Task t) noexcept { return t == Task::Classify ? "classify" : "clone"; }

Task task_from_name(std::string_view name) {
    if (name == "classify") return Task::Classify;
    if (name == "clone") return Task::Clone;
    throw std::invalid_argument("unknown task '" + std::string(name) + "'");
}

void CorpusSpec::validate() const {
    if (classes < 2 || classes > family_count(task))
        throw std::invalid_argument("classes must be in [2, " + std::to_string(family_count(task)) + "]");
    if (per_class < 2) throw std::invalid_argument("per_class must be at least 2");
    require_probability(knobs.rename, "rename");
    require_probability(knobs.loop_swap, "loop_swap");
    require_probability(knobs.shuffle, "shuffle");
    require_probability(knobs.dead_code, "dead_code");
    if (knobs.jitter < 0) throw std::invalid_argument("jitter must be non-negative");
}

GenerationExhausted::GenerationExhausted(std::string family, std::uint64_t seed)
    : std::runtime_error("generation exhausted for template " + family + " (seed " +
                         std::to_string(seed) + ")"),
      family_(std::move(family)),
      seed_(seed) {}

std::string generate_program(Task task, std::size_t family, std::uint64_t seed,
                             const VariationKnobs& knobs) {
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const std::string text = render_program(task, family, combine_seed(seed, attempt), knobs);
        try {
            (void)ast::parse_source(text);
            return text;
        } catch (const ast::FrontendError&) {
        }
    }
    throw GenerationExhausted(std::string(family_name(task, family)), seed);
}

std::string manifest_to_json(const Manifest& m) {
    ordered_json doc = ordered_json::object();
    doc["format"] = kManifestFormat;
    doc["generator"] = m.generator;
    doc["task"] = task_name(m.spec.task);
    doc["seed"] = m.spec.seed;
    doc["spec"] = spec_to_json(m.spec);
    doc["classes"] = m.class_names;
    ordered_json files = ordered_json::array();
    for (const auto& f : m.files) files.push_back({{"path", f.path}, {"label", f.label}, {"split", f.split}});
    doc["files"] = std::move(files);
    return doc.dump(1);
}

Manifest manifest_from_json(std::string_view text) {
    const ordered_json doc = ordered_json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw std::runtime_error("invalid manifest: not a JSON object");
    Manifest m;
    try {
        if (doc.at("format").get<std::string>() != kManifestFormat)
            throw std::runtime_error("invalid manifest: unsupported format");
        m.generator = doc.at("generator").get<std::string>();
        m.spec = spec_from_json(doc.at("spec"));
        m.class_names = doc.at("classes").get<std::vector<std::string>>();
        for (const auto& f : doc.at("files")) {
            ManifestEntry e{f.at("path").get<std::string>(), f.at("label").get<std::size_t>(),
                            f.at("split").get<std::string>()};
            if (e.split != "train" && e.split != "valid" && e.split != "test")
                throw std::runtime_error("invalid manifest: unknown split " + e.split);
            if (e.label >= m.class_names.size())
                throw std::runtime_error("invalid manifest: label out of range in " + e.path);
            m.files.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("invalid manifest: ") + e.what());
    }
    return m;
}

void write_atomic(const std::filesystem::path& path, std::string_view contents) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw std::runtime_error("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Manifest generate_corpus(const CorpusSpec& spec, const std::filesystem::path& root) {
    spec.validate();
    Manifest m;
    m.spec = spec;
    for (std::size_t c = 0; c < spec.classes; ++c) m.class_names.emplace_back(family_name(spec.task, c));

    std::vector<std::size_t> labels;
    for (std::size_t c = 0; c < spec.classes; ++c) labels.insert(labels.end(), spec.per_class, c);
    const train::Splits splits = train::make_stratified_splits(labels, combine_seed(spec.seed, hash_name("split")));
    std::vector<std::size_t> split_of(labels.size(), 0);
    for (std::size_t i : splits.valid) split_of[i] = 1;
    for (std::size_t i : splits.test) split_of[i] = 2;

    std::filesystem::create_directories(root);
    for (std::size_t c = 0; c < spec.classes; ++c) {
        std::filesystem::create_directories(root / std::to_string(c));
        for (std::size_t i = 0; i < spec.per_class; ++i) {
            const std::uint64_t seed = combine_seed(combine_seed(spec.seed, c), i);
            const std::string text = generate_program(spec.task, c, seed, spec.knobs);
            const std::string rel = std::to_string(c) + "/" + std::to_string(i) + ".c";
            write_atomic(root / rel, text);
            m.files.push_back({rel, c, split_name(split_of[c * spec.per_class + i])});
        }
    }
    write_atomic(root / "manifest.json", manifest_to_json(m));
    return m;
}

ast::AstNode load_tree(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    const std::string name = path.filename().string();
    if (name.size() > 9 && name.ends_with(".ast.json")) {
        ast::AstNode tree = ast::from_interchange(text);
        ast::validate_arity(tree);
        return tree;
    }
    return ast::parse_source(text);
}

std::vector<std::size_t> Dataset::split(std::string_view name) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < manifest.files.size(); ++i)
        if (manifest.files[i].split == name) out.push_back(i);
    return out;
}

Dataset load_corpus(const std::filesystem::path& root) {
    Dataset d;
    d.manifest = manifest_from_json(read_file(root / "manifest.json"));
    d.trees.reserve(d.manifest.files.size());
    for (const auto& f : d.manifest.files) d.trees.push_back(load_tree(root / f.path));
    return d;
}

namespace {

void census(const ast::AstNode& node, const model::ModelConfig& config,
            std::map<std::string, std::size_t>& counts) {
    for (const auto& child : node.children) census(child, config, counts);
    if (node.children.empty()) return;
    const model::Dispatch disp = model::dispatch(node, config);
    switch (disp.kind) {
        case model::Dispatch::Kind::Typed: ++counts[std::string(model::module_name(disp.module))]; break;
        case model::Dispatch::Kind::Seq: ++counts["Seq"]; break;
        case model::Dispatch::Kind::Default: ++counts["default"]; break;
    }
}

}  // namespace

std::map<std::string, std::size_t> dispatch_census(const std::vector<ast::AstNode>& trees) {
    model::ModelConfig config;
    config.variant = model::Variant::MtnB;
    std::map<std::string, std::size_t> counts;
    for (const auto& tree : trees) census(tree, config, counts);
    return counts;
}

std::uint64_t seed_from_env(std::uint64_t fallback) {
    const char* raw = std::getenv("MTN_SEED");
    if (raw == nullptr || *raw == '\0') return fallback;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(raw, &end, 10);
    if (end == nullptr || *end != '\0') return fallback;
    return v;
}

}  // namespace mtn::corpus
