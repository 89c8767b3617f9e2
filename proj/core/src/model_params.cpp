#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "mtn/model.hpp"
#include "mtn/random.hpp"

namespace mtn::model {

namespace {

constexpr std::array<std::string_view, 4> kGateNames = {"i", "f", "o", "u"};
constexpr std::array<std::string_view, kModuleTypeCount> kModuleNames = {
    "FuncDef", "While", "DoWhile", "For", "If", "Switch", "Case", "Seq",
};

void push_gates(std::vector<ParamSpec>& out, const std::string& prefix, std::size_t d) {
    for (auto g : kGateNames) {
        out.push_back({prefix + "W_" + std::string(g), d, d, ParamSpec::Init::Weight});
        out.push_back({prefix + "U_" + std::string(g), d, d, ParamSpec::Init::Weight});
        out.push_back({prefix + "b_" + std::string(g), d, 1, ParamSpec::Init::Zero});
    }
}

void push_module(std::vector<ParamSpec>& out, ModuleType m, std::size_t d) {
    const std::string prefix = "module." + std::string(module_name(m)) + ".";
    switch (m) {
        case ModuleType::For:
            out.push_back({prefix + "W1", d, 3 * d, ParamSpec::Init::Weight});
            out.push_back({prefix + "b1", d, 1, ParamSpec::Init::Zero});
            out.push_back({prefix + "W0", d, 2 * d, ParamSpec::Init::Weight});
            out.push_back({prefix + "b0", d, 1, ParamSpec::Init::Zero});
            break;
        case ModuleType::Case:
            out.push_back({prefix + "W", d, 2 * d, ParamSpec::Init::Weight});
            out.push_back({prefix + "b", d, 1, ParamSpec::Init::Zero});
            push_gates(out, prefix + "lstm.", d);
            break;
        case ModuleType::Seq: push_gates(out, prefix + "lstm.", d); break;
        default:
            out.push_back({prefix + "W", d, 2 * d, ParamSpec::Init::Weight});
            out.push_back({prefix + "b", d, 1, ParamSpec::Init::Zero});
            break;
    }
}

bool is_tree_variant(Variant v) {
    return v == Variant::MtnA || v == Variant::MtnB;
}

}  // namespace

std::string_view variant_name(Variant v) noexcept {
    switch (v) {
        case Variant::MtnA: return "mtn-a";
        case Variant::MtnB: return "mtn-b";
        case Variant::TreeLstm: return "treelstm";
        case Variant::SeqLstm: return "seq-lstm";
    }
    return "?";
}

Variant variant_from_name(std::string_view name) {
    for (Variant v : {Variant::MtnA, Variant::MtnB, Variant::TreeLstm, Variant::SeqLstm}) {
        if (variant_name(v) == name) return v;
    }
    throw std::invalid_argument("unknown variant: " + std::string(name));
}

std::string_view module_name(ModuleType m) noexcept {
    return kModuleNames[static_cast<std::size_t>(m)];
}

ModuleType module_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kModuleNames.size(); ++i) {
        if (kModuleNames[i] == name) return static_cast<ModuleType>(i);
    }
    throw std::invalid_argument("unknown module: " + std::string(name));
}

// ---------------------------------------------------------------------------

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

Vocabulary::Vocabulary(std::vector<std::string> tokens) {
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    std::erase(tokens, std::string(kUnkToken));
    tokens_.reserve(tokens.size() + 1);
    tokens_.emplace_back(kUnkToken);
    for (auto& t : tokens) tokens_.push_back(std::move(t));
    for (std::size_t i = 1; i < tokens_.size(); ++i) lookup_.emplace(tokens_[i], i);
}

Vocabulary Vocabulary::build(const std::vector<const ast::AstNode*>& trees,
                             ast::IdentifierMode mode) {
    std::set<std::string> seen;
    for (std::size_t k = 0; k < ast::kNodeKindCount; ++k)
        seen.emplace(ast::kind_name(static_cast<ast::NodeKind>(k)));
    if (mode == ast::IdentifierMode::WithIds) {
        for (const ast::AstNode* tree : trees) {
            for (auto& tok : ast::preorder_tokens(*tree, mode)) seen.insert(std::move(tok));
        }
    }
    return Vocabulary(std::vector<std::string>(seen.begin(), seen.end()));
}

std::size_t Vocabulary::index(const std::string& token) const {
    const auto it = lookup_.find(token);
    return it == lookup_.end() ? kUnk : it->second;
}

bool ModelConfig::module_enabled(ModuleType m) const noexcept {
    return is_tree_variant(variant) && !disabled_modules.test(static_cast<std::size_t>(m));
}

void ModelConfig::validate() const {
    if (hidden < 1) throw std::invalid_argument("hidden size must be >= 1");
    if (disabled_modules.any() && !is_tree_variant(variant))
        throw std::invalid_argument("disabled modules require variant mtn-a or mtn-b");
    if (vocab.size() < 1) throw std::invalid_argument("vocabulary must contain UNK");
    if (num_classes == 1) throw std::invalid_argument("classification head needs >= 2 classes");
}

// ---------------------------------------------------------------------------

std::vector<ParamSpec> param_layout(const ModelConfig& config) {
    config.validate();
    const std::size_t d = config.hidden;
    std::vector<ParamSpec> out;
    out.push_back({"embedding", config.vocab.size(), d, ParamSpec::Init::Embedding});

    switch (config.variant) {
        case Variant::MtnA: push_gates(out, "container.shared.", d); break;
        case Variant::MtnB:
            for (ModuleType m : kAllModuleTypes) {
                if (config.module_enabled(m))
                    push_gates(out, "container." + std::string(module_name(m)) + ".", d);
            }
            push_gates(out, "container.default.", d);
            break;
        case Variant::TreeLstm: push_gates(out, "container.default.", d); break;
        case Variant::SeqLstm: push_gates(out, "sequence.lstm.", d); break;
    }
    for (ModuleType m : kAllModuleTypes) {
        if (config.module_enabled(m)) push_module(out, m, d);
    }
    if (config.num_classes > 0) {
        out.push_back({"head.W", config.num_classes, d, ParamSpec::Init::Weight});
        out.push_back({"head.b", config.num_classes, 1, ParamSpec::Init::Zero});
    }
    return out;
}

ParamCount param_count(const ModelConfig& config) {
    ParamCount count;
    for (const auto& spec : param_layout(config)) {
        const std::size_t n = spec.rows * spec.cols;
        const std::string_view name = spec.name;
        if (name == "embedding") {
            count.embeddings += n;
        } else if (name.starts_with("container.")) {
            count.containers += n;
        } else if (name.starts_with("module.")) {
            count.modules += n;
        } else if (name.starts_with("sequence.")) {
            count.sequence += n;
        } else {
            count.head += n;
        }
    }
    return count;
}

std::size_t module_param_count(ModuleType m, std::size_t d) noexcept {
    switch (m) {
        case ModuleType::For: return 5 * d * d + 2 * d;
        case ModuleType::Case: return 10 * d * d + 5 * d;
        case ModuleType::Seq: return 8 * d * d + 4 * d;
        default: return 2 * d * d + d;
    }
}

std::size_t container_param_count(std::size_t d) noexcept {
    return 8 * d * d + 4 * d;
}

// ---------------------------------------------------------------------------

ParamStore::ParamStore(const ModelConfig& config) : config_(config) {
    const std::size_t d = config.hidden;
    const double bound = 1.0 / std::sqrt(static_cast<double>(d));
    const std::uint64_t base = mix64(config.seed);
    for (const auto& spec : param_layout(config)) {
        ad::Tensor t(spec.rows, spec.cols, true);
        const std::uint64_t key = base ^ hash_name(spec.name);
        auto data = t.data();
        switch (spec.init) {
            case ParamSpec::Init::Zero: break;
            case ParamSpec::Init::Weight:
                for (std::size_t i = 0; i < data.size(); ++i)
                    data[i] = -bound + 2.0 * bound * unit_interval(mix64(key + i));
                break;
            case ParamSpec::Init::Embedding:
                for (std::size_t i = 0; i < data.size(); ++i)
                    data[i] = -0.05 + 0.1 * unit_interval(mix64(key + i));
                break;
        }
        names_.push_back(spec.name);
        tensors_.emplace(spec.name, std::move(t));
    }
    bind();
}

ParamStore::ParamStore(const ParamStore& other)
    : config_(other.config_), tensors_(other.tensors_), names_(other.names_) {
    bind();
}

ParamStore& ParamStore::operator=(const ParamStore& other) {
    if (this != &other) {
        config_ = other.config_;
        tensors_ = other.tensors_;
        names_ = other.names_;
        bind();
    }
    return *this;
}

ad::Tensor& ParamStore::at(const std::string& name) {
    const auto it = tensors_.find(name);
    if (it == tensors_.end()) throw std::out_of_range("no parameter named " + name);
    return it->second;
}

const ad::Tensor& ParamStore::at(const std::string& name) const {
    const auto it = tensors_.find(name);
    if (it == tensors_.end()) throw std::out_of_range("no parameter named " + name);
    return it->second;
}

bool ParamStore::contains(const std::string& name) const {
    return tensors_.contains(name);
}

std::size_t ParamStore::scalar_count() const {
    std::size_t n = 0;
    for (const auto& [name, t] : tensors_) n += t.size();
    return n;
}

GateSet ParamStore::gates(const std::string& prefix) {
    GateSet set;
    for (std::size_t g = 0; g < kGateNames.size(); ++g) {
        set.W[g] = &at(prefix + "W_" + std::string(kGateNames[g]));
        set.U[g] = &at(prefix + "U_" + std::string(kGateNames[g]));
        set.b[g] = &at(prefix + "b_" + std::string(kGateNames[g]));
    }
    return set;
}

void ParamStore::bind() {
    embedding_ = &at("embedding");
    typed_containers_ = {};
    default_container_ = {};
    modules_ = {};
    sequence_lstm_ = {};
    head_W_ = head_b_ = nullptr;

    switch (config_.variant) {
        case Variant::MtnA: default_container_ = gates("container.shared."); break;
        case Variant::MtnB:
        case Variant::TreeLstm: default_container_ = gates("container.default."); break;
        case Variant::SeqLstm: sequence_lstm_ = gates("sequence.lstm."); break;
    }
    for (ModuleType m : kAllModuleTypes) {
        if (!config_.module_enabled(m)) continue;
        const auto idx = static_cast<std::size_t>(m);
        const std::string name(module_name(m));
        typed_containers_[idx] = config_.variant == Variant::MtnB
                                     ? gates("container." + name + ".")
                                     : default_container_;
        ModuleParams& mp = modules_[idx];
        const std::string prefix = "module." + name + ".";
        switch (m) {
            case ModuleType::For:
                mp.W = &at(prefix + "W1");
                mp.b = &at(prefix + "b1");
                mp.W2 = &at(prefix + "W0");
                mp.b2 = &at(prefix + "b0");
                break;
            case ModuleType::Case:
                mp.W = &at(prefix + "W");
                mp.b = &at(prefix + "b");
                mp.lstm = gates(prefix + "lstm.");
                break;
            case ModuleType::Seq: mp.lstm = gates(prefix + "lstm."); break;
            default:
                mp.W = &at(prefix + "W");
                mp.b = &at(prefix + "b");
                break;
        }
    }
    if (config_.num_classes > 0) {
        head_W_ = &at("head.W");
        head_b_ = &at("head.b");
    }
}

const GateSet& ParamStore::container(std::optional<ModuleType> module) const {
    if (module && config_.module_enabled(*module))
        return typed_containers_[static_cast<std::size_t>(*module)];
    return default_container_;
}

const ModuleParams& ParamStore::module(ModuleType m) const {
    if (!config_.module_enabled(m))
        throw std::out_of_range("module " + std::string(module_name(m)) + " is not enabled");
    return modules_[static_cast<std::size_t>(m)];
}

void ParamStore::zero_grad() {
    for (auto& [name, t] : tensors_) t.zero_grad();
}

void ParamStore::scale_grad(double factor) {
    for (auto& [name, t] : tensors_) {
        for (double& g : t.grad()) g *= factor;
    }
}

ParamStore init_params(const ModelConfig& config) {
    return ParamStore(config);
}

}  // namespace mtn::model
