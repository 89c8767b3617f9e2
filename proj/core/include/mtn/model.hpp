#pragma once

// Modular tree network encoder, its baselines and parameter layout.
//
// Every AST node becomes one recurrent unit. Control-flow nodes get a
// dedicated module F that turns the ordered child states into h~; nodes
// with sequential children get an LSTM scan; everything else sums its
// children as in the child-sum Tree-LSTM. The resulting h~ is wrapped by
// a gated "container":
//
//     i   = sigmoid(W_i x + U_i h~  + b_i)
//     f_k = sigmoid(W_f x + U_f h_k + b_f)    one per child k
//     o   = sigmoid(W_o x + U_o h~  + b_o)
//     u   = tanh   (W_u x + U_u h~  + b_u)
//     c   = i*u + sum_k f_k*c_k
//     h   = o*tanh(c)
//
// MTN-a shares one container across all units. MTN-b gives each module
// type its own container plus one for default units.

#include <array>
#include <bitset>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mtn/ast.hpp"
#include "mtn/autodiff.hpp"

namespace mtn::model {

enum class Variant : std::uint8_t { MtnA, MtnB, TreeLstm, SeqLstm };

std::string_view variant_name(Variant v) noexcept;
Variant variant_from_name(std::string_view name);

enum class ModuleType : std::uint8_t { FuncDef, While, DoWhile, For, If, Switch, Case, Seq };

inline constexpr std::size_t kModuleTypeCount = 8;
inline constexpr std::array<ModuleType, kModuleTypeCount> kAllModuleTypes = {
    ModuleType::FuncDef, ModuleType::While, ModuleType::DoWhile, ModuleType::For,
    ModuleType::If,      ModuleType::Switch, ModuleType::Case,   ModuleType::Seq,
};

std::string_view module_name(ModuleType m) noexcept;
ModuleType module_from_name(std::string_view name);

/// Token -> row index of the embedding table. Index 0 is reserved for
/// unknown tokens.
class Vocabulary {
public:
    static constexpr std::size_t kUnk = 0;
    static constexpr std::string_view kUnkToken = "<unk>";

    Vocabulary();
    /// Sorted, de-duplicated tokens (UNK excluded) get indices 1..n.
    explicit Vocabulary(std::vector<std::string> tokens);

    /// All node-kind names plus, in with-ids mode, every "kind:value"
    /// token seen in `trees`.
    static Vocabulary build(const std::vector<const ast::AstNode*>& trees, ast::IdentifierMode mode);

    std::size_t index(const std::string& token) const;
    std::size_t size() const noexcept { return tokens_.size(); }
    /// Index-ordered, including the UNK token at 0.
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

private:
    std::vector<std::string> tokens_;
    std::map<std::string, std::size_t, std::less<>> lookup_;
};

using ModuleSet = std::bitset<kModuleTypeCount>;

struct ModelConfig {
    Variant variant = Variant::MtnB;
    std::size_t hidden = 32;
    Vocabulary vocab;
    ast::IdentifierMode identifier_mode = ast::IdentifierMode::TypesOnly;
    ModuleSet disabled_modules;
    std::uint64_t seed = 1;
    /// Wrap the For module's outer combination in tanh like the other
    /// recursive modules. false gives the bare affine form.
    bool for_outer_tanh = true;
    /// Classification head size M; 0 means no head.
    std::size_t num_classes = 0;

    bool module_enabled(ModuleType m) const noexcept;
    /// Throws std::invalid_argument.
    void validate() const;
};

// ---------------------------------------------------------------------------
// Parameter layout
// ---------------------------------------------------------------------------

struct ParamSpec {
    enum class Init : std::uint8_t { Weight, Zero, Embedding };
    std::string name;
    std::size_t rows;
    std::size_t cols;
    Init init;
};

/// Every parameter the config needs, in a fixed order.
std::vector<ParamSpec> param_layout(const ModelConfig& config);

struct ParamCount {
    std::size_t containers = 0;
    std::size_t modules = 0;
    /// Sequential LSTM baseline weights.
    std::size_t sequence = 0;
    std::size_t embeddings = 0;
    std::size_t head = 0;

    std::size_t encoder() const noexcept { return containers + modules + sequence; }
    std::size_t total() const noexcept { return encoder() + embeddings + head; }
};

ParamCount param_count(const ModelConfig& config);

/// Parameter count of one module type's F.
std::size_t module_param_count(ModuleType m, std::size_t d) noexcept;
std::size_t container_param_count(std::size_t d) noexcept;

/// W/U/b for the four gates i, f, o, u. Used for containers and for the
/// LSTM cells inside the Seq and Case modules.
struct GateSet {
    std::array<ad::Tensor*, 4> W{};
    std::array<ad::Tensor*, 4> U{};
    std::array<ad::Tensor*, 4> b{};
};

enum Gate : std::size_t { kInput = 0, kForget = 1, kOutput = 2, kUpdate = 3 };

struct ModuleParams {
    // FuncDef/While/DoWhile/If/Switch: W (d x 2d), b.
    // For: W = W_For1 (d x 3d), b = b_For1, W2 = W_For0 (d x 2d), b2 = b_For0.
    // Case: W = W_Case (d x 2d), b = b_Case, lstm.
    // Seq: lstm.
    ad::Tensor* W = nullptr;
    ad::Tensor* b = nullptr;
    ad::Tensor* W2 = nullptr;
    ad::Tensor* b2 = nullptr;
    GateSet lstm;
};

/// Named parameter storage plus typed views into it.
class ParamStore {
public:
    ParamStore() = default;
    ParamStore(const ParamStore& other);
    ParamStore& operator=(const ParamStore& other);
    ParamStore(ParamStore&&) noexcept = default;
    ParamStore& operator=(ParamStore&&) noexcept = default;

    /// Allocates and initializes all tensors for `config` (see init_params).
    explicit ParamStore(const ModelConfig& config);

    const ModelConfig& config() const noexcept { return config_; }

    ad::Tensor& at(const std::string& name);
    const ad::Tensor& at(const std::string& name) const;
    bool contains(const std::string& name) const;
    /// Names in layout order.
    const std::vector<std::string>& names() const noexcept { return names_; }
    std::size_t scalar_count() const;

    ad::Tensor& embedding() { return *embedding_; }
    /// Container for a unit; `module` empty selects the default container.
    const GateSet& container(std::optional<ModuleType> module) const;
    const ModuleParams& module(ModuleType m) const;
    const GateSet& sequence_lstm() const { return sequence_lstm_; }
    ad::Tensor* head_weight() const { return head_W_; }
    ad::Tensor* head_bias() const { return head_b_; }

    void zero_grad();
    /// Multiplies every gradient by `factor`.
    void scale_grad(double factor);

private:
    void bind();
    GateSet gates(const std::string& prefix);

    ModelConfig config_;
    std::map<std::string, ad::Tensor> tensors_;
    std::vector<std::string> names_;

    ad::Tensor* embedding_ = nullptr;
    std::array<GateSet, kModuleTypeCount> typed_containers_{};
    GateSet default_container_;
    std::array<ModuleParams, kModuleTypeCount> modules_{};
    GateSet sequence_lstm_;
    ad::Tensor* head_W_ = nullptr;
    ad::Tensor* head_b_ = nullptr;
};

/// Weights uniform in [-1/sqrt(d), 1/sqrt(d)], biases zero, embeddings
/// uniform in [-0.05, 0.05]; every value comes from a counter-based
/// generator keyed by (config.seed, parameter name, index).
ParamStore init_params(const ModelConfig& config);

// ---------------------------------------------------------------------------
// Forward computation
// ---------------------------------------------------------------------------

struct Dispatch {
    enum class Kind : std::uint8_t { Typed, Seq, Default };
    Kind kind = Kind::Default;
    ModuleType module = ModuleType::Seq;

    friend bool operator==(const Dispatch&, const Dispatch&) = default;
};

Dispatch dispatch(const ast::AstNode& node, const ModelConfig& config);

struct UnitState {
    ad::Var h;
    ad::Var c;
};

class ArityViolation : public std::invalid_argument {
public:
    ArityViolation(ModuleType module, std::size_t got);
    ModuleType module() const noexcept { return module_; }
    std::size_t got() const noexcept { return got_; }

private:
    ModuleType module_;
    std::size_t got_;
};

/// One LSTM scan from zero state; returns the last hidden state.
ad::Var lstm_last_hidden(ad::Tape& tape, std::span<const ad::Var> inputs, const GateSet& cell,
                         std::size_t hidden);

/// h~ for a typed or seq unit from the ordered child hidden states.
ad::Var module_forward(ad::Tape& tape, ModuleType module, std::span<const ad::Var> child_hidden,
                       const ModuleParams& params, std::size_t hidden, bool for_outer_tanh = true);

/// The gated container around h~.
UnitState mtn_unit_forward(ad::Tape& tape, ad::Var x, std::span<const UnitState> children,
                           ad::Var h_tilde, const GateSet& container);

/// Records the encoder graph for one AST on `tape`; returns the root
/// hidden state as a (d, 1) Var. Parameters must outlive the tape.
ad::Var encode(ad::Tape& tape, const ast::AstNode& root, ParamStore& params);

/// Bottom-up encoding for tree variants (mtn-a, mtn-b, treelstm).
ad::Var encode_ast(ad::Tape& tape, const ast::AstNode& root, ParamStore& params);

/// LSTM over the pre-order node tokens (seq-lstm variant).
ad::Var encode_seq_baseline(ad::Tape& tape, const ast::AstNode& root, ParamStore& params);

/// Inference-only encoding; returns the code vector.
std::vector<double> embed(const ast::AstNode& root, ParamStore& params);

/// Per-node dispatch trace in post-order, for inspection and tests.
std::vector<std::pair<ast::NodeKind, Dispatch>> dispatch_trace(const ast::AstNode& root,
                                                                const ModelConfig& config);

// ---------------------------------------------------------------------------
// Model file
// ---------------------------------------------------------------------------

/// {"format":"mtn-model/1","config":{...},"params":{name:[floats]}}
std::string save_model(const ParamStore& params);
ParamStore load_model(std::string_view text);

}  // namespace mtn::model
