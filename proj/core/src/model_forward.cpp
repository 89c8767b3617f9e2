#include <optional>
#include <unordered_map>

#include "mtn/model.hpp"

namespace mtn::model {

using ad::Tape;
using ad::Var;

namespace {

std::optional<ModuleType> typed_module(ast::NodeKind kind) {
    switch (kind) {
        case ast::NodeKind::FuncDef: return ModuleType::FuncDef;
        case ast::NodeKind::While: return ModuleType::While;
        case ast::NodeKind::DoWhile: return ModuleType::DoWhile;
        case ast::NodeKind::For: return ModuleType::For;
        case ast::NodeKind::If: return ModuleType::If;
        case ast::NodeKind::Switch: return ModuleType::Switch;
        case ast::NodeKind::Case: return ModuleType::Case;
        default: return std::nullopt;
    }
}

// W_g x + b_g for the four gates.
using Projection = std::array<Var, 4>;

Projection project(Tape& tape, Var x, const GateSet& gates) {
    Projection p;
    for (std::size_t g = 0; g < 4; ++g)
        p[g] = tape.add(tape.matmul(tape.param(*gates.W[g]), x), tape.param(*gates.b[g]));
    return p;
}

Var gate_preactivation(Tape& tape, Var projected, ad::Tensor& U, std::optional<Var> h) {
    if (!h) return projected;
    return tape.add(projected, tape.matmul(tape.param(U), *h));
}

// Container equations given the input projection. `h_tilde` empty means
// the zero vector.
UnitState unit_from_projection(Tape& tape, const Projection& proj,
                               std::span<const UnitState> children, std::optional<Var> h_tilde,
                               const GateSet& container) {
    const Var i = tape.sigmoid(gate_preactivation(tape, proj[kInput], *container.U[kInput], h_tilde));
    const Var o =
        tape.sigmoid(gate_preactivation(tape, proj[kOutput], *container.U[kOutput], h_tilde));
    const Var u = tape.tanh(gate_preactivation(tape, proj[kUpdate], *container.U[kUpdate], h_tilde));
    Var c = tape.mul(i, u);
    if (!children.empty()) {
        std::vector<Var> kept;
        kept.reserve(children.size());
        for (const UnitState& child : children) {
            const Var f = tape.sigmoid(
                gate_preactivation(tape, proj[kForget], *container.U[kForget], child.h));
            kept.push_back(tape.mul(f, child.c));
        }
        c = tape.add(c, tape.sum_of(kept));
    }
    return UnitState{tape.mul(o, tape.tanh(c)), c};
}

// tanh(W [parts] + b)
Var recursive_unit(Tape& tape, ad::Tensor& W, ad::Tensor& b, std::initializer_list<Var> parts) {
    return tape.tanh(tape.add(tape.matmul(tape.param(W), tape.concat_rows(parts)), tape.param(b)));
}

// Bottom-up encoder for one tree. Input projections and leaf states only
// depend on (container, token), so they are recorded once per tape and
// reused; gradients accumulate through the shared records.
class TreeEncoder {
public:
    TreeEncoder(Tape& tape, ParamStore& params)
        : tape_(tape), params_(params), config_(params.config()), d_(config_.hidden) {}

    UnitState visit(const ast::AstNode& node) {
        std::vector<UnitState> children;
        children.reserve(node.children.size());
        for (const auto& child : node.children) children.push_back(visit(child));

        const std::size_t token = config_.vocab.index(ast::node_token(node, config_.identifier_mode));
        const Dispatch disp = dispatch(node, config_);
        const std::optional<ModuleType> slot =
            disp.kind == Dispatch::Kind::Default ? std::nullopt : std::optional(disp.module);
        const GateSet& container = params_.container(slot);
        const std::size_t slot_index = slot ? static_cast<std::size_t>(*slot) : kModuleTypeCount;
        const std::uint64_t key = slot_index * config_.vocab.size() + token;

        if (children.empty() && disp.kind == Dispatch::Kind::Default) {
            if (auto it = leaves_.find(key); it != leaves_.end()) return it->second;
            const UnitState leaf = unit_from_projection(tape_, projection(key, token, container), {},
                                                        std::nullopt, container);
            leaves_.emplace(key, leaf);
            return leaf;
        }

        std::vector<Var> hidden;
        hidden.reserve(children.size());
        for (const auto& c : children) hidden.push_back(c.h);

        std::optional<Var> h_tilde;
        if (disp.kind == Dispatch::Kind::Default) {
            h_tilde = tape_.sum_of(hidden);
        } else {
            h_tilde = module_forward(tape_, disp.module, hidden, params_.module(disp.module), d_,
                                     config_.for_outer_tanh);
        }
        return unit_from_projection(tape_, projection(key, token, container), children, h_tilde,
                                    container);
    }

private:
    const Projection& projection(std::uint64_t key, std::size_t token, const GateSet& container) {
        if (auto it = projections_.find(key); it != projections_.end()) return it->second;
        return projections_.emplace(key, project(tape_, input(token), container)).first->second;
    }

    Var input(std::size_t token) {
        if (auto it = inputs_.find(token); it != inputs_.end()) return it->second;
        return inputs_.emplace(token, tape_.row(params_.embedding(), token)).first->second;
    }

    Tape& tape_;
    ParamStore& params_;
    const ModelConfig& config_;
    std::size_t d_;
    std::unordered_map<std::size_t, Var> inputs_;
    std::unordered_map<std::uint64_t, Projection> projections_;
    std::unordered_map<std::uint64_t, UnitState> leaves_;
};

void trace(const ast::AstNode& node, const ModelConfig& config,
           std::vector<std::pair<ast::NodeKind, Dispatch>>& out) {
    for (const auto& child : node.children) trace(child, config, out);
    out.emplace_back(node.kind, dispatch(node, config));
}

}  // namespace

ArityViolation::ArityViolation(ModuleType module, std::size_t got)
    : std::invalid_argument(std::string(module_name(module)) + " module cannot take " +
                            std::to_string(got) + " children"),
      module_(module),
      got_(got) {}

Dispatch dispatch(const ast::AstNode& node, const ModelConfig& config) {
    if (node.children.empty()) return {};
    if (const auto m = typed_module(node.kind); m && config.module_enabled(*m))
        return {Dispatch::Kind::Typed, *m};
    if (ast::is_seq_kind(node.kind) && config.module_enabled(ModuleType::Seq))
        return {Dispatch::Kind::Seq, ModuleType::Seq};
    return {};
}

Var lstm_last_hidden(Tape& tape, std::span<const Var> inputs, const GateSet& cell,
                     std::size_t hidden) {
    if (inputs.empty()) return tape.zeros(hidden);
    std::optional<Var> h;
    std::optional<Var> c;
    for (Var x : inputs) {
        const Projection p = project(tape, x, cell);
        const Var i = tape.sigmoid(gate_preactivation(tape, p[kInput], *cell.U[kInput], h));
        const Var o = tape.sigmoid(gate_preactivation(tape, p[kOutput], *cell.U[kOutput], h));
        const Var u = tape.tanh(gate_preactivation(tape, p[kUpdate], *cell.U[kUpdate], h));
        Var next_c = tape.mul(i, u);
        if (c) {
            const Var f = tape.sigmoid(gate_preactivation(tape, p[kForget], *cell.U[kForget], h));
            next_c = tape.add(next_c, tape.mul(f, *c));
        }
        c = next_c;
        h = tape.mul(o, tape.tanh(*c));
    }
    return *h;
}

Var module_forward(Tape& tape, ModuleType module, std::span<const Var> child_hidden,
                   const ModuleParams& params, std::size_t hidden, bool for_outer_tanh) {
    const std::size_t n = child_hidden.size();
    switch (module) {
        case ModuleType::FuncDef:
        case ModuleType::While:
        case ModuleType::DoWhile:
        case ModuleType::Switch:
            if (n != 2) throw ArityViolation(module, n);
            return recursive_unit(tape, *params.W, *params.b, {child_hidden[0], child_hidden[1]});

        case ModuleType::If: {
            if (n != 2 && n != 3) throw ArityViolation(module, n);
            const Var taken =
                recursive_unit(tape, *params.W, *params.b, {child_hidden[0], child_hidden[1]});
            if (n == 2) return taken;
            const Var other =
                recursive_unit(tape, *params.W, *params.b, {child_hidden[0], child_hidden[2]});
            return tape.max(taken, other);
        }

        case ModuleType::For: {
            if (n != 4) throw ArityViolation(module, n);
            const Var control = recursive_unit(tape, *params.W, *params.b,
                                               {child_hidden[0], child_hidden[1], child_hidden[2]});
            const Var outer =
                tape.add(tape.matmul(tape.param(*params.W2), tape.concat_rows({control, child_hidden[3]})),
                         tape.param(*params.b2));
            return for_outer_tanh ? tape.tanh(outer) : outer;
        }

        case ModuleType::Case: {
            if (n < 1) throw ArityViolation(module, n);
            const Var body = lstm_last_hidden(tape, child_hidden.subspan(1), params.lstm, hidden);
            return recursive_unit(tape, *params.W, *params.b, {child_hidden[0], body});
        }

        case ModuleType::Seq:
            if (n < 1) throw ArityViolation(module, n);
            return lstm_last_hidden(tape, child_hidden, params.lstm, hidden);
    }
    throw ArityViolation(module, n);
}

UnitState mtn_unit_forward(Tape& tape, Var x, std::span<const UnitState> children, Var h_tilde,
                           const GateSet& container) {
    return unit_from_projection(tape, project(tape, x, container), children, h_tilde, container);
}

Var encode_ast(Tape& tape, const ast::AstNode& root, ParamStore& params) {
    TreeEncoder encoder(tape, params);
    return encoder.visit(root).h;
}

Var encode_seq_baseline(Tape& tape, const ast::AstNode& root, ParamStore& params) {
    const ModelConfig& config = params.config();
    if (config.variant != Variant::SeqLstm)
        throw std::invalid_argument("encode_seq_baseline requires the seq-lstm variant");
    const auto tokens = ast::preorder_tokens(root, config.identifier_mode);
    std::unordered_map<std::size_t, Var> rows;
    std::vector<Var> inputs;
    inputs.reserve(tokens.size());
    for (const auto& tok : tokens) {
        const std::size_t idx = config.vocab.index(tok);
        auto it = rows.find(idx);
        if (it == rows.end()) it = rows.emplace(idx, tape.row(params.embedding(), idx)).first;
        inputs.push_back(it->second);
    }
    return lstm_last_hidden(tape, inputs, params.sequence_lstm(), config.hidden);
}

Var encode(Tape& tape, const ast::AstNode& root, ParamStore& params) {
    if (params.config().variant == Variant::SeqLstm) return encode_seq_baseline(tape, root, params);
    return encode_ast(tape, root, params);
}

std::vector<double> embed(const ast::AstNode& root, ParamStore& params) {
    Tape tape;
    const Var v = encode(tape, root, params);
    const auto value = v.value();
    return {value.begin(), value.end()};
}

std::vector<std::pair<ast::NodeKind, Dispatch>> dispatch_trace(const ast::AstNode& root,
                                                                const ModelConfig& config) {
    std::vector<std::pair<ast::NodeKind, Dispatch>> out;
    trace(root, config, out);
    return out;
}

}  // namespace mtn::model
