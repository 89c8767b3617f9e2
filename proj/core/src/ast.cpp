#include "mtn/ast.hpp"

#include <array>
#include <string>

namespace mtn::ast {

namespace {

constexpr std::array<std::string_view, kNodeKindCount> kKindNames = {
    "TranslationUnit", "FuncDef",        "FuncDecl", "ParamList",  "Decl",      "DeclList",
    "IdentifierType",  "Compound",       "If",       "While",      "DoWhile",   "For",
    "Switch",          "Case",           "Default",  "Return",     "Break",     "Continue",
    "EmptyStatement",  "Empty",          "Assignment", "BinaryOp", "UnaryOp",   "FuncCall",
    "ExprList",        "ArrayRef",       "ID",       "Constant",
};

void collect_tokens(const AstNode& node, IdentifierMode mode, std::vector<std::string>& out) {
    out.push_back(node_token(node, mode));
    for (const auto& child : node.children) collect_tokens(child, mode, out);
}

bool arity_ok(const AstNode& node) {
    const std::size_t n = node.children.size();
    switch (node.kind) {
        case NodeKind::For: return n == 4;
        case NodeKind::If: return n == 2 || n == 3;
        case NodeKind::While:
        case NodeKind::DoWhile:
        case NodeKind::Switch:
        case NodeKind::FuncDef: return n == 2;
        case NodeKind::Case: return n >= 1;
        default: return true;
    }
}

}  // namespace

std::string_view kind_name(NodeKind kind) noexcept {
    return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<NodeKind> kind_from_name(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (kKindNames[i] == name) return static_cast<NodeKind>(i);
    }
    return std::nullopt;
}

bool is_seq_kind(NodeKind kind) noexcept {
    switch (kind) {
        case NodeKind::TranslationUnit:
        case NodeKind::Compound:
        case NodeKind::ParamList:
        case NodeKind::DeclList:
        case NodeKind::ExprList:
        case NodeKind::Default: return true;
        default: return false;
    }
}

bool carries_value(NodeKind kind) noexcept {
    switch (kind) {
        case NodeKind::ID:
        case NodeKind::Constant:
        case NodeKind::BinaryOp:
        case NodeKind::UnaryOp:
        case NodeKind::Assignment:
        case NodeKind::Decl:
        case NodeKind::IdentifierType: return true;
        default: return false;
    }
}

std::size_t AstNode::size() const noexcept {
    std::size_t n = 1;
    for (const auto& child : children) n += child.size();
    return n;
}

bool operator==(const AstNode& a, const AstNode& b) noexcept {
    return a.kind == b.kind && a.value == b.value && a.children == b.children;
}

std::string_view identifier_mode_name(IdentifierMode mode) noexcept {
    return mode == IdentifierMode::TypesOnly ? "types-only" : "with-ids";
}

IdentifierMode identifier_mode_from_name(std::string_view name) {
    if (name == "types-only") return IdentifierMode::TypesOnly;
    if (name == "with-ids") return IdentifierMode::WithIds;
    throw std::invalid_argument("unknown identifier mode: " + std::string(name));
}

std::string node_token(const AstNode& node, IdentifierMode mode) {
    std::string token(kind_name(node.kind));
    if (mode == IdentifierMode::WithIds && node.value) {
        token += ':';
        token += *node.value;
    }
    return token;
}

std::vector<std::string> preorder_tokens(const AstNode& root, IdentifierMode mode) {
    std::vector<std::string> out;
    collect_tokens(root, mode, out);
    return out;
}

// ---------------------------------------------------------------------------

LexError::LexError(Reason reason, int line, int column)
    : FrontendError((reason == Reason::UnknownCharacter ? "unknown character at "
                                                        : "unterminated literal at ") +
                    std::to_string(line) + ":" + std::to_string(column)),
      reason_(reason),
      line_(line),
      column_(column) {}

std::string_view LexError::code() const noexcept {
    return reason_ == Reason::UnknownCharacter ? "UnknownCharacter" : "UnterminatedLiteral";
}

SyntaxError::SyntaxError(std::string expected, std::string found, int line, int column)
    : FrontendError("expected " + expected + " but found " + found + " at " +
                    std::to_string(line) + ":" + std::to_string(column)),
      expected_(std::move(expected)),
      found_(std::move(found)),
      line_(line),
      column_(column) {}

InterchangeError::InterchangeError(Reason reason, std::string detail)
    : FrontendError((reason == Reason::MalformedDocument ? "malformed AST document at "
                                                         : "unknown node kind ") +
                    detail),
      reason_(reason),
      detail_(std::move(detail)) {}

std::string_view InterchangeError::code() const noexcept {
    return reason_ == Reason::MalformedDocument ? "MalformedDocument" : "UnknownKind";
}

ArityError::ArityError(NodeKind kind, std::size_t got, Span span)
    : FrontendError(std::string(kind_name(kind)) + " node has invalid child count " +
                    std::to_string(got) + " at " + std::to_string(span.line) + ":" +
                    std::to_string(span.column)),
      kind_(kind),
      got_(got) {}

void validate_arity(const AstNode& root) {
    if (!arity_ok(root)) throw ArityError(root.kind, root.children.size(), root.span);
    for (const auto& child : root.children) validate_arity(child);
}

}  // namespace mtn::ast
