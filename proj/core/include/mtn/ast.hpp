#pragma once

// Typed AST for the supported C subset.
//
// Node shapes follow pycparser conventions closely enough that ASTs
// exported by that tool (converted to the interchange format) import
// without remapping.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mtn::ast {

enum class NodeKind : std::uint8_t {
    TranslationUnit,
    FuncDef,
    FuncDecl,
    ParamList,
    Decl,
    DeclList,
    IdentifierType,
    Compound,
    If,
    While,
    DoWhile,
    For,
    Switch,
    Case,
    Default,
    Return,
    Break,
    Continue,
    EmptyStatement,
    Empty,
    Assignment,
    BinaryOp,
    UnaryOp,
    FuncCall,
    ExprList,
    ArrayRef,
    ID,
    Constant,
};

inline constexpr std::size_t kNodeKindCount = 28;

std::string_view kind_name(NodeKind kind) noexcept;
std::optional<NodeKind> kind_from_name(std::string_view name) noexcept;

/// Kinds whose children form an arbitrary-length homogeneous sequence.
bool is_seq_kind(NodeKind kind) noexcept;

/// Kinds that carry a lexical value (identifier name, literal, operator).
bool carries_value(NodeKind kind) noexcept;

struct Span {
    int line = 0;
    int column = 0;
};

struct AstNode {
    NodeKind kind = NodeKind::Empty;
    std::optional<std::string> value;
    std::vector<AstNode> children;
    Span span;

    AstNode() = default;
    explicit AstNode(NodeKind k, Span s = {}) : kind(k), span(s) {}
    AstNode(NodeKind k, std::string v, Span s = {}) : kind(k), value(std::move(v)), span(s) {}

    /// Number of nodes in the subtree rooted here.
    std::size_t size() const noexcept;

    /// Structural equality: kind, value and children in order. Spans are ignored.
    friend bool operator==(const AstNode& a, const AstNode& b) noexcept;
};

enum class IdentifierMode : std::uint8_t { TypesOnly, WithIds };

std::string_view identifier_mode_name(IdentifierMode mode) noexcept;
IdentifierMode identifier_mode_from_name(std::string_view name);

/// Vocabulary token for a node: the kind name, or "kind:value" for
/// value-carrying nodes in with-ids mode.
std::string node_token(const AstNode& node, IdentifierMode mode);

/// Pre-order depth-first list of node tokens.
std::vector<std::string> preorder_tokens(const AstNode& root, IdentifierMode mode);

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class FrontendError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    /// Short machine-readable error name, e.g. "SyntaxError".
    virtual std::string_view code() const noexcept = 0;
};

class LexError : public FrontendError {
public:
    enum class Reason { UnknownCharacter, UnterminatedLiteral };

    LexError(Reason reason, int line, int column);

    Reason reason() const noexcept { return reason_; }
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    std::string_view code() const noexcept override;

private:
    Reason reason_;
    int line_;
    int column_;
};

class SyntaxError : public FrontendError {
public:
    SyntaxError(std::string expected, std::string found, int line, int column);

    const std::string& expected() const noexcept { return expected_; }
    const std::string& found() const noexcept { return found_; }
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    std::string_view code() const noexcept override { return "SyntaxError"; }

private:
    std::string expected_;
    std::string found_;
    int line_;
    int column_;
};

class InterchangeError : public FrontendError {
public:
    enum class Reason { MalformedDocument, UnknownKind };

    InterchangeError(Reason reason, std::string detail);

    Reason reason() const noexcept { return reason_; }
    /// JSON path for MalformedDocument, the offending name for UnknownKind.
    const std::string& detail() const noexcept { return detail_; }
    std::string_view code() const noexcept override;

private:
    Reason reason_;
    std::string detail_;
};

class ArityError : public FrontendError {
public:
    ArityError(NodeKind kind, std::size_t got, Span span);

    NodeKind kind() const noexcept { return kind_; }
    std::size_t got() const noexcept { return got_; }
    std::string_view code() const noexcept override { return "ArityViolation"; }

private:
    NodeKind kind_;
    std::size_t got_;
};

/// Checks the fixed/bounded arities of control-flow nodes over the whole tree.
void validate_arity(const AstNode& root);

}  // namespace mtn::ast
