#pragma once

// Tokenizer, recursive-descent parser and JSON interchange for the C subset.
//
// Supported subset: functions and global declarations over the scalar
// types int/char/float/double/void, one-dimensional arrays, the usual
// statements (if/else, while, do-while, for, switch/case/default,
// return/break/continue) and C-precedence expressions over the listed
// operators. No preprocessor, pointers, structs or typedefs.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mtn/ast.hpp"

namespace mtn::ast {

enum class TokenKind : std::uint8_t {
    Keyword,
    Identifier,
    IntLiteral,
    FloatLiteral,
    CharLiteral,
    StringLiteral,
    Operator,
    Punct,
};

std::string_view token_kind_name(TokenKind kind) noexcept;

struct Token {
    TokenKind kind;
    std::string lexeme;
    int line;
    int column;

    friend bool operator==(const Token&, const Token&) = default;
};

/// Splits source text into tokens; comments and whitespace are dropped.
/// Throws LexError.
std::vector<Token> tokenize(std::string_view source);

/// Parses a token stream into a TranslationUnit. Throws SyntaxError on the
/// first failure; there is no recovery.
AstNode parse(std::span<const Token> tokens);

/// tokenize + parse + validate_arity.
AstNode parse_source(std::string_view source);

/// Canonical compact JSON: {"kind":..,"value":..,"children":[..]}.
std::string to_interchange(const AstNode& node);

/// Inverse of to_interchange. Throws InterchangeError.
AstNode from_interchange(std::string_view text);

}  // namespace mtn::ast
