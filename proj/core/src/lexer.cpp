#include <array>
#include <cctype>

#include "mtn/frontend.hpp"

namespace mtn::ast {

namespace {

constexpr std::array<std::string_view, 16> kKeywords = {
    "int", "char", "float", "double", "void", "if", "else", "while",
    "do", "for", "switch", "case", "default", "return", "break", "continue",
};

constexpr std::array<std::string_view, 14> kTwoCharOps = {
    "==", "!=", "<=", ">=", "&&", "||", "<<", ">>", "++", "--", "+=", "-=", "*=", "/=",
};

constexpr std::string_view kOneCharOps = "=+-*/%<>!&|^";
constexpr std::string_view kPunct = "(){}[];,:";

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_digit(char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (skip_trivia(), pos_ < src_.size()) out.push_back(next());
        return out;
    }

private:
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_trivia() {
        while (pos_ < src_.size()) {
            const char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && peek() != '\n') advance();
            } else if (c == '/' && peek(1) == '*') {
                const int line = line_;
                const int col = col_;
                advance();
                advance();
                while (!(peek() == '*' && peek(1) == '/')) {
                    if (pos_ >= src_.size())
                        throw LexError(LexError::Reason::UnterminatedLiteral, line, col);
                    advance();
                }
                advance();
                advance();
            } else {
                return;
            }
        }
    }

    Token make(TokenKind kind, std::size_t start, int line, int col) const {
        return Token{kind, std::string(src_.substr(start, pos_ - start)), line, col};
    }

    Token next() {
        const std::size_t start = pos_;
        const int line = line_;
        const int col = col_;
        const char c = peek();

        if (is_ident_start(c)) {
            while (is_ident_char(peek())) advance();
            Token tok = make(TokenKind::Identifier, start, line, col);
            for (auto kw : kKeywords) {
                if (tok.lexeme == kw) tok.kind = TokenKind::Keyword;
            }
            return tok;
        }
        if (is_digit(c) || (c == '.' && is_digit(peek(1)))) return number(start, line, col);
        if (c == '\'' || c == '"') return quoted(start, line, col);

        for (auto op : kTwoCharOps) {
            if (peek() == op[0] && peek(1) == op[1]) {
                advance();
                advance();
                return make(TokenKind::Operator, start, line, col);
            }
        }
        if (kOneCharOps.find(c) != std::string_view::npos) {
            advance();
            return make(TokenKind::Operator, start, line, col);
        }
        if (kPunct.find(c) != std::string_view::npos) {
            advance();
            return make(TokenKind::Punct, start, line, col);
        }
        throw LexError(LexError::Reason::UnknownCharacter, line, col);
    }

    Token number(std::size_t start, int line, int col) {
        bool is_float = false;
        if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
            advance();
            advance();
            while (std::isxdigit(static_cast<unsigned char>(peek()))) advance();
        } else {
            while (is_digit(peek())) advance();
            if (peek() == '.') {
                is_float = true;
                advance();
                while (is_digit(peek())) advance();
            }
            if (peek() == 'e' || peek() == 'E') {
                const char sign = peek(1);
                if (is_digit(sign) || ((sign == '+' || sign == '-') && is_digit(peek(2)))) {
                    is_float = true;
                    advance();
                    if (!is_digit(peek())) advance();
                    while (is_digit(peek())) advance();
                }
            }
        }
        while (peek() == 'f' || peek() == 'F' || peek() == 'l' || peek() == 'L' || peek() == 'u' ||
               peek() == 'U') {
            if (peek() == 'f' || peek() == 'F') is_float = true;
            advance();
        }
        return make(is_float ? TokenKind::FloatLiteral : TokenKind::IntLiteral, start, line, col);
    }

    Token quoted(std::size_t start, int line, int col) {
        const char quote = peek();
        advance();
        for (;;) {
            const char c = peek();
            if (pos_ >= src_.size() || c == '\n')
                throw LexError(LexError::Reason::UnterminatedLiteral, line, col);
            if (c == '\\') {
                advance();
                if (pos_ >= src_.size() || peek() == '\n')
                    throw LexError(LexError::Reason::UnterminatedLiteral, line, col);
                advance();
                continue;
            }
            advance();
            if (c == quote) break;
        }
        return make(quote == '"' ? TokenKind::StringLiteral : TokenKind::CharLiteral, start, line,
                    col);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace

std::string_view token_kind_name(TokenKind kind) noexcept {
    switch (kind) {
        case TokenKind::Keyword: return "kw";
        case TokenKind::Identifier: return "ident";
        case TokenKind::IntLiteral: return "int";
        case TokenKind::FloatLiteral: return "float";
        case TokenKind::CharLiteral: return "char";
        case TokenKind::StringLiteral: return "string";
        case TokenKind::Operator: return "op";
        case TokenKind::Punct: return "punct";
    }
    return "?";
}

std::vector<Token> tokenize(std::string_view source) {
    return Lexer(source).run();
}

}  // namespace mtn::ast
