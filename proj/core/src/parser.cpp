#include <array>

#include "mtn/frontend.hpp"

namespace mtn::ast {

namespace {

constexpr std::array<std::string_view, 5> kTypeNames = {"int", "char", "float", "double", "void"};

class Parser {
public:
    explicit Parser(std::span<const Token> tokens) : toks_(tokens) {}

    AstNode translation_unit() {
        AstNode unit(NodeKind::TranslationUnit, Span{1, 1});
        while (!at_end()) external(unit);
        return unit;
    }

private:
    // -- token helpers ------------------------------------------------------

    bool at_end() const { return pos_ >= toks_.size(); }

    const Token* peek(std::size_t ahead = 0) const {
        return pos_ + ahead < toks_.size() ? &toks_[pos_ + ahead] : nullptr;
    }

    bool at(std::string_view lexeme, std::size_t ahead = 0) const {
        const Token* t = peek(ahead);
        return t && t->lexeme == lexeme && t->kind != TokenKind::StringLiteral &&
               t->kind != TokenKind::CharLiteral;
    }

    bool at_type() const {
        const Token* t = peek();
        if (!t || t->kind != TokenKind::Keyword) return false;
        for (auto name : kTypeNames) {
            if (t->lexeme == name) return true;
        }
        return false;
    }

    Span here() const {
        if (const Token* t = peek()) return {t->line, t->column};
        if (toks_.empty()) return {1, 1};
        return {toks_.back().line, toks_.back().column};
    }

    [[noreturn]] void fail(std::string expected) const {
        const Span s = here();
        std::string found = at_end() ? "end of input" : "'" + peek()->lexeme + "'";
        throw SyntaxError(std::move(expected), std::move(found), s.line, s.column);
    }

    const Token& expect(std::string_view lexeme) {
        if (!at(lexeme)) fail("'" + std::string(lexeme) + "'");
        return toks_[pos_++];
    }

    const Token& expect_identifier() {
        const Token* t = peek();
        if (!t || t->kind != TokenKind::Identifier) fail("identifier");
        ++pos_;
        return *t;
    }

    const Token& expect_type() {
        if (!at_type()) fail("type name");
        return toks_[pos_++];
    }

    static Span span_of(const Token& t) { return {t.line, t.column}; }

    // -- declarations -------------------------------------------------------

    void external(AstNode& unit) {
        const Token& type = expect_type();
        const Token& name = expect_identifier();
        if (at("(")) {
            unit.children.push_back(function_definition(type, name));
            return;
        }
        declarators(type, name, unit.children);
        expect(";");
    }

    AstNode function_definition(const Token& type, const Token& name) {
        (void)type;
        AstNode decl(NodeKind::FuncDecl, span_of(name));
        decl.children.emplace_back(NodeKind::ID, name.lexeme, span_of(name));
        decl.children.push_back(parameter_list());
        if (!at("{")) fail("'{'");
        AstNode def(NodeKind::FuncDef, span_of(type));
        def.children.push_back(std::move(decl));
        def.children.push_back(compound());
        return def;
    }

    AstNode parameter_list() {
        AstNode params(NodeKind::ParamList, here());
        expect("(");
        if (at("void") && at(")", 1)) {
            ++pos_;
        } else if (!at(")")) {
            do {
                const Token& type = expect_type();
                const Token& name = expect_identifier();
                AstNode decl(NodeKind::Decl, name.lexeme, span_of(name));
                if (at("[")) {
                    ++pos_;
                    expect("]");
                    decl.children.emplace_back(NodeKind::IdentifierType, type.lexeme + "[]",
                                               span_of(type));
                    decl.children.emplace_back(NodeKind::Empty, span_of(name));
                } else {
                    decl.children.emplace_back(NodeKind::IdentifierType, type.lexeme,
                                               span_of(type));
                }
                params.children.push_back(std::move(decl));
            } while (at(",") && (++pos_, true));
        }
        expect(")");
        return params;
    }

    // Parses the declarators after "type name" and appends one Decl per
    // declarator to `out`. Does not consume the terminating ';'.
    void declarators(const Token& type, const Token& first_name, std::vector<AstNode>& out) {
        const Token* name = &first_name;
        for (;;) {
            out.push_back(declarator(type, *name));
            if (!at(",")) break;
            ++pos_;
            name = &expect_identifier();
        }
    }

    AstNode declarator(const Token& type, const Token& name) {
        AstNode decl(NodeKind::Decl, name.lexeme, span_of(name));
        if (at("[")) {
            ++pos_;
            decl.children.emplace_back(NodeKind::IdentifierType, type.lexeme + "[]",
                                       span_of(type));
            if (at("]")) {
                decl.children.emplace_back(NodeKind::Empty, here());
            } else {
                decl.children.push_back(expression());
            }
            expect("]");
            return decl;
        }
        decl.children.emplace_back(NodeKind::IdentifierType, type.lexeme, span_of(type));
        if (at("=")) {
            ++pos_;
            decl.children.push_back(assignment());
        }
        return decl;
    }

    // "type name ...;" inside a block: one Decl per declarator.
    void local_declaration(std::vector<AstNode>& out) {
        const Token& type = expect_type();
        const Token& name = expect_identifier();
        declarators(type, name, out);
        expect(";");
    }

    // -- statements ---------------------------------------------------------

    AstNode compound() {
        AstNode block(NodeKind::Compound, here());
        expect("{");
        block_items(block.children);
        expect("}");
        return block;
    }

    // Items up to (not including) '}' or, when `stop_at_label`, a case/default label.
    void block_items(std::vector<AstNode>& out, bool stop_at_label = false) {
        for (;;) {
            if (at_end()) fail("'}'");
            if (at("}")) return;
            if (stop_at_label && (at("case") || at("default"))) return;
            if (at_type()) {
                local_declaration(out);
            } else {
                out.push_back(statement());
            }
        }
    }

    AstNode statement() {
        if (at_end()) fail("statement");
        const Token& t = *peek();
        const Span s = span_of(t);
        if (t.kind == TokenKind::Punct && t.lexeme == "{") return compound();
        if (t.kind == TokenKind::Punct && t.lexeme == ";") {
            ++pos_;
            return AstNode(NodeKind::EmptyStatement, s);
        }
        if (t.kind == TokenKind::Keyword) {
            if (t.lexeme == "if") return if_statement();
            if (t.lexeme == "while") return while_statement();
            if (t.lexeme == "do") return do_while_statement();
            if (t.lexeme == "for") return for_statement();
            if (t.lexeme == "switch") return switch_statement();
            if (t.lexeme == "case") return case_label();
            if (t.lexeme == "default") return default_label();
            if (t.lexeme == "return") {
                ++pos_;
                AstNode ret(NodeKind::Return, s);
                if (!at(";")) ret.children.push_back(expression());
                expect(";");
                return ret;
            }
            if (t.lexeme == "break" || t.lexeme == "continue") {
                ++pos_;
                expect(";");
                return AstNode(t.lexeme == "break" ? NodeKind::Break : NodeKind::Continue, s);
            }
            if (t.lexeme == "else") fail("statement");
        }
        AstNode expr = expression();
        expect(";");
        return expr;
    }

    AstNode parenthesized() {
        expect("(");
        AstNode e = expression();
        expect(")");
        return e;
    }

    AstNode if_statement() {
        AstNode node(NodeKind::If, span_of(*peek()));
        ++pos_;
        node.children.push_back(parenthesized());
        node.children.push_back(statement());
        if (at("else")) {
            ++pos_;
            node.children.push_back(statement());
        }
        return node;
    }

    AstNode while_statement() {
        AstNode node(NodeKind::While, span_of(*peek()));
        ++pos_;
        node.children.push_back(parenthesized());
        node.children.push_back(statement());
        return node;
    }

    AstNode do_while_statement() {
        AstNode node(NodeKind::DoWhile, span_of(*peek()));
        ++pos_;
        AstNode body = statement();
        expect("while");
        node.children.push_back(parenthesized());
        node.children.push_back(std::move(body));
        expect(";");
        return node;
    }

    AstNode for_statement() {
        AstNode node(NodeKind::For, span_of(*peek()));
        ++pos_;
        expect("(");
        if (at_type()) {
            AstNode list(NodeKind::DeclList, here());
            local_declaration(list.children);
            node.children.push_back(std::move(list));
        } else {
            node.children.push_back(optional_expression(";"));
            expect(";");
        }
        node.children.push_back(optional_expression(";"));
        expect(";");
        node.children.push_back(optional_expression(")"));
        expect(")");
        node.children.push_back(statement());
        return node;
    }

    AstNode optional_expression(std::string_view terminator) {
        if (at(terminator)) return AstNode(NodeKind::Empty, here());
        return expression();
    }

    AstNode switch_statement() {
        AstNode node(NodeKind::Switch, span_of(*peek()));
        ++pos_;
        node.children.push_back(parenthesized());
        node.children.push_back(statement());
        return node;
    }

    AstNode case_label() {
        AstNode node(NodeKind::Case, span_of(*peek()));
        ++pos_;
        node.children.push_back(expression());
        expect(":");
        block_items(node.children, true);
        return node;
    }

    AstNode default_label() {
        AstNode node(NodeKind::Default, span_of(*peek()));
        ++pos_;
        expect(":");
        block_items(node.children, true);
        return node;
    }

    // -- expressions --------------------------------------------------------

    AstNode expression() { return assignment(); }

    AstNode assignment() {
        AstNode lhs = logical_or();
        if (const Token* t = peek(); t && t->kind == TokenKind::Operator &&
                                    (t->lexeme == "=" || t->lexeme == "+=" || t->lexeme == "-=" ||
                                     t->lexeme == "*=" || t->lexeme == "/=")) {
            ++pos_;
            AstNode node(NodeKind::Assignment, t->lexeme, span_of(*t));
            node.children.push_back(std::move(lhs));
            node.children.push_back(assignment());
            return node;
        }
        return lhs;
    }

    template <typename Next>
    AstNode binary_level(std::initializer_list<std::string_view> ops, Next next) {
        AstNode lhs = (this->*next)();
        for (;;) {
            const Token* t = peek();
            if (!t || t->kind != TokenKind::Operator) return lhs;
            bool matched = false;
            for (auto op : ops) matched = matched || t->lexeme == op;
            if (!matched) return lhs;
            ++pos_;
            AstNode node(NodeKind::BinaryOp, t->lexeme, span_of(*t));
            node.children.push_back(std::move(lhs));
            node.children.push_back((this->*next)());
            lhs = std::move(node);
        }
    }

    AstNode logical_or() { return binary_level({"||"}, &Parser::logical_and); }
    AstNode logical_and() { return binary_level({"&&"}, &Parser::bit_or); }
    AstNode bit_or() { return binary_level({"|"}, &Parser::bit_xor); }
    AstNode bit_xor() { return binary_level({"^"}, &Parser::bit_and); }
    AstNode bit_and() { return binary_level({"&"}, &Parser::equality); }
    AstNode equality() { return binary_level({"==", "!="}, &Parser::relational); }
    AstNode relational() { return binary_level({"<", ">", "<=", ">="}, &Parser::shift); }
    AstNode shift() { return binary_level({"<<", ">>"}, &Parser::additive); }
    AstNode additive() { return binary_level({"+", "-"}, &Parser::multiplicative); }
    AstNode multiplicative() { return binary_level({"*", "/", "%"}, &Parser::unary); }

    AstNode unary() {
        const Token* t = peek();
        if (t && t->kind == TokenKind::Operator &&
            (t->lexeme == "-" || t->lexeme == "+" || t->lexeme == "!" || t->lexeme == "++" ||
             t->lexeme == "--")) {
            ++pos_;
            AstNode node(NodeKind::UnaryOp, t->lexeme, span_of(*t));
            node.children.push_back(unary());
            return node;
        }
        return postfix();
    }

    AstNode postfix() {
        AstNode expr = primary();
        for (;;) {
            if (at("[")) {
                const Span s = here();
                ++pos_;
                AstNode ref(NodeKind::ArrayRef, s);
                ref.children.push_back(std::move(expr));
                ref.children.push_back(expression());
                expect("]");
                expr = std::move(ref);
            } else if (at("(")) {
                if (expr.kind != NodeKind::ID) fail("';'");
                AstNode call(NodeKind::FuncCall, expr.span);
                AstNode args(NodeKind::ExprList, here());
                ++pos_;
                if (!at(")")) {
                    args.children.push_back(assignment());
                    while (at(",")) {
                        ++pos_;
                        args.children.push_back(assignment());
                    }
                }
                expect(")");
                call.children.push_back(std::move(expr));
                call.children.push_back(std::move(args));
                expr = std::move(call);
            } else if (at("++") || at("--")) {
                const Token& t = toks_[pos_++];
                AstNode node(NodeKind::UnaryOp, "p" + t.lexeme, span_of(t));
                node.children.push_back(std::move(expr));
                expr = std::move(node);
            } else {
                return expr;
            }
        }
    }

    AstNode primary() {
        const Token* t = peek();
        if (!t) fail("expression");
        switch (t->kind) {
            case TokenKind::Identifier:
                ++pos_;
                return AstNode(NodeKind::ID, t->lexeme, span_of(*t));
            case TokenKind::IntLiteral:
            case TokenKind::FloatLiteral:
            case TokenKind::CharLiteral:
            case TokenKind::StringLiteral:
                ++pos_;
                return AstNode(NodeKind::Constant, t->lexeme, span_of(*t));
            case TokenKind::Punct:
                if (t->lexeme == "(") return parenthesized();
                break;
            default: break;
        }
        fail("expression");
    }

    std::span<const Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

AstNode parse(std::span<const Token> tokens) {
    return Parser(tokens).translation_unit();
}

AstNode parse_source(std::string_view source) {
    const auto tokens = tokenize(source);
    AstNode root = parse(tokens);
    validate_arity(root);
    return root;
}

}  // namespace mtn::ast
