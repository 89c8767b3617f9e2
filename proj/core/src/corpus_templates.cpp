// Program templates for the synthetic corpora. Each template writes C
// source line by line; the Gen context owns every random choice so a seed
// fully determines the text.

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <set>

#include "mtn/corpus.hpp"
#include "mtn/random.hpp"

namespace mtn::corpus {

namespace {

using Lines = std::vector<std::string>;

constexpr std::array<std::string_view, 28> kNamePool = {
    "a",   "b",   "c",   "k",   "m",   "p",   "q",   "w",   "x",   "y",
    "z",   "cnt", "tmp", "val", "acc", "res", "num", "len", "idx", "cur",
    "tot", "lim", "top", "buf", "arr", "key", "ans", "hi",
};

class Gen {
public:
    Gen(std::uint64_t seed, const VariationKnobs& knobs) : rng_(seed), knobs_(knobs) {
        used_ = {"main", "printf"};
    }

    // Stable per-program name for a template identifier.
    std::string id(const std::string& base) {
        if (const auto it = names_.find(base); it != names_.end()) return it->second;
        std::string name = base;
        if (rng_.chance(knobs_.rename)) name = std::string(kNamePool[rng_.below(kNamePool.size())]);
        if (used_.contains(name)) {
            std::size_t suffix = 1;
            while (used_.contains(name + std::to_string(suffix))) ++suffix;
            name += std::to_string(suffix);
        }
        used_.insert(name);
        names_.emplace(base, name);
        return name;
    }

    std::string fresh() { return id("dead" + std::to_string(dead_++)); }

    // Jittered constant, never below `lo`.
    std::string num(long base, long lo = 0) {
        const long j = knobs_.jitter;
        const long v = j > 0 ? base + static_cast<long>(rng_.range(-j, j)) : base;
        return std::to_string(std::max(v, lo));
    }

    bool coin(double p = 0.5) { return rng_.chance(p); }
    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_.below(n)); }
    std::size_t between(std::size_t lo, std::size_t hi) { return lo + pick(hi - lo + 1); }
    bool swap_loop() { return rng_.chance(knobs_.loop_swap); }

    // Dead declarations and order shuffling for a run of independent
    // declarations.
    void decorate(std::vector<std::string>& decls) {
        if (rng_.chance(knobs_.dead_code)) {
            const std::string d = fresh();
            decls.push_back("int " + d + " = " + num(5) + ";");
            if (rng_.chance(0.5)) decls.push_back(d + " = " + d + " * 1;");
        }
        if (decls.size() > 1 && rng_.chance(knobs_.shuffle)) {
            // keep a dead no-op assignment behind its declaration
            std::vector<std::string> heads;
            std::vector<std::string> tails;
            for (auto& d : decls) (d.rfind("int ", 0) == 0 || d.rfind("char ", 0) == 0 ? heads : tails).push_back(d);
            rng_.shuffle(std::span<std::string>(heads));
            heads.insert(heads.end(), tails.begin(), tails.end());
            decls = std::move(heads);
        }
    }

private:
    Rng rng_;
    const VariationKnobs& knobs_;
    std::map<std::string, std::string> names_;
    std::set<std::string> used_;
    std::size_t dead_ = 0;
};

Lines indent(const Lines& body) {
    Lines out;
    out.reserve(body.size());
    for (const auto& l : body) out.push_back("    " + l);
    return out;
}

void append(Lines& out, const Lines& more) { out.insert(out.end(), more.begin(), more.end()); }

Lines block(const std::string& head, const Lines& body, const std::string& tail = "}") {
    Lines out{head + " {"};
    append(out, indent(body));
    out.push_back(tail);
    return out;
}

Lines function(Gen& g, const std::string& signature, std::vector<std::string> decls,
               const Lines& body) {
    g.decorate(decls);
    Lines inner(decls.begin(), decls.end());
    append(inner, body);
    return block(signature, inner);
}

Lines main_function(Gen& g, std::vector<std::string> decls, Lines body) {
    body.push_back("return 0;");
    return function(g, "int main()", std::move(decls), body);
}

std::string print(const std::vector<std::string>& args) {
    std::string fmt;
    for (std::size_t i = 0; i < args.size(); ++i) fmt += i == 0 ? "%d" : " %d";
    std::string out = "printf(\"" + fmt + "\\n\"";
    for (const auto& a : args) out += ", " + a;
    return out + ");";
}

std::string print_text(const std::string& text) { return "printf(\"" + text + "\\n\");"; }

// Counting loop `v` from `lo` while `v < hi`. Auxiliary loops flip to the
// while form with the loop-swap probability.
Lines counted_loop(Gen& g, const std::string& v, const std::string& lo, const std::string& hi,
                   const Lines& body, bool auxiliary) {
    if (auxiliary && g.swap_loop()) {
        Lines inner = body;
        inner.push_back(v + "++;");
        Lines out{v + " = " + lo + ";"};
        append(out, block("while (" + v + " < " + hi + ")", inner));
        return out;
    }
    return block("for (" + v + " = " + lo + "; " + v + " < " + hi + "; " + v + "++)", body);
}

Lines fill_array(Gen& g, const std::string& a, const std::string& n, const std::string& i) {
    return counted_loop(
        g, i, "0", n,
        {a + "[" + i + "] = (" + i + " * " + g.num(17, 2) + " + " + g.num(11, 1) + ") % " +
         g.num(50, 2) + ";"},
        true);
}

std::string step(Gen& g, const std::string& i) {
    switch (g.pick(3)) {
        case 0: return i + "++";
        case 1: return "++" + i;
        default: return i + " += 1";
    }
}

// --------------------------------------------------------------------------
// Classification families
// --------------------------------------------------------------------------

Lines accumulate(Gen& g, const std::string& s, const std::string& i) {
    Lines out;
    const std::size_t count = g.between(1, 3);
    for (std::size_t k = 0; k < count; ++k) {
        switch (g.pick(4)) {
            case 0: out.push_back(s + " = " + s + " + " + i + ";"); break;
            case 1: out.push_back(s + " += " + i + " * " + g.num(3, 1) + ";"); break;
            case 2: out.push_back(s + " = " + s + " + " + i + " % " + g.num(7, 2) + ";"); break;
            default: out.push_back(s + " -= " + g.num(2, 1) + ";"); break;
        }
    }
    return out;
}

Lines for_accumulate(Gen& g) {
    const auto n = g.id("n"), s = g.id("sum"), i = g.id("i");
    std::vector<std::string> decls{"int " + n + " = " + g.num(20, 2) + ";", "int " + s + " = 0;"};
    const bool declare_in_for = g.coin(0.3);
    if (!declare_in_for) decls.push_back("int " + i + ";");
    const std::string init = (declare_in_for ? "int " : "") + i + " = " + g.num(0);
    const std::string cmp = g.coin() ? " < " : " <= ";
    Lines body = block("for (" + init + "; " + i + cmp + n + "; " + step(g, i) + ")", accumulate(g, s, i));
    if (g.coin(0.7)) body.push_back(print({s}));
    return main_function(g, decls, body);
}

Lines while_accumulate(Gen& g) {
    const auto n = g.id("n"), s = g.id("sum"), i = g.id("i");
    std::vector<std::string> decls{"int " + n + " = " + g.num(20, 2) + ";", "int " + s + " = 0;"};
    Lines body;
    if (g.coin()) {
        decls.push_back("int " + i + " = 0;");
    } else {
        decls.push_back("int " + i + ";");
        body.push_back(i + " = 0;");
    }
    Lines loop = accumulate(g, s, i);
    loop.push_back(g.coin() ? i + "++;" : i + " = " + i + " + 1;");
    append(body, block("while (" + i + " < " + n + ")", loop));
    if (g.coin(0.7)) body.push_back(print({s}));
    return main_function(g, decls, body);
}

Lines dowhile_accumulate(Gen& g) {
    const auto n = g.id("n"), s = g.id("sum"), i = g.id("i");
    std::vector<std::string> decls{"int " + n + " = " + g.num(20, 2) + ";", "int " + s + " = 0;",
                                   "int " + i + " = 0;"};
    Lines loop = accumulate(g, s, i);
    loop.push_back(g.coin() ? i + "++;" : i + " += 1;");
    Lines body = block("do", loop, "} while (" + i + " < " + n + ");");
    if (g.coin(0.7)) body.push_back(print({s}));
    return main_function(g, decls, body);
}

Lines matrix_walk(Gen& g) {
    const auto m = g.id("m"), rows = g.id("rows"), cols = g.id("cols"), i = g.id("i"),
               j = g.id("j"), t = g.id("total");
    std::vector<std::string> decls{"int " + m + "[" + g.num(100, 40) + "];",
                                   "int " + rows + " = " + g.num(5, 2) + ";",
                                   "int " + cols + " = " + g.num(6, 2) + ";", "int " + i + ";",
                                   "int " + j + ";", "int " + t + " = 0;"};
    const std::string cell = m + "[" + i + " * " + cols + " + " + j + "]";
    const auto nested = [&](const Lines& inner) {
        return block("for (" + i + " = 0; " + i + " < " + rows + "; " + i + "++)",
                     block("for (" + j + " = 0; " + j + " < " + cols + "; " + j + "++)", inner));
    };
    Lines body;
    Lines fill{cell + " = " + i + " * " + g.num(3, 1) + " + " + j + ";"};
    if (g.coin(0.3)) {
        fill.push_back(t + " += " + cell + ";");
        append(body, nested(fill));
    } else {
        append(body, nested(fill));
        append(body, nested({t + " = " + t + " + " + cell + ";"}));
    }
    if (g.coin(0.3)) append(body, nested({cell + " = " + cell + " - " + t + ";"}));
    body.push_back(print({t}));
    return main_function(g, decls, body);
}

// if (x < c1) { r = 1; } else if ... else { r = k; }
Lines if_chain(Gen& g, const std::string& x, const std::string& r, bool direct_return) {
    const std::size_t branches = g.between(2, 4);
    const bool final_else = direct_return || g.coin(0.8);
    Lines out;
    long bound = 10;
    for (std::size_t k = 0; k < branches; ++k) {
        const std::string cond = x + " < " + g.num(bound, 1);
        const std::string head = (k == 0 ? "if (" : "} else if (") + cond + ") {";
        out.push_back(head);
        out.push_back("    " + (direct_return ? "return " + std::to_string(k + 1) + ";"
                                               : r + " = " + std::to_string(k + 1) + ";"));
        bound += 30;
    }
    if (final_else) {
        out.push_back("} else {");
        out.push_back("    " + (direct_return ? "return 0;" : r + " = 0;"));
    }
    out.push_back("}");
    return out;
}

Lines if_else_chain(Gen& g) {
    const auto v = g.id("value"), r = g.id("rank");
    Lines program;
    if (g.coin(0.6)) {
        const auto f = g.id("classify"), x = g.id("x");
        const bool direct = g.coin(0.3);
        Lines body = if_chain(g, x, r, direct);
        if (!direct) body.push_back("return " + r + ";");
        append(program, function(g, "int " + f + "(int " + x + ")",
                                 direct ? std::vector<std::string>{} : std::vector<std::string>{"int " + r + " = 0;"},
                                 body));
        append(program, main_function(g, {"int " + v + " = " + g.num(42) + ";"},
                                      {print({f + "(" + v + ")"})}));
    } else {
        Lines body = if_chain(g, v, r, false);
        body.push_back(print({r}));
        append(program, main_function(g, {"int " + v + " = " + g.num(42) + ";", "int " + r + " = 0;"}, body));
    }
    return program;
}

Lines switch_cases(Gen& g, const std::string& op, const std::string& a, const std::string& b,
                   const std::string& r) {
    static constexpr std::array<std::string_view, 5> kOps = {" + ", " - ", " * ", " / ", " % "};
    const std::size_t cases = g.between(2, 5);
    Lines body;
    for (std::size_t k = 0; k < cases; ++k) {
        body.push_back("case " + std::to_string(k + 1) + ":");
        body.push_back("    " + r + " = " + a + std::string(kOps[k]) + b + ";");
        body.push_back("    break;");
    }
    if (g.coin(0.8)) {
        body.push_back("default:");
        body.push_back("    " + r + " = 0;");
        if (g.coin()) body.push_back("    break;");
    }
    return block("switch (" + op + ")", body);
}

Lines switch_dispatch(Gen& g) {
    const auto op = g.id("op"), a = g.id("a"), b = g.id("b"), r = g.id("result");
    std::vector<std::string> inputs{"int " + op + " = " + g.num(2, 0) + ";",
                                    "int " + a + " = " + g.num(7, 1) + ";",
                                    "int " + b + " = " + g.num(3, 1) + ";"};
    if (g.coin()) {
        const auto f = g.id("apply");
        Lines body = switch_cases(g, op, a, b, r);
        body.push_back("return " + r + ";");
        Lines program = function(g, "int " + f + "(int " + op + ", int " + a + ", int " + b + ")",
                                 {"int " + r + " = 0;"}, body);
        const auto out = g.id("out");
        inputs.push_back("int " + out + ";");
        append(program, main_function(g, inputs,
                                      {out + " = " + f + "(" + op + ", " + a + ", " + b + ");",
                                       print({out})}));
        return program;
    }
    inputs.push_back("int " + r + " = 0;");
    Lines body = switch_cases(g, op, a, b, r);
    body.push_back(print({r}));
    return main_function(g, inputs, body);
}

Lines early_return_search(Gen& g) {
    const auto f = g.id("find"), arr = g.id("arr"), len = g.id("len"), key = g.id("key"),
               i = g.id("i");
    Lines inner;
    const bool count_steps = g.coin(0.3);
    const auto steps = count_steps ? g.id("steps") : std::string();
    if (count_steps) inner.push_back(steps + "++;");
    const std::string cmp = g.coin(0.7) ? " == " : " > ";
    append(inner, block("if (" + arr + "[" + i + "]" + cmp + key + ")", {"return " + i + ";"}));
    Lines search = block("for (" + i + " = 0; " + i + " < " + len + "; " + i + "++)", inner);
    search.push_back("return -1;");
    std::vector<std::string> fdecls{"int " + i + ";"};
    if (count_steps) fdecls.push_back("int " + steps + " = 0;");
    Lines program = function(
        g, "int " + f + "(int " + arr + "[], int " + len + ", int " + key + ")", fdecls, search);

    const auto data = g.id("data"), n = g.id("n"), j = g.id("j"), pos = g.id("pos");
    Lines body = fill_array(g, data, n, j);
    body.push_back(pos + " = " + f + "(" + data + ", " + n + ", " + g.num(7) + ");");
    body.push_back(print({pos}));
    append(program, main_function(g,
                                  {"int " + data + "[" + g.num(64, 32) + "];",
                                   "int " + n + " = " + g.num(20, 2) + ";", "int " + j + ";",
                                   "int " + pos + ";"},
                                  body));
    return program;
}

Lines recursion(Gen& g) {
    const auto f = g.id("f"), n = g.id("n");
    Lines body;
    std::string signature = "int " + f + "(int " + n + ")";
    std::string call;
    switch (g.pick(4)) {
        case 0:
            append(body, block("if (" + n + " <= 1)", {"return 1;"}));
            body.push_back("return " + n + " * " + f + "(" + n + " - 1);");
            call = f + "(" + g.num(6, 1) + ")";
            break;
        case 1:
            append(body, block("if (" + n + " < 2)", {"return " + n + ";"}));
            body.push_back("return " + f + "(" + n + " - 1) + " + f + "(" + n + " - 2);");
            call = f + "(" + g.num(10, 1) + ")";
            break;
        case 2:
            append(body, block("if (" + n + " == 0)", {"return 0;"}));
            body.push_back("return " + n + " % 10 + " + f + "(" + n + " / 10);");
            call = f + "(" + g.num(1234, 1) + ")";
            break;
        default: {
            const auto e = g.id("e");
            signature = "int " + f + "(int " + n + ", int " + e + ")";
            append(body, block("if (" + e + " == 0)", {"return 1;"}));
            body.push_back("return " + n + " * " + f + "(" + n + ", " + e + " - 1);");
            call = f + "(" + g.num(3, 1) + ", " + g.num(5, 0) + ")";
            break;
        }
    }
    Lines program = function(g, signature, {}, body);
    const auto r = g.id("r");
    append(program, main_function(g, {"int " + r + ";"}, {r + " = " + call + ";", print({r})}));
    return program;
}

std::string expression(Gen& g, const std::vector<std::string>& vars, std::size_t depth) {
    if (depth == 0 || g.coin(0.3)) return g.coin(0.7) ? vars[g.pick(vars.size())] : g.num(5, 1);
    static constexpr std::array<std::string_view, 4> kOps = {" + ", " - ", " * ", " / "};
    const std::string lhs = expression(g, vars, depth - 1);
    const std::string rhs = expression(g, vars, depth - 1);
    const std::string e = lhs + std::string(kOps[g.pick(kOps.size())]) + rhs;
    return depth > 1 && g.coin() ? "(" + e + ")" : e;
}

Lines straight_line(Gen& g) {
    std::vector<std::string> vars;
    std::vector<std::string> decls;
    const std::size_t inputs = g.between(2, 4);
    for (std::size_t k = 0; k < inputs; ++k) {
        vars.push_back(g.id("v" + std::to_string(k)));
        decls.push_back("int " + vars.back() + " = " + g.num(9, 1) + ";");
    }
    Lines body;
    const std::size_t steps = g.between(3, 6);
    for (std::size_t k = 0; k < steps; ++k) {
        const std::string e = expression(g, vars, g.between(1, 3));
        if (g.coin()) {
            vars.push_back(g.id("t" + std::to_string(k)));
            body.push_back("int " + vars.back() + " = " + e + ";");
        } else {
            body.push_back(vars[g.pick(vars.size())] + " = " + e + ";");
        }
    }
    body.push_back(print({vars.back()}));
    if (g.coin(0.4)) body.push_back(print({vars.front(), vars.back()}));
    return main_function(g, decls, body);
}

Lines loop_branch(Gen& g) {
    const auto a = g.id("a"), n = g.id("n"), i = g.id("i"), even = g.id("even"), odd = g.id("odd"),
               best = g.id("best");
    std::vector<std::string> decls{"int " + a + "[" + g.num(64, 32) + "];",
                                   "int " + n + " = " + g.num(30, 2) + ";",
                                   "int " + even + " = 0;",
                                   "int " + odd + " = 0;",
                                   "int " + best + " = 0;",
                                   "int " + i + ";"};
    Lines body = fill_array(g, a, n, i);
    const std::string item = a + "[" + i + "]";
    Lines loop{"if (" + item + " % 2 == 0) {", "    " + even + "++;", "} else {", "    " + odd + "++;", "}"};
    if (g.coin(0.7)) append(loop, block("if (" + item + " > " + best + ")", {best + " = " + item + ";"}));
    if (g.coin(0.4)) append(loop, block("if (" + item + " == " + g.num(13) + ")", {g.coin() ? "continue;" : "break;"}));
    append(body, block("for (" + i + " = 0; " + i + " < " + n + "; " + i + "++)", loop));
    body.push_back(print({even, odd}));
    if (g.coin(0.5)) body.push_back(print({best}));
    return main_function(g, decls, body);
}

using Template = Lines (*)(Gen&);

constexpr std::array<std::pair<std::string_view, Template>, 10> kFamilies = {{
    {"for_accumulate", for_accumulate},
    {"while_accumulate", while_accumulate},
    {"dowhile_accumulate", dowhile_accumulate},
    {"matrix_walk", matrix_walk},
    {"if_else_chain", if_else_chain},
    {"switch_dispatch", switch_dispatch},
    {"early_return_search", early_return_search},
    {"recursion", recursion},
    {"straight_line", straight_line},
    {"loop_branch", loop_branch},
}};

// --------------------------------------------------------------------------
// Clone problems
// --------------------------------------------------------------------------

// How main repeats the solve-and-print step.
enum class Repeat { Once, ForCases, WhileCases, DoCases };

// One way of solving a problem: helper functions plus the statements in
// main that leave the answer in the result variable.
struct Solution {
    Lines helpers;
    std::vector<std::string> decls;
    Lines stmts;
};

// Trailing status handling in main; with the repeat style it keys each problem.
enum class Epilogue { None, Check, Branch, Reduce };

struct Driver {
    Repeat repeat = Repeat::Once;
    std::vector<std::string> decls;
    Lines before;
    Lines output;
};

Lines assemble(Gen& g, Driver d, Solution s, Epilogue e = Epilogue::None) {
    Lines program = std::move(s.helpers);
    std::vector<std::string> decls = std::move(d.decls);
    decls.insert(decls.end(), s.decls.begin(), s.decls.end());
    Lines step_body = std::move(s.stmts);
    append(step_body, d.output);
    Lines body = std::move(d.before);
    switch (d.repeat) {
        case Repeat::Once: append(body, step_body); break;
        case Repeat::ForCases: {
            const auto t = g.id("cases");
            decls.push_back("int " + t + ";");
            append(body, block("for (" + t + " = 0; " + t + " < " + g.num(3, 1) + "; " + t + "++)", step_body));
            break;
        }
        case Repeat::WhileCases: {
            const auto t = g.id("cases");
            decls.push_back("int " + t + " = " + g.num(3, 1) + ";");
            step_body.push_back(t + "--;");
            append(body, block("while (" + t + " > 0)", step_body));
            break;
        }
        case Repeat::DoCases: {
            const auto t = g.id("cases");
            decls.push_back("int " + t + " = " + g.num(3, 1) + ";");
            step_body.push_back(t + " = " + t + " - 1;");
            append(body, block("do", step_body, "} while (" + t + " > 0);"));
            break;
        }
    }
    if (e != Epilogue::None) {
        const auto st = g.id("status");
        decls.push_back("int " + st + " = 0;");
        switch (e) {
            case Epilogue::Check: append(body, block("if (" + st + " != 0)", {"return " + st + ";"})); break;
            case Epilogue::Branch:
                body.push_back("switch (" + st + ") {");
                append(body, {"case 0:", "    break;", "default:", "    " + print_text("error"), "    break;"});
                body.push_back("}");
                break;
            default: append(body, block("while (" + st + " > 0)", {st + " = " + st + " / 2;"})); break;
        }
    }
    append(program, main_function(g, decls, body));
    return program;
}

std::string call(const std::string& f, const std::vector<std::string>& args) {
    std::string out = f + "(";
    for (std::size_t i = 0; i < args.size(); ++i) out += (i ? ", " : "") + args[i];
    return out + ")";
}

// Output styles; every problem pairs one with a repeat style uniquely.
enum class Output { Single, Pair, Twice, Verdict };

Lines output(Output style, const std::string& input, const std::string& result) {
    switch (style) {
        case Output::Single: return {print({result})};
        case Output::Pair: return {print({input, result})};
        case Output::Twice: return {print({input}), print({result})};
        case Output::Verdict: break;
    }
    return {"if (" + result + " > 0) {", "    " + print({result}), "} else {", "    " + print_text("none"), "}"};
}

Solution helper_solution(Gen& g, const std::string& signature, std::vector<std::string> decls,
                         const Lines& body, const std::string& r, const std::string& invoke) {
    return {function(g, signature, std::move(decls), body), {}, {r + " = " + invoke + ";"}};
}

Lines sum_to_n(Gen& g) {
    const auto n = g.id("n"), r = g.id("r"), f = g.id("total"), x = g.id("x"), s = g.id("s"),
               i = g.id("i");
    Driver d{Repeat::Once, {"int " + n + " = " + g.num(50, 1) + ";", "int " + r + ";"}, {}, output(Output::Single, n, r)};
    const std::string sig = "int " + f + "(int " + x + ")";
    Solution sol;
    switch (g.pick(3)) {
        case 0: {
            Lines body = block("for (" + i + " = 1; " + i + " <= " + x + "; " + i + "++)", {s + " = " + s + " + " + i + ";"});
            body.push_back("return " + s + ";");
            sol = helper_solution(g, sig, {"int " + s + " = 0;", "int " + i + ";"}, body, r, call(f, {n}));
            break;
        }
        case 1: {
            Lines body = block("while (" + i + " <= " + x + ")", {s + " += " + i + ";", i + "++;"});
            body.push_back("return " + s + ";");
            sol = helper_solution(g, sig, {"int " + s + " = 0;", "int " + i + " = 1;"}, body, r, call(f, {n}));
            break;
        }
        default: sol.stmts = {r + " = " + n + " * (" + n + " + 1) / 2;"}; break;
    }
    return assemble(g, d, sol);
}

Lines factorial(Gen& g) {
    const auto n = g.id("n"), r = g.id("r"), f = g.id("fact"), x = g.id("x"), p = g.id("p"),
               i = g.id("i");
    Driver d{Repeat::ForCases, {"int " + n + " = " + g.num(8, 1) + ";", "int " + r + ";"}, {}, output(Output::Pair, n, r)};
    const std::string sig = "int " + f + "(int " + x + ")";
    Solution sol;
    switch (g.pick(3)) {
        case 0: {
            Lines body = block("for (" + i + " = 2; " + i + " <= " + x + "; " + i + "++)", {p + " = " + p + " * " + i + ";"});
            body.push_back("return " + p + ";");
            sol = helper_solution(g, sig, {"int " + p + " = 1;", "int " + i + ";"}, body, r, call(f, {n}));
            break;
        }
        case 1: {
            Lines body = block("if (" + x + " <= 1)", {"return 1;"});
            body.push_back("return " + x + " * " + call(f, {x + " - 1"}) + ";");
            sol = helper_solution(g, sig, {}, body, r, call(f, {n}));
            break;
        }
        default: {
            const auto k = g.id("k");
            sol.decls = {"int " + k + ";"};
            sol.stmts = {r + " = 1;", k + " = " + n + ";"};
            append(sol.stmts, block("while (" + k + " > 1)", {r + " = " + r + " * " + k + ";", k + "--;"}));
            break;
        }
    }
    return assemble(g, d, sol);
}

Lines fibonacci(Gen& g) {
    const auto n = g.id("n"), r = g.id("r"), f = g.id("fib"), x = g.id("x"), i = g.id("i");
    Driver d{Repeat::WhileCases, {"int " + n + " = " + g.num(15, 2) + ";", "int " + r + ";"}, {}, output(Output::Twice, n, r)};
    const std::string sig = "int " + f + "(int " + x + ")";
    Solution sol;
    switch (g.pick(3)) {
        case 0: {
            const auto a = g.id("a"), b = g.id("b"), t = g.id("t");
            Lines body = block("for (" + i + " = 0; " + i + " < " + x + "; " + i + "++)",
                               {t + " = " + a + " + " + b + ";", a + " = " + b + ";", b + " = " + t + ";"});
            body.push_back("return " + a + ";");
            sol = helper_solution(g, sig, {"int " + a + " = 0;", "int " + b + " = 1;", "int " + t + ";", "int " + i + ";"},
                                  body, r, call(f, {n}));
            break;
        }
        case 1: {
            Lines body = block("if (" + x + " < 2)", {"return " + x + ";"});
            body.push_back("return " + call(f, {x + " - 1"}) + " + " + call(f, {x + " - 2"}) + ";");
            sol = helper_solution(g, sig, {}, body, r, call(f, {n}));
            break;
        }
        default: {
            const auto dp = g.id("dp");
            sol.decls = {"int " + dp + "[" + g.num(64, 40) + "];", "int " + i + ";"};
            sol.stmts = {dp + "[0] = 0;", dp + "[1] = 1;"};
            append(sol.stmts, block("for (" + i + " = 2; " + i + " <= " + n + "; " + i + "++)",
                                    {dp + "[" + i + "] = " + dp + "[" + i + " - 1] + " + dp + "[" + i + " - 2];"}));
            sol.stmts.push_back(r + " = " + dp + "[" + n + "];");
            break;
        }
    }
    return assemble(g, d, sol);
}

Lines gcd(Gen& g) {
    const auto a = g.id("a"), b = g.id("b"), r = g.id("r"), f = g.id("gcd"), x = g.id("x"),
               y = g.id("y");
    Driver d{Repeat::DoCases,
             {"int " + a + " = " + g.num(84, 1) + ";", "int " + b + " = " + g.num(36, 1) + ";", "int " + r + ";"},
             {},
             output(Output::Verdict, a, r)};
    const std::string sig = "int " + f + "(int " + x + ", int " + y + ")";
    Solution sol;
    switch (g.pick(3)) {
        case 0: {
            const auto t = g.id("t");
            Lines body = block("while (" + y + " != 0)", {t + " = " + x + " % " + y + ";", x + " = " + y + ";", y + " = " + t + ";"});
            body.push_back("return " + x + ";");
            sol = helper_solution(g, sig, {"int " + t + ";"}, body, r, call(f, {a, b}));
            break;
        }
        case 1: {
            Lines body = block("if (" + y + " == 0)", {"return " + x + ";"});
            body.push_back("return " + call(f, {y, x + " % " + y}) + ";");
            sol = helper_solution(g, sig, {}, body, r, call(f, {a, b}));
            break;
        }
        default: {
            Lines loop{"if (" + x + " > " + y + ") {", "    " + x + " = " + x + " - " + y + ";", "} else {",
                       "    " + y + " = " + y + " - " + x + ";", "}"};
            Lines body = block("while (" + x + " != " + y + ")", loop);
            body.push_back("return " + x + ";");
            sol = helper_solution(g, sig, {}, body, r, call(f, {a, b}));
            break;
        }
    }
    return assemble(g, d, sol);
}

Lines prime_count(Gen& g) {
    const auto n = g.id("n"), r = g.id("r"), f = g.id("count"), x = g.id("x"), i = g.id("i"),
               j = g.id("j"), c = g.id("c");
    Driver d{Repeat::Once, {"int " + n + " = " + g.num(100, 2) + ";", "int " + r + ";"}, {}, output(Output::Twice, n, r)};
    Solution sol;
    switch (g.pick(3)) {
        case 0: {
            const auto flag = g.id("flag");
            Lines inner = block("for (" + j + " = 2; " + j + " * " + j + " <= " + i + "; " + j + "++)",
                                block("if (" + i + " % " + j + " == 0)", {flag + " = 0;", "break;"}));
            Lines outer{flag + " = 1;"};
            append(outer, inner);
            append(outer, block("if (" + flag + ")", {c + "++;"}));
            Lines body = block("for (" + i + " = 2; " + i + " <= " + x + "; " + i + "++)", outer);
            body.push_back("return " + c + ";");
            sol = helper_solution(g, "int " + f + "(int " + x + ")",
                                  {"int " + c + " = 0;", "int " + i + ";", "int " + j + ";", "int " + flag + ";"},
                                  body, r, call(f, {n}));
            break;
        }
        case 1: {
            const auto p = g.id("isprime"), k = g.id("k");
            Lines test = block("for (" + j + " = 2; " + j + " * " + j + " <= " + k + "; " + j + "++)",
                               block("if (" + k + " % " + j + " == 0)", {"return 0;"}));
            test.push_back("return 1;");
            sol.helpers = function(g, "int " + p + "(int " + k + ")", {"int " + j + ";"}, test);
            sol.decls = {"int " + i + ";"};
            sol.stmts = {r + " = 0;"};
            append(sol.stmts, block("for (" + i + " = 2; " + i + " <= " + n + "; " + i + "++)",
                                    block("if (" + call(p, {i}) + ")", {r + "++;"})));
            break;
        }
        default: {
            const auto s = g.id("sieve");
            sol.decls = {"int " + s + "[" + g.num(200, 128) + "];", "int " + i + ";", "int " + j + ";"};
            sol.stmts = block("for (" + i + " = 0; " + i + " <= " + n + "; " + i + "++)", {s + "[" + i + "] = 1;"});
            sol.stmts.push_back(r + " = 0;");
            Lines mark{r + "++;"};
            append(mark, block("for (" + j + " = " + i + " * " + i + "; " + j + " <= " + n + "; " + j + " += " + i + ")",
                               {s + "[" + j + "] = 0;"}));
            append(sol.stmts, block("for (" + i + " = 2; " + i + " <= " + n + "; " + i + "++)",
                                    block("if (" + s + "[" + i + "])", mark)));
            break;
        }
    }
    return assemble(g, d, sol, Epilogue::Check);
}

// Driver pieces shared by the array problems: declare and fill a[n].
Driver array_driver(Gen& g, const std::string& a, const std::string& n, const std::string& i,
                    std::vector<std::string> extra_decls, Lines output) {
    Driver d;
    d.decls = {"int " + a + "[" + g.num(64, 32) + "];", "int " + n + " = " + g.num(20, 2) + ";", "int " + i + ";"};
    d.decls.insert(d.decls.end(), extra_decls.begin(), extra_decls.end());
    d.before = fill_array(g, a, n, i);
    d.output = std::move(output);
    return d;
}

Lines array_max(Gen& g) {
    const auto a = g.id("a"), n = g.id("n"), i = g.id("i"), r = g.id("r"), f = g.id("maxof"),
               v = g.id("v"), len = g.id("len"), k = g.id("k");
    Driver d = array_driver(g, a, n, i, {"int " + r + ";"}, output(Output::Single, n, r));
    d.repeat = Repeat::ForCases;
    const std::string sig = "int " + f + "(int " + v + "[], int " + len + ")";
    Solution sol;
    switch (g.pick(3)) {
        case 0:
            sol.stmts = {r + " = " + a + "[0];"};
            append(sol.stmts, block("for (" + i + " = 1; " + i + " < " + n + "; " + i + "++)",
                                    block("if (" + a + "[" + i + "] > " + r + ")", {r + " = " + a + "[" + i + "];"})));
            break;
        case 1: {
            const auto best = g.id("best");
            Lines loop = block("if (" + v + "[" + k + "] > " + best + ")", {best + " = " + v + "[" + k + "];"});
            loop.push_back(k + "++;");
            Lines body = block("while (" + k + " < " + len + ")", loop);
            body.push_back("return " + best + ";");
            sol = helper_solution(g, sig, {"int " + best + " = " + v + "[0];", "int " + k + " = 1;"}, body, r,
                                  call(f, {a, n}));
            break;
        }
        default: {
            const auto rest = g.id("rest");
            Lines body = block("if (" + len + " == 1)", {"return " + v + "[0];"});
            body.push_back("int " + rest + " = " + call(f, {v, len + " - 1"}) + ";");
            append(body, block("if (" + v + "[" + len + " - 1] > " + rest + ")", {"return " + v + "[" + len + " - 1];"}));
            body.push_back("return " + rest + ";");
            sol = helper_solution(g, sig, {}, body, r, call(f, {a, n}));
            break;
        }
    }
    return assemble(g, d, sol, Epilogue::Check);
}

Lines reverse_digits(Gen& g) {
    const auto n = g.id("n"), r = g.id("r"), f = g.id("reverse"), x = g.id("x"), rev = g.id("rev");
    Driver d{Repeat::WhileCases, {"int " + n + " = " + g.num(1234, 1) + ";", "int " + r + ";"}, {}, output(Output::Pair, n, r)};
    const std::string sig = "int " + f + "(int " + x + ")";
    const Lines digit{rev + " = " + rev + " * 10 + " + x + " % 10;", x + " = " + x + " / 10;"};
    Lines body;
    switch (g.pick(3)) {
        case 0: body = block("while (" + x + " > 0)", digit); break;
        case 1: body = block("do", digit, "} while (" + x + " > 0);"); break;
        default:
            body = block("for (; " + x + " > 0; " + x + " = " + x + " / 10)", {rev + " = " + rev + " * 10 + " + x + " % 10;"});
            break;
    }
    body.push_back("return " + rev + ";");
    return assemble(g, d, helper_solution(g, sig, {"int " + rev + " = 0;"}, body, r, call(f, {n})), Epilogue::Check);
}

Lines digit_sum(Gen& g) {
    const auto n = g.id("n"), r = g.id("r"), f = g.id("digits"), x = g.id("x"), s = g.id("s");
    Driver d{Repeat::DoCases, {"int " + n + " = " + g.num(9876, 1) + ";", "int " + r + ";"}, {}, output(Output::Single, n, r)};
    const std::string sig = "int " + f + "(int " + x + ")";
    Solution sol;
    switch (g.pick(3)) {
        case 0: {
            Lines body = block("while (" + x + " > 0)", {s + " += " + x + " % 10;", x + " = " + x + " / 10;"});
            body.push_back("return " + s + ";");
            sol = helper_solution(g, sig, {"int " + s + " = 0;"}, body, r, call(f, {n}));
            break;
        }
        case 1: {
            Lines body = block("if (" + x + " == 0)", {"return 0;"});
            body.push_back("return " + x + " % 10 + " + call(f, {x + " / 10"}) + ";");
            sol = helper_solution(g, sig, {}, body, r, call(f, {n}));
            break;
        }
        default: {
            const auto m = g.id("m");
            sol.decls = {"int " + m + ";"};
            sol.stmts = {m + " = " + n + ";", r + " = 0;"};
            Lines loop = block("if (" + m + " == 0)", {"break;"});
            loop.push_back(r + " = " + r + " + " + m + " % 10;");
            loop.push_back(m + " = " + m + " / 10;");
            append(sol.stmts, block("for (;;)", loop));
            break;
        }
    }
    return assemble(g, d, sol, Epilogue::Check);
}

Lines power(Gen& g) {
    const auto b = g.id("b"), e = g.id("e"), r = g.id("r"), f = g.id("power"), x = g.id("x"),
               y = g.id("y"), p = g.id("p");
    Driver d{Repeat::Once,
             {"int " + b + " = " + g.num(3, 1) + ";", "int " + e + " = " + g.num(7, 0) + ";", "int " + r + ";"},
             {},
             {print({b, e, r})}};
    const std::string sig = "int " + f + "(int " + x + ", int " + y + ")";
    Solution sol;
    switch (g.pick(3)) {
        case 0: {
            const auto i = g.id("i");
            Lines body = block("for (" + i + " = 0; " + i + " < " + y + "; " + i + "++)", {p + " = " + p + " * " + x + ";"});
            body.push_back("return " + p + ";");
            sol = helper_solution(g, sig, {"int " + p + " = 1;", "int " + i + ";"}, body, r, call(f, {b, e}));
            break;
        }
        case 1: {
            const auto h = g.id("h");
            Lines body = block("if (" + y + " == 0)", {"return 1;"});
            body.push_back(h + " = " + call(f, {x, y + " / 2"}) + ";");
            append(body, Lines{"if (" + y + " % 2 == 0) {", "    return " + h + " * " + h + ";", "} else {",
                               "    return " + h + " * " + h + " * " + x + ";", "}"});
            sol = helper_solution(g, sig, {"int " + h + ";"}, body, r, call(f, {b, e}));
            break;
        }
        default: {
            Lines loop = block("if (" + y + " % 2 == 1)", {p + " = " + p + " * " + x + ";"});
            loop.push_back(x + " = " + x + " * " + x + ";");
            loop.push_back(y + " = " + y + " / 2;");
            Lines body = block("while (" + y + " > 0)", loop);
            body.push_back("return " + p + ";");
            sol = helper_solution(g, sig, {"int " + p + " = 1;"}, body, r, call(f, {b, e}));
            break;
        }
    }
    return assemble(g, d, sol, Epilogue::Branch);
}

Lines sort_array(Gen& g) {
    const auto a = g.id("a"), n = g.id("n"), i = g.id("i"), j = g.id("j"), t = g.id("t");
    Lines output = counted_loop(g, i, "0", n, {"printf(\"%d \", " + a + "[" + i + "]);"}, true);
    output.push_back(print_text(""));
    Driver d = array_driver(g, a, n, i, {}, output);
    d.repeat = Repeat::WhileCases;
    const auto swap = [&](const std::string& x, const std::string& y) {
        return Lines{t + " = " + a + "[" + x + "];", a + "[" + x + "] = " + a + "[" + y + "];",
                     a + "[" + y + "] = " + t + ";"};
    };
    Solution sol;
    switch (g.pick(3)) {
        case 0: {
            sol.decls = {"int " + j + ";", "int " + t + ";"};
            const std::string next = a + "[" + j + " + 1]";
            sol.stmts = block("for (" + i + " = 0; " + i + " < " + n + " - 1; " + i + "++)",
                              block("for (" + j + " = 0; " + j + " < " + n + " - 1 - " + i + "; " + j + "++)",
                                    block("if (" + a + "[" + j + "] > " + next + ")", swap(j, j + " + 1"))));
            break;
        }
        case 1: {
            const auto swapped = g.id("swapped");
            sol.decls = {"int " + j + ";", "int " + t + ";", "int " + swapped + ";"};
            Lines inner = swap(j, j + " + 1");
            inner.push_back(swapped + " = 1;");
            Lines loop{swapped + " = 0;"};
            append(loop, block("for (" + j + " = 0; " + j + " + 1 < " + n + "; " + j + "++)",
                               block("if (" + a + "[" + j + "] > " + a + "[" + j + " + 1])", inner)));
            sol.stmts = block("do", loop, "} while (" + swapped + ");");
            break;
        }
        default: {
            const auto lo = g.id("lo");
            sol.decls = {"int " + j + ";", "int " + t + ";", "int " + lo + ";"};
            Lines outer{lo + " = " + i + ";"};
            append(outer, block("for (" + j + " = " + i + " + 1; " + j + " < " + n + "; " + j + "++)",
                                block("if (" + a + "[" + j + "] < " + a + "[" + lo + "])", {lo + " = " + j + ";"})));
            append(outer, swap(i, lo));
            sol.stmts = block("for (" + i + " = 0; " + i + " < " + n + "; " + i + "++)", outer);
            break;
        }
    }
    return assemble(g, d, sol, Epilogue::Branch);
}

Lines linear_search(Gen& g) {
    const auto a = g.id("a"), n = g.id("n"), i = g.id("i"), key = g.id("key"), pos = g.id("pos");
    Lines output{"if (" + pos + " >= 0) {", "    " + print({pos}), "} else {", "    " + print_text("none"), "}"};
    Driver d = array_driver(g, a, n, i, {"int " + key + " = " + g.num(21) + ";", "int " + pos + ";"}, output);
    d.repeat = Repeat::ForCases;
    Solution sol;
    if (g.coin()) {
        const auto f = g.id("search"), v = g.id("v"), len = g.id("len"), x = g.id("x"), k = g.id("k");
        Lines body = block("for (" + k + " = 0; " + k + " < " + len + "; " + k + "++)",
                           block("if (" + v + "[" + k + "] == " + x + ")", {"return " + k + ";"}));
        body.push_back("return -1;");
        sol = helper_solution(g, "int " + f + "(int " + v + "[], int " + len + ", int " + x + ")",
                              {"int " + k + ";"}, body, pos, call(f, {a, n, key}));
    } else {
        sol.stmts = {pos + " = -1;", i + " = 0;"};
        append(sol.stmts, block("while (" + i + " < " + n + " && " + pos + " < 0)",
                                {"if (" + a + "[" + i + "] == " + key + ") {", "    " + pos + " = " + i + ";", "}",
                                 i + "++;"}));
    }
    return assemble(g, d, sol, Epilogue::Branch);
}

Lines grade(Gen& g) {
    const auto s = g.id("score"), r = g.id("g"), f = g.id("letter"), x = g.id("x");
    Driver d{Repeat::DoCases,
             {"int " + s + " = " + g.num(75, 0) + ";", "char " + r + ";"},
             {},
             {print({s}), "printf(\"%c\\n\", " + r + ");"}};
    static constexpr std::array<std::string_view, 4> kLetters = {"'A'", "'B'", "'C'", "'D'"};
    Solution sol;
    switch (g.pick(3)) {
        case 0: {
            Lines body;
            for (std::size_t k = 0; k < kLetters.size(); ++k) {
                body.push_back((k == 0 ? "if (" : "} else if (") + x + " >= " + std::to_string(90 - 10 * k) + ") {");
                body.push_back("    return " + std::string(kLetters[k]) + ";");
            }
            body.push_back("}");
            body.push_back("return 'F';");
            sol = helper_solution(g, "char " + f + "(int " + x + ")", {}, body, r, call(f, {s}));
            break;
        }
        case 1: {
            Lines cases{"case 10:", "case 9:", "    " + r + " = 'A';", "    break;"};
            for (std::size_t k = 1; k < kLetters.size(); ++k) {
                cases.push_back("case " + std::to_string(9 - k) + ":");
                cases.push_back("    " + r + " = " + std::string(kLetters[k]) + ";");
                cases.push_back("    break;");
            }
            cases.push_back("default:");
            cases.push_back("    " + r + " = 'F';");
            sol.stmts = block("switch (" + s + " / 10)", cases);
            break;
        }
        default: {
            sol.stmts = {r + " = 'F';"};
            for (std::size_t k = kLetters.size(); k-- > 0;)
                append(sol.stmts, block("if (" + s + " >= " + std::to_string(90 - 10 * k) + ")",
                                        {r + " = " + std::string(kLetters[k]) + ";"}));
            break;
        }
    }
    return assemble(g, d, sol, Epilogue::Branch);
}

Lines matrix_trace(Gen& g) {
    const auto m = g.id("m"), k = g.id("k"), i = g.id("i"), j = g.id("j"), r = g.id("r");
    Driver d;
    d.decls = {"int " + m + "[" + g.num(400, 100) + "];", "int " + k + " = " + g.num(6, 2) + ";", "int " + i + ";",
               "int " + j + ";", "int " + r + ";"};
    d.before = counted_loop(g, i, "0", k,
                            counted_loop(g, j, "0", k,
                                         {m + "[" + i + " * " + k + " + " + j + "] = " + i + " + " + j + " * " +
                                          g.num(2, 1) + ";"},
                                         true),
                            true);
    d.repeat = Repeat::ForCases;
    d.output = output(Output::Twice, k, r);
    Solution sol;
    sol.stmts = {r + " = 0;"};
    switch (g.pick(3)) {
        case 0:
            append(sol.stmts,
                   block("for (" + i + " = 0; " + i + " < " + k + "; " + i + "++)",
                         block("for (" + j + " = 0; " + j + " < " + k + "; " + j + "++)",
                               block("if (" + i + " == " + j + ")", {r + " += " + m + "[" + i + " * " + k + " + " + j + "];"}))));
            break;
        case 1:
            append(sol.stmts, block("for (" + i + " = 0; " + i + " < " + k + "; " + i + "++)",
                                    {r + " = " + r + " + " + m + "[" + i + " * " + k + " + " + i + "];"}));
            break;
        default:
            sol.stmts.push_back(i + " = " + k + " - 1;");
            append(sol.stmts, block("while (" + i + " >= 0)",
                                    {r + " += " + m + "[" + i + " * (" + k + " + 1)];", i + "--;"}));
            break;
    }
    return assemble(g, d, sol, Epilogue::Reduce);
}

Lines even_odd(Gen& g) {
    const auto a = g.id("a"), n = g.id("n"), i = g.id("i"), e = g.id("even"), o = g.id("odd");
    Driver d = array_driver(g, a, n, i, {"int " + e + " = 0;", "int " + o + " = 0;"}, {print({e, o})});
    d.repeat = Repeat::DoCases;
    const std::string item = a + "[" + i + "]";
    Solution sol;
    switch (g.pick(3)) {
        case 0:
            sol.stmts = block("for (" + i + " = 0; " + i + " < " + n + "; " + i + "++)",
                              {"if (" + item + " % 2 == 0) {", "    " + e + "++;", "} else {", "    " + o + "++;", "}"});
            break;
        case 1:
            sol.stmts = block("for (" + i + " = 0; " + i + " < " + n + "; " + i + "++)",
                              block("switch (" + item + " % 2)",
                                    {"case 0:", "    " + e + "++;", "    break;", "default:", "    " + o + "++;"}));
            break;
        default:
            sol.stmts = {i + " = 0;"};
            append(sol.stmts, block("while (" + i + " < " + n + ")",
                                    {e + " = " + e + " + 1 - " + item + " % 2;", i + "++;"}));
            sol.stmts.push_back(o + " = " + n + " - " + e + ";");
            break;
    }
    return assemble(g, d, sol, Epilogue::Reduce);
}

Lines palindrome(Gen& g) {
    const auto n = g.id("n"), r = g.id("r");
    Lines output{"if (" + r + ") {", "    " + print_text("yes"), "} else {", "    " + print_text("no"), "}"};
    Driver d{Repeat::WhileCases, {"int " + n + " = " + g.num(12321, 1) + ";", "int " + r + ";"}, {}, output};
    Solution sol;
    if (g.coin()) {
        const auto f = g.id("ispal"), x = g.id("x"), rev = g.id("rev"), orig = g.id("orig");
        Lines body = block("while (" + x + " > 0)", {rev + " = " + rev + " * 10 + " + x + " % 10;", x + " = " + x + " / 10;"});
        body.push_back("return " + rev + " == " + orig + ";");
        sol = helper_solution(g, "int " + f + "(int " + x + ")",
                              {"int " + rev + " = 0;", "int " + orig + " = " + x + ";"}, body, r, call(f, {n}));
    } else {
        const auto dg = g.id("dg"), len = g.id("len"), lo = g.id("lo"), hi = g.id("hi"), m = g.id("m");
        sol.decls = {"int " + dg + "[" + g.num(16, 12) + "];", "int " + len + " = 0;", "int " + lo + ";",
                     "int " + hi + ";", "int " + m + ";"};
        sol.stmts = {m + " = " + n + ";"};
        append(sol.stmts, block("while (" + m + " > 0)",
                                {dg + "[" + len + "] = " + m + " % 10;", len + "++;", m + " = " + m + " / 10;"}));
        sol.stmts.push_back(r + " = 1;");
        sol.stmts.push_back(lo + " = 0;");
        sol.stmts.push_back(hi + " = " + len + " - 1;");
        Lines loop = block("if (" + dg + "[" + lo + "] != " + dg + "[" + hi + "])", {r + " = 0;", "break;"});
        loop.push_back(lo + "++;");
        loop.push_back(hi + "--;");
        append(sol.stmts, block("while (" + lo + " < " + hi + ")", loop));
    }
    return assemble(g, d, sol, Epilogue::Reduce);
}

constexpr std::array<std::pair<std::string_view, Template>, 15> kProblems = {{
    {"sum_to_n", sum_to_n},
    {"factorial", factorial},
    {"fibonacci", fibonacci},
    {"gcd", gcd},
    {"prime_count", prime_count},
    {"array_max", array_max},
    {"reverse_digits", reverse_digits},
    {"digit_sum", digit_sum},
    {"power", power},
    {"sort_array", sort_array},
    {"linear_search", linear_search},
    {"grade", grade},
    {"matrix_trace", matrix_trace},
    {"even_odd", even_odd},
    {"palindrome", palindrome},
}};

}  // namespace

std::size_t family_count(Task task) noexcept {
    return task == Task::Classify ? kFamilies.size() : kProblems.size();
}

std::string_view family_name(Task task, std::size_t family) {
    if (family >= family_count(task)) throw std::out_of_range("no template family " + std::to_string(family));
    return task == Task::Classify ? kFamilies[family].first : kProblems[family].first;
}

std::string render_program(Task task, std::size_t family, std::uint64_t seed,
                           const VariationKnobs& knobs) {
    if (family >= family_count(task)) throw std::out_of_range("no template family " + std::to_string(family));
    Gen g(seed, knobs);
    const Template t = task == Task::Classify ? kFamilies[family].second : kProblems[family].second;
    std::string out;
    for (const auto& line : t(g)) {
        out += line;
        out += '\n';
    }
    return out;
}

}  // namespace mtn::corpus
