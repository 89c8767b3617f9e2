#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "mtn/corpus.hpp"
#include "mtn/frontend.hpp"
#include "mtn/model.hpp"
#include "mtn/random.hpp"

namespace {

using namespace mtn;
using namespace mtn::model;
using ad::Tape;
using ad::Tensor;
using ad::Var;
using Vec = std::vector<double>;

// -- straight-line reference arithmetic ---------------------------------------

Vec matvec(const Tensor& W, const Vec& x, std::size_t col0 = 0) {
    Vec out(W.rows(), 0.0);
    for (std::size_t r = 0; r < W.rows(); ++r)
        for (std::size_t c = 0; c < x.size(); ++c) out[r] += W(r, col0 + c) * x[c];
    return out;
}

Vec plus(Vec a, const Vec& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

Vec column(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

double sigm(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Vec values(Var v) { return {v.value().begin(), v.value().end()}; }

Vec random_vec(Rng& rng, std::size_t d) {
    Vec v(d);
    for (double& x : v) x = rng.uniform(-1, 1);
    return v;
}

ModelConfig config_for(Variant variant, std::size_t d, std::uint64_t seed = 1) {
    ModelConfig c;
    c.variant = variant;
    c.hidden = d;
    c.seed = seed;
    return c;
}

// -- parameter counts -----------------------------------------------------------

TEST(ParamCount, ClosedForms) {
    for (std::size_t d : {1u, 4u, 32u, 100u, 200u, 320u}) {
        SCOPED_TRACE(d);
        const std::size_t d2 = d * d;
        EXPECT_EQ(container_param_count(d), 8 * d2 + 4 * d);
        std::size_t modules = 0;
        for (ModuleType m : kAllModuleTypes) modules += module_param_count(m, d);
        EXPECT_EQ(modules, 33 * d2 + 16 * d);
        EXPECT_EQ(param_count(config_for(Variant::MtnA, d)).encoder(), 41 * d2 + 20 * d);
        EXPECT_EQ(param_count(config_for(Variant::MtnB, d)).encoder(), 105 * d2 + 52 * d);
        EXPECT_EQ(param_count(config_for(Variant::TreeLstm, d)).encoder(), 8 * d2 + 4 * d);
    }
}

TEST(ParamCount, NamedInstances) {
    EXPECT_EQ(param_count(config_for(Variant::MtnB, 200)).encoder(), 4'210'400u);
    EXPECT_EQ(param_count(config_for(Variant::MtnA, 4)).encoder(), 736u);
    EXPECT_EQ(param_count(config_for(Variant::MtnA, 320)).encoder(), 4'204'800u);
    EXPECT_EQ(param_count(config_for(Variant::TreeLstm, 720)).encoder(), 4'150'080u);
    EXPECT_EQ(param_count(config_for(Variant::MtnB, 1)).encoder(), 157u);
}

TEST(ParamCount, PerModuleTable) {
    const std::size_t d = 7, d2 = 49;
    for (ModuleType m : {ModuleType::FuncDef, ModuleType::While, ModuleType::DoWhile, ModuleType::Switch,
                         ModuleType::If})
        EXPECT_EQ(module_param_count(m, d), 2 * d2 + d);
    EXPECT_EQ(module_param_count(ModuleType::For, d), 5 * d2 + 2 * d);
    EXPECT_EQ(module_param_count(ModuleType::Case, d), 10 * d2 + 5 * d);
    EXPECT_EQ(module_param_count(ModuleType::Seq, d), 8 * d2 + 4 * d);
}

TEST(ParamCount, LayoutAgreesWithStore) {
    for (Variant v : {Variant::MtnA, Variant::MtnB, Variant::TreeLstm, Variant::SeqLstm}) {
        ModelConfig c = config_for(v, 5);
        c.num_classes = 3;
        const ParamStore store(c);
        const ParamCount count = param_count(c);
        EXPECT_EQ(store.scalar_count(), count.total()) << variant_name(v);
        EXPECT_EQ(count.head, 3u * 5u + 3u);
        EXPECT_EQ(count.embeddings, c.vocab.size() * 5u);
    }
}

TEST(ParamCount, DisablingDropsModuleAndContainer) {
    const std::size_t d = 6;
    const std::size_t full = param_count(config_for(Variant::MtnB, d)).encoder();
    for (ModuleType m : kAllModuleTypes) {
        ModelConfig c = config_for(Variant::MtnB, d);
        c.disabled_modules.set(static_cast<std::size_t>(m));
        EXPECT_EQ(param_count(c).encoder(), full - module_param_count(m, d) - container_param_count(d))
            << module_name(m);
        ModelConfig a = config_for(Variant::MtnA, d);
        a.disabled_modules.set(static_cast<std::size_t>(m));
        EXPECT_EQ(param_count(a).encoder(), 41 * d * d + 20 * d - module_param_count(m, d));
    }
}

TEST(Config, ValidateRejectsBadCombinations) {
    ModelConfig c = config_for(Variant::TreeLstm, 4);
    c.disabled_modules.set(0);
    EXPECT_THROW(c.validate(), std::invalid_argument);
    EXPECT_THROW(config_for(Variant::MtnB, 0).validate(), std::invalid_argument);
}

// -- initialization ---------------------------------------------------------------

TEST(Init, RangesAndZeroBiases) {
    const std::size_t d = 16;
    const ParamStore store(config_for(Variant::MtnB, d, 9));
    const double bound = 1.0 / std::sqrt(static_cast<double>(d));
    for (const auto& name : store.names()) {
        const Tensor& t = store.at(name);
        const bool bias = t.cols() == 1 && name != "embedding";
        for (double x : t.data()) {
            if (name == "embedding") {
                EXPECT_LE(std::abs(x), 0.05);
            } else if (bias) {
                EXPECT_EQ(x, 0.0) << name;
            } else {
                EXPECT_LE(std::abs(x), bound) << name;
            }
        }
    }
}

TEST(Init, DeterministicAndNameKeyed) {
    const ParamStore a(config_for(Variant::MtnB, 8, 5));
    const ParamStore b(config_for(Variant::MtnB, 8, 5));
    for (const auto& name : a.names()) {
        const auto x = a.at(name).data(), y = b.at(name).data();
        EXPECT_TRUE(std::equal(x.begin(), x.end(), y.begin())) << name;
    }
    // A shared name holds the same values whatever else the layout contains.
    const ParamStore tree(config_for(Variant::TreeLstm, 8, 5));
    const auto x = a.at("container.default.W_i").data(), y = tree.at("container.default.W_i").data();
    EXPECT_TRUE(std::equal(x.begin(), x.end(), y.begin()));
    const ParamStore other(config_for(Variant::MtnB, 8, 6));
    EXPECT_NE(a.at("container.default.W_i").data()[0], other.at("container.default.W_i").data()[0]);
}

// -- dispatch ---------------------------------------------------------------------

TEST(Dispatch, WhileFragmentTrace) {
    const ast::AstNode unit = ast::parse_source("int main() { while (i < 10) { i = i + 1; } }");
    const ast::AstNode& loop = unit.children[0].children[1].children[0];
    const ModelConfig c = config_for(Variant::MtnB, 4);
    EXPECT_EQ(dispatch(loop, c), (Dispatch{Dispatch::Kind::Typed, ModuleType::While}));
    EXPECT_EQ(dispatch(loop.children[1], c).kind, Dispatch::Kind::Seq);
    for (const auto& [kind, d] : dispatch_trace(loop, c)) {
        if (kind == ast::NodeKind::While || kind == ast::NodeKind::Compound) continue;
        EXPECT_EQ(d.kind, Dispatch::Kind::Default) << ast::kind_name(kind);
    }
}

TEST(Dispatch, DisabledAndLeafRules) {
    ModelConfig c = config_for(Variant::MtnB, 4);
    ast::AstNode branch(ast::NodeKind::If);
    branch.children.emplace_back(ast::NodeKind::ID, "c");
    branch.children.emplace_back(ast::NodeKind::EmptyStatement);
    EXPECT_EQ(dispatch(branch, c).module, ModuleType::If);
    c.disabled_modules.set(static_cast<std::size_t>(ModuleType::If));
    EXPECT_EQ(dispatch(branch, c).kind, Dispatch::Kind::Default);
    EXPECT_EQ(dispatch(ast::AstNode(ast::NodeKind::Compound), c).kind, Dispatch::Kind::Default);
    EXPECT_EQ(dispatch(ast::AstNode(ast::NodeKind::ID, "x"), c).kind, Dispatch::Kind::Default);
    EXPECT_EQ(dispatch(branch, config_for(Variant::TreeLstm, 4)).kind, Dispatch::Kind::Default);
}

// -- module and unit oracles ---------------------------------------------------------

TEST(Modules, LstmStepMatchesHandComputation) {
    const std::size_t d = 5;
    ParamStore store(config_for(Variant::MtnB, d, 21));
    const GateSet& cell = store.module(ModuleType::Seq).lstm;
    // Non-zero biases so every term is exercised.
    Rng rng(2);
    for (auto* b : cell.b)
        for (double& x : b->data()) x = rng.uniform(-0.5, 0.5);
    const Vec x = random_vec(rng, d);

    Tape tape;
    const Var in = tape.constant({d, 1}, x);
    const Var h = module_forward(tape, ModuleType::Seq, std::span(&in, 1), store.module(ModuleType::Seq), d);

    // From zero state: U h_prev and f*c_prev vanish.
    auto gate = [&](Gate g) { return plus(matvec(*cell.W[g], x), column(*cell.b[g])); };
    const Vec zi = gate(kInput), zo = gate(kOutput), zu = gate(kUpdate);
    for (std::size_t k = 0; k < d; ++k) {
        const double c = sigm(zi[k]) * std::tanh(zu[k]);
        EXPECT_NEAR(values(h)[k], sigm(zo[k]) * std::tanh(c), 1e-14);
    }
}

TEST(Modules, TwoStepLstmMatchesHandComputation) {
    const std::size_t d = 3;
    ParamStore store(config_for(Variant::MtnB, d, 4));
    const GateSet& cell = store.module(ModuleType::Seq).lstm;
    Rng rng(8);
    const Vec x1 = random_vec(rng, d), x2 = random_vec(rng, d);
    Tape tape;
    const std::array<Var, 2> in{tape.constant({d, 1}, x1), tape.constant({d, 1}, x2)};
    const Vec got = values(lstm_last_hidden(tape, in, cell, d));

    Vec h(d, 0.0), c(d, 0.0);
    for (const Vec* x : {&x1, &x2}) {
        auto pre = [&](Gate g) { return plus(plus(matvec(*cell.W[g], *x), matvec(*cell.U[g], h)), column(*cell.b[g])); };
        const Vec zi = pre(kInput), zf = pre(kForget), zo = pre(kOutput), zu = pre(kUpdate);
        for (std::size_t k = 0; k < d; ++k) {
            c[k] = sigm(zi[k]) * std::tanh(zu[k]) + sigm(zf[k]) * c[k];
            h[k] = sigm(zo[k]) * std::tanh(c[k]);
        }
    }
    for (std::size_t k = 0; k < d; ++k) EXPECT_NEAR(got[k], h[k], 1e-14);
}

TEST(Modules, RecursiveUnitMatchesHandComputation) {
    const std::size_t d = 4;
    ParamStore store(config_for(Variant::MtnB, d, 3));
    Rng rng(5);
    const Vec a = random_vec(rng, d), b = random_vec(rng, d);
    const ModuleParams& p = store.module(ModuleType::FuncDef);
    for (double& x : p.b->data()) x = rng.uniform(-0.3, 0.3);
    Tape tape;
    const std::array<Var, 2> in{tape.constant({d, 1}, a), tape.constant({d, 1}, b)};
    const Vec got = values(module_forward(tape, ModuleType::FuncDef, in, p, d));
    const Vec z = plus(plus(matvec(*p.W, a, 0), matvec(*p.W, b, d)), column(*p.b));
    for (std::size_t k = 0; k < d; ++k) EXPECT_NEAR(got[k], std::tanh(z[k]), 1e-14);
}

TEST(Modules, ForOuterTanhToggle) {
    const std::size_t d = 3;
    ParamStore store(config_for(Variant::MtnB, d, 3));
    Rng rng(6);
    std::vector<Vec> kids;
    for (int i = 0; i < 4; ++i) kids.push_back(random_vec(rng, d));
    const ModuleParams& p = store.module(ModuleType::For);
    Vec inner = column(*p.b);
    for (std::size_t j = 0; j < 3; ++j) inner = plus(inner, matvec(*p.W, kids[j], j * d));
    for (double& v : inner) v = std::tanh(v);
    const Vec outer = plus(plus(matvec(*p.W2, inner, 0), matvec(*p.W2, kids[3], d)), column(*p.b2));

    for (bool wrap : {true, false}) {
        Tape tape;
        std::vector<Var> in;
        for (const auto& k : kids) in.push_back(tape.constant({d, 1}, k));
        const Vec got = values(module_forward(tape, ModuleType::For, in, p, d, wrap));
        for (std::size_t k = 0; k < d; ++k) EXPECT_NEAR(got[k], wrap ? std::tanh(outer[k]) : outer[k], 1e-14);
    }
}

TEST(Modules, IfWithEqualBranchesEqualsTwoChildForm) {
    const std::size_t d = 4;
    ParamStore store(config_for(Variant::MtnB, d, 12));
    Rng rng(1);
    const Vec cond = random_vec(rng, d), branch = random_vec(rng, d);
    Tape tape;
    const std::array<Var, 3> three{tape.constant({d, 1}, cond), tape.constant({d, 1}, branch),
                                   tape.constant({d, 1}, branch)};
    const auto& p = store.module(ModuleType::If);
    const Vec a = values(module_forward(tape, ModuleType::If, three, p, d));
    const Vec b = values(module_forward(tape, ModuleType::If, std::span(three).first(2), p, d));
    EXPECT_EQ(a, b);
}

TEST(Modules, IfTakesElementwiseMaxOfBranches) {
    const std::size_t d = 4;
    ParamStore store(config_for(Variant::MtnB, d, 12));
    Rng rng(2);
    const Vec cond = random_vec(rng, d), t = random_vec(rng, d), f = random_vec(rng, d);
    Tape tape;
    const auto& p = store.module(ModuleType::If);
    const Var vc = tape.constant({d, 1}, cond), vt = tape.constant({d, 1}, t), vf = tape.constant({d, 1}, f);
    const std::array<Var, 3> three{vc, vt, vf};
    const Vec got = values(module_forward(tape, ModuleType::If, three, p, d));
    const std::array<Var, 2> left{vc, vt}, right{vc, vf};
    const Vec l = values(module_forward(tape, ModuleType::If, left, p, d));
    const Vec r = values(module_forward(tape, ModuleType::If, right, p, d));
    for (std::size_t k = 0; k < d; ++k) EXPECT_EQ(got[k], std::max(l[k], r[k]));
}

TEST(Modules, CaseWithoutStatementsUsesZeroSummary) {
    const std::size_t d = 3;
    ParamStore store(config_for(Variant::MtnB, d, 2));
    Rng rng(3);
    const Vec label = random_vec(rng, d);
    const ModuleParams& p = store.module(ModuleType::Case);
    Tape tape;
    const Var in = tape.constant({d, 1}, label);
    const Vec got = values(module_forward(tape, ModuleType::Case, std::span(&in, 1), p, d));
    const Vec z = plus(matvec(*p.W, label, 0), column(*p.b));
    for (std::size_t k = 0; k < d; ++k) EXPECT_NEAR(got[k], std::tanh(z[k]), 1e-14);
}

TEST(Modules, ZeroParamsGiveZeroOutput) {
    const std::size_t d = 3;
    ParamStore store(config_for(Variant::MtnB, d, 2));
    for (const auto& name : store.names()) std::fill(store.at(name).data().begin(), store.at(name).data().end(), 0.0);
    Rng rng(3);
    Tape tape;
    const std::array<Var, 2> in{tape.constant({d, 1}, random_vec(rng, d)), tape.constant({d, 1}, random_vec(rng, d))};
    for (double v : values(module_forward(tape, ModuleType::While, in, store.module(ModuleType::While), d)))
        EXPECT_EQ(v, 0.0);
}

TEST(Modules, ArityViolations) {
    const std::size_t d = 2;
    ParamStore store(config_for(Variant::MtnB, d));
    Tape tape;
    const std::array<Var, 4> in{tape.zeros(d), tape.zeros(d), tape.zeros(d), tape.zeros(d)};
    const std::span<const Var> all(in);
    EXPECT_THROW(module_forward(tape, ModuleType::While, all.first(3), store.module(ModuleType::While), d),
                 ArityViolation);
    EXPECT_THROW(module_forward(tape, ModuleType::If, all.first(1), store.module(ModuleType::If), d), ArityViolation);
    EXPECT_THROW(module_forward(tape, ModuleType::For, all.first(3), store.module(ModuleType::For), d), ArityViolation);
    EXPECT_THROW(module_forward(tape, ModuleType::Seq, all.first(0), store.module(ModuleType::Seq), d), ArityViolation);
    EXPECT_THROW(module_forward(tape, ModuleType::Case, all.first(0), store.module(ModuleType::Case), d), ArityViolation);
}

TEST(Unit, ZeroParameterCases) {
    const std::size_t d = 3;
    ParamStore store(config_for(Variant::MtnA, d));
    for (const auto& name : store.names()) std::fill(store.at(name).data().begin(), store.at(name).data().end(), 0.0);
    const GateSet& box = store.container(std::nullopt);
    Tape tape;
    const UnitState leaf = mtn_unit_forward(tape, tape.zeros(d), {}, tape.zeros(d), box);
    for (double v : values(leaf.h)) EXPECT_EQ(v, 0.0);
    for (double v : values(leaf.c)) EXPECT_EQ(v, 0.0);

    const Vec ones(d, 1.0);
    const std::array<UnitState, 1> kids{UnitState{tape.zeros(d), tape.constant({d, 1}, ones)}};
    const UnitState one = mtn_unit_forward(tape, tape.zeros(d), kids, tape.zeros(d), box);
    for (double v : values(one.c)) EXPECT_DOUBLE_EQ(v, 0.5);
    for (double v : values(one.h)) EXPECT_NEAR(v, 0.5 * std::tanh(0.5), 1e-15);
    EXPECT_NEAR(0.5 * std::tanh(0.5), 0.23106, 1e-5);
}

TEST(Unit, MatchesHandComputationWithTwoChildren) {
    const std::size_t d = 4;
    ParamStore store(config_for(Variant::MtnB, d, 77));
    const GateSet& box = store.container(ModuleType::While);
    Rng rng(9);
    for (auto* b : box.b)
        for (double& x : b->data()) x = rng.uniform(-0.5, 0.5);
    const Vec x = random_vec(rng, d), ht = random_vec(rng, d);
    const Vec h1 = random_vec(rng, d), c1 = random_vec(rng, d), h2 = random_vec(rng, d), c2 = random_vec(rng, d);

    Tape tape;
    const std::array<UnitState, 2> kids{UnitState{tape.constant({d, 1}, h1), tape.constant({d, 1}, c1)},
                                        UnitState{tape.constant({d, 1}, h2), tape.constant({d, 1}, c2)}};
    const UnitState got = mtn_unit_forward(tape, tape.constant({d, 1}, x), kids, tape.constant({d, 1}, ht), box);

    auto pre = [&](Gate g, const Vec& h) { return plus(plus(matvec(*box.W[g], x), matvec(*box.U[g], h)), column(*box.b[g])); };
    const Vec zi = pre(kInput, ht), zo = pre(kOutput, ht), zu = pre(kUpdate, ht);
    const Vec zf1 = pre(kForget, h1), zf2 = pre(kForget, h2);
    for (std::size_t k = 0; k < d; ++k) {
        const double c = sigm(zi[k]) * std::tanh(zu[k]) + sigm(zf1[k]) * c1[k] + sigm(zf2[k]) * c2[k];
        EXPECT_NEAR(values(got.c)[k], c, 1e-14);
        EXPECT_NEAR(values(got.h)[k], sigm(zo[k]) * std::tanh(c), 1e-14);
    }
}

// -- encoder ------------------------------------------------------------------------

ast::AstNode seq_node(std::size_t n) {
    ast::AstNode block(ast::NodeKind::Compound);
    for (std::size_t i = 0; i < n; ++i) {
        ast::AstNode ret(ast::NodeKind::Return);
        ast::AstNode value(ast::NodeKind::BinaryOp, "+");
        value.children.emplace_back(ast::NodeKind::ID, "a");
        for (std::size_t j = 0; j < i; ++j) {
            ast::AstNode wrap(ast::NodeKind::UnaryOp, "-");
            wrap.children.push_back(std::move(value));
            value = std::move(wrap);
        }
        ret.children.push_back(std::move(value));
        block.children.push_back(std::move(ret));
    }
    return block;
}

std::vector<std::uint64_t> bits(const Vec& v) {
    std::vector<std::uint64_t> out;
    for (double x : v) out.push_back(std::bit_cast<std::uint64_t>(x));
    return out;
}

TEST(Encoder, SeqNodeIsOrderSensitive) {
    ast::AstNode block = seq_node(5);
    ParamStore store(config_for(Variant::MtnB, 8, 3));
    const Vec base = embed(block, store);
    std::reverse(block.children.begin(), block.children.end());
    const Vec flipped = embed(block, store);
    double diff = 0.0;
    for (std::size_t k = 0; k < base.size(); ++k) diff = std::max(diff, std::abs(base[k] - flipped[k]));
    EXPECT_GT(diff, 1e-8);
}

TEST(Encoder, DefaultNodeIsPermutationInvariant) {
    ast::AstNode call(ast::NodeKind::ArrayRef);
    call.children = seq_node(4).children;
    ParamStore store(config_for(Variant::MtnB, 8, 3));
    ASSERT_EQ(dispatch(call, store.config()).kind, Dispatch::Kind::Default);
    const auto reference = bits(embed(call, store));
    std::vector<std::size_t> order{0, 1, 2, 3};
    const auto kids = call.children;
    do {
        for (std::size_t i = 0; i < 4; ++i) call.children[i] = kids[order[i]];
        EXPECT_EQ(bits(embed(call, store)), reference);
    } while (std::next_permutation(order.begin(), order.end()));
}

TEST(Encoder, AllDisabledReducesToTreeLstm) {
    ModelConfig b = config_for(Variant::MtnB, 6, 31);
    b.disabled_modules.set();
    ModelConfig t = config_for(Variant::TreeLstm, 6, 31);
    ParamStore mb(b), tl(t);
    for (std::size_t i = 0; i < 20; ++i) {
        const ast::AstNode tree = ast::parse_source(
            corpus::generate_program(corpus::Task::Classify, i % 10, combine_seed(99, i), {}));
        EXPECT_EQ(bits(embed(tree, mb)), bits(embed(tree, tl))) << i;
    }
}

TEST(Encoder, SingleEmptyNodeWithZeroParams) {
    ParamStore store(config_for(Variant::MtnB, 4));
    for (const auto& name : store.names()) std::fill(store.at(name).data().begin(), store.at(name).data().end(), 0.0);
    for (double v : embed(ast::AstNode(ast::NodeKind::Empty), store)) EXPECT_EQ(v, 0.0);
}

TEST(Encoder, SeqBaselineZeroParams) {
    ParamStore store(config_for(Variant::SeqLstm, 4));
    for (const auto& name : store.names()) std::fill(store.at(name).data().begin(), store.at(name).data().end(), 0.0);
    ast::AstNode two(ast::NodeKind::Return);
    two.children.emplace_back(ast::NodeKind::Return);
    for (double v : embed(two, store)) EXPECT_EQ(v, 0.0);
}

TEST(Encoder, SeqBaselineSingleNodeIsOneLstmStep) {
    const std::size_t d = 4;
    ParamStore store(config_for(Variant::SeqLstm, d, 8));
    const ast::AstNode leaf(ast::NodeKind::Break);
    const std::size_t row = store.config().vocab.index("Break");
    const Tensor& table = store.embedding();
    const Vec x(table.data().begin() + static_cast<std::ptrdiff_t>(row * d),
                table.data().begin() + static_cast<std::ptrdiff_t>((row + 1) * d));
    Tape tape;
    const Var in = tape.constant({d, 1}, x);
    const Vec want = values(lstm_last_hidden(tape, std::span(&in, 1), store.sequence_lstm(), d));
    EXPECT_EQ(embed(leaf, store), want);
}

TEST(Encoder, EndToEndGradientCheck) {
    const ast::AstNode unit = ast::parse_source("int f(int n) { int s = 0; while (n > 0) { s = s + n; n--; } return s; }");
    for (Variant v : {Variant::MtnA, Variant::MtnB, Variant::TreeLstm, Variant::SeqLstm}) {
        ParamStore store(config_for(v, 3, 13));
        std::vector<Tensor*> inputs;
        for (const auto& name : store.names()) inputs.push_back(&store.at(name));
        const double err = ad::grad_check([&](Tape& t) { return t.sum(encode(t, unit, store)); }, inputs);
        EXPECT_LT(err, 1e-4) << variant_name(v);
    }
}

TEST(Vocab, UnknownTokensMapToZero) {
    const Vocabulary v({"b", "a", "a"});
    EXPECT_EQ(v.size(), 3u);
    EXPECT_EQ(v.index("a"), 1u);
    EXPECT_EQ(v.index("b"), 2u);
    EXPECT_EQ(v.index("zzz"), Vocabulary::kUnk);
}

TEST(ModelFile, RoundTripPreservesEmbeddings) {
    const ast::AstNode unit = ast::parse_source("int main() { int i; for (i = 0; i < 3; i++) if (i) i = 2; }");
    ModelConfig c = config_for(Variant::MtnB, 5, 4);
    std::vector<const ast::AstNode*> trees{&unit};
    c.vocab = Vocabulary::build(trees, ast::IdentifierMode::WithIds);
    c.identifier_mode = ast::IdentifierMode::WithIds;
    c.disabled_modules.set(static_cast<std::size_t>(ModuleType::If));
    c.num_classes = 3;
    ParamStore store(c);
    const std::string text = save_model(store);
    ParamStore back = load_model(text);
    EXPECT_EQ(bits(embed(unit, back)), bits(embed(unit, store)));
    EXPECT_EQ(save_model(back), text);
    EXPECT_THROW(load_model("{\"format\":\"other\"}"), std::exception);
}

}  // namespace
