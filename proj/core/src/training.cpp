#include "mtn/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <json.hpp>
#include <map>
#include <numeric>
#include <ostream>

#include "mtn/random.hpp"

namespace mtn::train {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kAdamFormat = "mtn-adam/1";

[[noreturn]] void bad_state(const std::string& what) {
    throw std::runtime_error("invalid optimizer state: " + what);
}

// Draws `k` distinct positions of 0..n-1 by a partial Fisher-Yates pass.
std::vector<std::size_t> choose_distinct(std::size_t n, std::size_t k, Rng& rng) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    k = std::min(k, n);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + rng.below(n - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

std::vector<ClonePair> draw(const std::vector<ClonePair>& population, std::size_t n, Rng& rng) {
    std::vector<ClonePair> out;
    out.reserve(n);
    for (std::size_t idx : choose_distinct(population.size(), n, rng)) out.push_back(population[idx]);
    // up-sampling: the whole population was taken, repeat random members
    while (out.size() < n) out.push_back(population[rng.below(population.size())]);
    return out;
}

double cosine_or_zero(std::span<const double> a, std::span<const double> b) {
    try {
        return clone_forward(a, b);
    } catch (const DegenerateVector&) {
        return 0.0;
    }
}

ordered_json moments_to_json(const std::vector<std::vector<double>>& moments,
                             const std::vector<std::string>& names) {
    ordered_json out = ordered_json::object();
    for (std::size_t i = 0; i < names.size(); ++i) out[names[i]] = moments[i];
    return out;
}

std::vector<std::vector<double>> moments_from_json(const ordered_json& doc,
                                                   const model::ParamStore& params) {
    if (!doc.is_object() || doc.size() != params.names().size())
        bad_state("moment table does not match the model");
    std::vector<std::vector<double>> out;
    for (const auto& name : params.names()) {
        const auto it = doc.find(name);
        if (it == doc.end() || !it->is_array()) bad_state("missing moments for " + name);
        if (it->size() != params.at(name).size()) bad_state("moment shape mismatch for " + name);
        out.push_back(it->get<std::vector<double>>());
    }
    return out;
}

template <typename Step>
FitResult fit_loop(model::ParamStore params, const FitOptions& options, Step&& run_epoch,
                   const std::function<double(model::ParamStore&)>& validate) {
    AdamState state(params, options.adam);
    FitResult result{params, state, 0, {}};
    double best = -1.0;
    for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
        const auto start = std::chrono::steady_clock::now();
        const EpochResult er = run_epoch(params, state, epoch);
        const double metric = validate(params);
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.history.push_back({epoch, er.mean_loss, metric, wall});
        if (options.log != nullptr) {
            ordered_json line = ordered_json::object();
            line["epoch"] = epoch;
            line["mean_loss"] = er.mean_loss;
            line["val_metric"] = metric;
            line["wall_seconds"] = wall;
            *options.log << line.dump() << '\n' << std::flush;
        }
        if (metric > best) {
            best = metric;
            result.params = params;
            result.state = state;
            result.best_epoch = epoch;
        }
    }
    return result;
}

}  // namespace

// -- heads --------------------------------------------------------------------

DegenerateVector::DegenerateVector() : std::domain_error("degenerate code vector (norm < 1e-12)") {}

ad::Var classify_forward(ad::Tape& tape, ad::Var v, model::ParamStore& params) {
    if (params.head_weight() == nullptr) throw std::invalid_argument("model has no classification head");
    return tape.add(tape.matmul(tape.param(*params.head_weight()), v),
                    tape.param(*params.head_bias()));
}

std::size_t predict_class(std::span<const double> logits) {
    if (logits.empty()) throw std::invalid_argument("predict_class: empty logits");
    // max_element returns the first maximum
    return static_cast<std::size_t>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

ad::Var classification_loss(ad::Tape& tape, const ast::AstNode& ast, std::size_t label,
                            model::ParamStore& params) {
    const ad::Var v = model::encode(tape, ast, params);
    return tape.cross_entropy(classify_forward(tape, v, params), label);
}

double clone_forward(std::span<const double> v1, std::span<const double> v2) {
    if (v1.size() != v2.size())
        throw ad::ShapeMismatch("clone_forward", {v2.size(), 1}, {v1.size(), 1});
    double dot = 0.0, n1 = 0.0, n2 = 0.0;
    for (std::size_t i = 0; i < v1.size(); ++i) {
        dot += v1[i] * v2[i];
        n1 += v1[i] * v1[i];
        n2 += v2[i] * v2[i];
    }
    n1 = std::sqrt(n1);
    n2 = std::sqrt(n2);
    if (n1 < 1e-12 || n2 < 1e-12) throw DegenerateVector();
    return dot / (n1 * n2);
}

ad::Var clone_loss(ad::Tape& tape, ad::Var v1, ad::Var v2, int label) {
    return tape.squared_error(tape.cosine(v1, v2), static_cast<double>(label));
}

// -- optimizer ----------------------------------------------------------------

AdamState::AdamState(const model::ParamStore& params, AdamConfig cfg) : config(cfg) {
    for (const auto& name : params.names()) {
        m.emplace_back(params.at(name).size(), 0.0);
        v.emplace_back(params.at(name).size(), 0.0);
    }
}

void adam_update(std::span<double> theta, std::span<const double> grad, std::span<double> m,
                 std::span<double> v, std::uint64_t t, const AdamConfig& c) {
    const double td = static_cast<double>(t);
    const double correct1 = 1.0 - std::pow(c.beta1, td);
    const double correct2 = 1.0 - std::pow(c.beta2, td);
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double g = grad[i];
        m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
        v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
        const double m_hat = m[i] / correct1;
        const double v_hat = v[i] / correct2;
        theta[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
    }
}

void adam_step(model::ParamStore& params, AdamState& state) {
    const auto& names = params.names();
    if (state.m.size() != names.size()) throw std::invalid_argument("optimizer state does not match model");
    state.t += 1;
    for (std::size_t k = 0; k < names.size(); ++k) {
        ad::Tensor& p = params.at(names[k]);
        if (!p.requires_grad()) continue;
        adam_update(p.data(), p.grad(), state.m[k], state.v[k], state.t, state.config);
    }
    params.zero_grad();
}

std::string save_adam(const AdamState& state, const model::ParamStore& params) {
    ordered_json doc = ordered_json::object();
    doc["format"] = kAdamFormat;
    doc["t"] = state.t;
    doc["config"] = {{"lr", state.config.lr},
                     {"beta1", state.config.beta1},
                     {"beta2", state.config.beta2},
                     {"eps", state.config.eps}};
    doc["m"] = moments_to_json(state.m, params.names());
    doc["v"] = moments_to_json(state.v, params.names());
    return doc.dump();
}

AdamState load_adam(std::string_view text, const model::ParamStore& params) {
    const ordered_json doc = ordered_json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) bad_state("not a JSON object");
    if (doc.value("format", "") != kAdamFormat) bad_state("unsupported format tag");
    AdamState state;
    try {
        state.t = doc.at("t").get<std::uint64_t>();
        const auto& c = doc.at("config");
        state.config = {c.at("lr").get<double>(), c.at("beta1").get<double>(),
                        c.at("beta2").get<double>(), c.at("eps").get<double>()};
        state.m = moments_from_json(doc.at("m"), params);
        state.v = moments_from_json(doc.at("v"), params);
    } catch (const nlohmann::json::exception& e) {
        bad_state(e.what());
    }
    return state;
}

// -- epoch loop ---------------------------------------------------------------

ExampleError::ExampleError(std::size_t index, const std::string& what)
    : std::runtime_error("example " + std::to_string(index) + ": " + what), index_(index) {}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(combine_seed(seed, epoch));
    rng.shuffle(std::span<std::size_t>(order));
    return order;
}

EpochResult train_epoch(std::size_t n, const ExampleLoss& loss, model::ParamStore& params,
                        AdamState& state, std::size_t batch_size, std::uint64_t seed,
                        std::size_t epoch) {
    if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
    const auto order = epoch_order(n, seed, epoch);
    params.zero_grad();
    EpochResult result;
    double total = 0.0;
    for (std::size_t start = 0; start < n; start += batch_size) {
        const std::size_t end = std::min(n, start + batch_size);
        for (std::size_t k = start; k < end; ++k) {
            const std::size_t idx = order[k];
            try {
                ad::Tape tape;
                const ad::Var l = loss(tape, idx);
                total += l.item();
                tape.backward(l);
            } catch (const std::exception& e) {
                throw ExampleError(idx, e.what());
            }
        }
        params.scale_grad(1.0 / static_cast<double>(end - start));
        adam_step(params, state);
        ++result.steps;
    }
    result.mean_loss = n == 0 ? 0.0 : total / static_cast<double>(n);
    return result;
}

// -- splits -------------------------------------------------------------------

EmptySplit::EmptySplit(const std::string& which) : std::invalid_argument("empty " + which + " split") {}

namespace {

Splits slice(std::vector<std::size_t> items, std::uint64_t seed, Ratios r) {
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(items));
    const std::size_t total = r.train + r.valid + r.test;
    const std::size_t n_valid = items.size() * r.valid / total;
    const std::size_t n_test = items.size() * r.test / total;
    const std::size_t n_train = items.size() - n_valid - n_test;
    Splits s;
    s.train.assign(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.valid.assign(items.begin() + static_cast<std::ptrdiff_t>(n_train),
                   items.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid));
    s.test.assign(items.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid), items.end());
    return s;
}

void check_nonempty(const Splits& s) {
    if (s.train.empty()) throw EmptySplit("train");
    if (s.valid.empty()) throw EmptySplit("valid");
    if (s.test.empty()) throw EmptySplit("test");
}

void check_ratios(Ratios r) {
    if (r.train == 0 || r.valid == 0 || r.test == 0)
        throw std::invalid_argument("split ratios must be positive");
}

}  // namespace

Splits make_splits(std::size_t n, std::uint64_t seed, Ratios ratios) {
    check_ratios(ratios);
    std::vector<std::size_t> items(n);
    std::iota(items.begin(), items.end(), 0);
    Splits s = slice(std::move(items), seed, ratios);
    check_nonempty(s);
    return s;
}

Splits make_stratified_splits(std::span<const std::size_t> labels, std::uint64_t seed, Ratios ratios) {
    check_ratios(ratios);
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
    Splits out;
    for (auto& [label, members] : groups) {
        const Splits part = slice(std::move(members), combine_seed(seed, label), ratios);
        out.train.insert(out.train.end(), part.train.begin(), part.train.end());
        out.valid.insert(out.valid.end(), part.valid.begin(), part.valid.end());
        out.test.insert(out.test.end(), part.test.begin(), part.test.end());
    }
    for (auto* list : {&out.train, &out.valid, &out.test}) std::sort(list->begin(), list->end());
    check_nonempty(out);
    return out;
}

std::vector<std::size_t> downsample_stratified(std::span<const std::size_t> indices,
                                               std::span<const std::size_t> labels, double fraction,
                                               std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw std::invalid_argument("train fraction must be in (0, 1]");
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t idx : indices) groups[labels[idx]].push_back(idx);
    std::vector<std::size_t> out;
    for (auto& [label, members] : groups) {
        Rng rng(combine_seed(seed, label));
        rng.shuffle(std::span<std::size_t>(members));
        const auto keep = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(members.size()))));
        out.insert(out.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(keep));
    }
    std::sort(out.begin(), out.end());
    return out;
}

// -- clone pairs --------------------------------------------------------------

InsufficientFragments::InsufficientFragments(const std::string& what)
    : std::invalid_argument("insufficient fragments: " + what) {}

std::vector<ClonePair> sample_training_pairs(std::span<const std::size_t> problem_of,
                                             std::size_t n_pos, std::size_t n_neg,
                                             std::uint64_t seed) {
    std::vector<ClonePair> positives, negatives;
    for (std::size_t a = 0; a < problem_of.size(); ++a) {
        for (std::size_t b = a + 1; b < problem_of.size(); ++b) {
            if (problem_of[a] == problem_of[b]) positives.push_back({a, b, +1});
            else negatives.push_back({a, b, -1});
        }
    }
    if (n_pos > 0 && positives.empty()) throw InsufficientFragments("no problem has two fragments");
    if (n_neg > 0 && negatives.empty()) throw InsufficientFragments("fewer than two problems");

    Rng rng(seed);
    std::vector<ClonePair> out = draw(positives, n_pos, rng);
    const auto neg = draw(negatives, n_neg, rng);
    out.insert(out.end(), neg.begin(), neg.end());
    return out;
}

std::vector<ClonePair> sample_eval_pairs(std::span<const std::size_t> problem_of, std::size_t n,
                                         std::uint64_t seed) {
    const std::size_t m = problem_of.size();
    if (m < 2) throw InsufficientFragments("need at least two fragments");
    const std::size_t population = m * (m - 1) / 2;
    Rng rng(seed);
    std::vector<ClonePair> out;
    for (std::size_t code : choose_distinct(population, n, rng)) {
        // unrank code -> (a, b) with a < b in row-major upper-triangle order
        std::size_t a = 0, row = m - 1;
        while (code >= row) {
            code -= row;
            ++a;
            --row;
        }
        const std::size_t b = a + 1 + code;
        out.push_back({a, b, problem_of[a] == problem_of[b] ? +1 : -1});
    }
    return out;
}

// -- fitting ------------------------------------------------------------------

std::vector<std::size_t> predict_classes(std::span<const LabeledExample> examples,
                                         model::ParamStore& params) {
    std::vector<std::size_t> out;
    out.reserve(examples.size());
    for (const auto& ex : examples) {
        ad::Tape tape;
        const ad::Var logits = classify_forward(tape, model::encode(tape, ex.ast, params), params);
        out.push_back(predict_class(logits.value()));
    }
    return out;
}

std::vector<eval::ScoredPair> score_pairs(std::span<const ast::AstNode> fragments,
                                          std::span<const ClonePair> pairs,
                                          model::ParamStore& params) {
    std::map<std::size_t, std::vector<double>> cache;
    const auto vec = [&](std::size_t i) -> const std::vector<double>& {
        auto it = cache.find(i);
        if (it == cache.end()) it = cache.emplace(i, model::embed(fragments[i], params)).first;
        return it->second;
    };
    std::vector<eval::ScoredPair> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back({cosine_or_zero(vec(p.first), vec(p.second)), p.label});
    return out;
}

FitResult fit_classifier(model::ParamStore params, std::span<const LabeledExample> train,
                         std::span<const LabeledExample> valid, const FitOptions& options) {
    const std::uint64_t seed = params.config().seed;
    return fit_loop(
        std::move(params), options,
        [&](model::ParamStore& p, AdamState& state, std::size_t epoch) {
            const ExampleLoss loss = [&](ad::Tape& tape, std::size_t i) {
                return classification_loss(tape, train[i].ast, train[i].label, p);
            };
            return train_epoch(train.size(), loss, p, state, options.batch_size, seed, epoch);
        },
        [&](model::ParamStore& p) {
            if (valid.empty()) return 0.0;
            std::vector<std::size_t> labels;
            for (const auto& ex : valid) labels.push_back(ex.label);
            return eval::accuracy(predict_classes(valid, p), labels);
        });
}

FitResult fit_clone(model::ParamStore params, std::span<const ast::AstNode> fragments,
                    std::span<const ClonePair> train, std::span<const ClonePair> valid,
                    const FitOptions& options) {
    const std::uint64_t seed = params.config().seed;
    return fit_loop(
        std::move(params), options,
        [&](model::ParamStore& p, AdamState& state, std::size_t epoch) {
            const ExampleLoss loss = [&](ad::Tape& tape, std::size_t i) {
                const ClonePair& pair = train[i];
                const ad::Var v1 = model::encode(tape, fragments[pair.first], p);
                const ad::Var v2 = model::encode(tape, fragments[pair.second], p);
                return clone_loss(tape, v1, v2, pair.label);
            };
            return train_epoch(train.size(), loss, p, state, options.batch_size, seed, epoch);
        },
        [&](model::ParamStore& p) {
            if (valid.empty()) return 0.0;
            return eval::binary_metrics(score_pairs(fragments, valid, p)).f1;
        });
}

}  // namespace mtn::train
