#pragma once

// Heads, losses, ADAM with manual gradient accumulation, epoch
// loops, dataset splits and clone-pair sampling.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtn/ast.hpp"
#include "mtn/autodiff.hpp"
#include "mtn/evaluation.hpp"
#include "mtn/model.hpp"

namespace mtn::train {

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

struct LabeledExample {
    ast::AstNode ast;
    std::size_t label = 0;
};

/// Two fragments of a fragment list plus +1 (clone) or -1.
struct ClonePair {
    std::size_t first = 0;
    std::size_t second = 0;
    int label = -1;

    friend bool operator==(const ClonePair&, const ClonePair&) = default;
};

// ---------------------------------------------------------------------------
// Heads
// ---------------------------------------------------------------------------

class DegenerateVector : public std::domain_error {
public:
    DegenerateVector();
};

/// W v + b with the model's classification head; (M, 1) logits.
ad::Var classify_forward(ad::Tape& tape, ad::Var v, model::ParamStore& params);

/// argmax, ties to the lowest index.
std::size_t predict_class(std::span<const double> logits);

/// cross_entropy(classify_forward(encode(ast)), label) on `tape`.
ad::Var classification_loss(ad::Tape& tape, const ast::AstNode& ast, std::size_t label,
                            model::ParamStore& params);

/// Cosine similarity; throws DegenerateVector if either norm < 1e-12.
double clone_forward(std::span<const double> v1, std::span<const double> v2);

/// Decision rule: a pair is a clone iff the score is strictly positive.
constexpr bool predict_clone(double score) noexcept { return score > 0.0; }

/// (label - cos(v1, v2))^2; a collapsed vector scores 0.
ad::Var clone_loss(ad::Tape& tape, ad::Var v1, ad::Var v2, int label);

// ---------------------------------------------------------------------------
// Optimizer
// ---------------------------------------------------------------------------

struct AdamConfig {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// First and second moments per parameter, in ParamStore::names() order.
struct AdamState {
    AdamConfig config;
    std::uint64_t t = 0;
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;

    AdamState() = default;
    explicit AdamState(const model::ParamStore& params, AdamConfig config = {});
};

/// One bias-corrected ADAM update of a flat buffer at step `t` (t >= 1).
void adam_update(std::span<double> theta, std::span<const double> grad, std::span<double> m,
                 std::span<double> v, std::uint64_t t, const AdamConfig& config);

/// t += 1, update every parameter from its accumulated grad, then zero
/// the grads.
void adam_step(model::ParamStore& params, AdamState& state);

/// {"format":"mtn-adam/1","t":..,"config":{..},"m":{name:[..]},"v":{name:[..]}}
std::string save_adam(const AdamState& state, const model::ParamStore& params);
AdamState load_adam(std::string_view text, const model::ParamStore& params);

// ---------------------------------------------------------------------------
// Epoch loop
// ---------------------------------------------------------------------------

/// Builds the loss of example `index` on a fresh tape.
using ExampleLoss = std::function<ad::Var(ad::Tape&, std::size_t index)>;

/// Thrown when an example's forward or backward pass fails.
class ExampleError : public std::runtime_error {
public:
    ExampleError(std::size_t index, const std::string& what);
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Visit order of epoch `epoch`: a shuffle seeded by (seed, epoch).
std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch);

struct EpochResult {
    double mean_loss = 0.0;
    std::size_t steps = 0;
};

/// Per batch: accumulate every example's gradient, divide by the actual
/// batch size, take one ADAM step.
EpochResult train_epoch(std::size_t n, const ExampleLoss& loss, model::ParamStore& params,
                        AdamState& state, std::size_t batch_size, std::uint64_t seed,
                        std::size_t epoch);

// ---------------------------------------------------------------------------
// Splits and pair sampling
// ---------------------------------------------------------------------------

struct Ratios {
    std::size_t train = 8;
    std::size_t valid = 1;
    std::size_t test = 1;
};

struct Splits {
    std::vector<std::size_t> train;
    std::vector<std::size_t> valid;
    std::vector<std::size_t> test;
};

class EmptySplit : public std::invalid_argument {
public:
    explicit EmptySplit(const std::string& which);
};

/// Seeded shuffle of 0..n-1, then contiguous slices of floor size for
/// valid and test; the remainder goes to train.
Splits make_splits(std::size_t n, std::uint64_t seed, Ratios ratios = {});

/// make_splits per label group; each output list is sorted.
Splits make_stratified_splits(std::span<const std::size_t> labels, std::uint64_t seed,
                              Ratios ratios = {});

/// Keeps max(1, floor(p * count)) seeded-random items of every label
/// present in `indices`; result sorted. p in (0, 1].
std::vector<std::size_t> downsample_stratified(std::span<const std::size_t> indices,
                                               std::span<const std::size_t> labels, double fraction,
                                               std::uint64_t seed);

class InsufficientFragments : public std::invalid_argument {
public:
    explicit InsufficientFragments(const std::string& what);
};

/// Same-problem and cross-problem pairs over fragments with the given
/// problem ids, uniform without replacement. A population smaller than
/// the request is taken whole and topped up with draws with replacement.
std::vector<ClonePair> sample_training_pairs(std::span<const std::size_t> problem_of,
                                             std::size_t n_pos, std::size_t n_neg,
                                             std::uint64_t seed);

/// `n` distinct unordered pairs regardless of label (capped at the
/// population size).
std::vector<ClonePair> sample_eval_pairs(std::span<const std::size_t> problem_of, std::size_t n,
                                         std::uint64_t seed);

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

struct FitOptions {
    std::size_t epochs = 10;
    std::size_t batch_size = 32;
    AdamConfig adam;
    /// One JSON line per epoch when set.
    std::ostream* log = nullptr;
};

struct EpochLog {
    std::size_t epoch = 0;
    double mean_loss = 0.0;
    double val_metric = 0.0;
    double wall_seconds = 0.0;
};

/// Parameters and optimizer state from the epoch with the best
/// validation metric (earliest on ties).
struct FitResult {
    model::ParamStore params;
    AdamState state;
    std::size_t best_epoch = 0;
    std::vector<EpochLog> history;
};

std::vector<std::size_t> predict_classes(std::span<const LabeledExample> examples,
                                         model::ParamStore& params);

/// Scores each pair by the cosine of the two fragment embeddings; a
/// collapsed vector scores 0.
std::vector<eval::ScoredPair> score_pairs(std::span<const ast::AstNode> fragments,
                                          std::span<const ClonePair> pairs,
                                          model::ParamStore& params);

/// Validation metric: accuracy.
FitResult fit_classifier(model::ParamStore params, std::span<const LabeledExample> train,
                         std::span<const LabeledExample> valid, const FitOptions& options);

/// Validation metric: F1 at threshold 0.
FitResult fit_clone(model::ParamStore params, std::span<const ast::AstNode> fragments,
                    std::span<const ClonePair> train, std::span<const ClonePair> valid,
                    const FitOptions& options);

}  // namespace mtn::train
