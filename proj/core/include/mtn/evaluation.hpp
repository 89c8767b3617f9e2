#pragma once

// Metrics for classification and clone detection.
//
// Conventions for empty denominators: precision with no predicted
// positives is 0, recall with no actual positives is 0, F1 with p+r=0 is 0.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mtn::eval {

struct ScoredPair {
    double score;
    /// +1 for a true clone, -1 otherwise.
    int label;
};

class LengthMismatch : public std::invalid_argument {
public:
    LengthMismatch(std::size_t a, std::size_t b);
};

class OneClassOnly : public std::invalid_argument {
public:
    OneClassOnly();
};

double accuracy(std::span<const std::size_t> predictions, std::span<const std::size_t> labels);

struct BinaryMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;
};

/// Positive prediction iff score > threshold.
BinaryMetrics binary_metrics(std::span<const ScoredPair> pairs, double threshold = 0.0);

/// Mann-Whitney rank statistic with midranks for ties.
double roc_auc(std::span<const ScoredPair> pairs);

struct PrPoint {
    double recall;
    double precision;
    /// Pairs with score >= threshold are predicted positive.
    double threshold;
};

/// One point per distinct score, thresholds in descending order.
std::vector<PrPoint> pr_curve(std::span<const ScoredPair> pairs);

/// Highest precision among curve points with recall >= target; 0 if none.
double precision_at_recall(std::span<const PrPoint> curve, double target);

struct ScoreHistogram {
    double lo = -1.0;
    double hi = 1.0;
    std::vector<std::size_t> positive;
    std::vector<std::size_t> negative;
};

/// Fixed-width bins over [-1, 1]; a score of exactly 1 lands in the last bin.
ScoreHistogram score_histogram(std::span<const ScoredPair> pairs, std::size_t bins = 40);

/// Macro-averaged one-vs-rest precision/recall/F1 over `num_classes`.
BinaryMetrics macro_metrics(std::span<const std::size_t> predictions,
                            std::span<const std::size_t> labels, std::size_t num_classes);

// -- JSON reports -------------------------------------------------------------

struct ReportHeader {
    std::string task;
    std::string variant;
    std::uint64_t seed = 0;
};

/// {task, variant, seed, precision, recall, f1, roc_auc, p_at_r, pr_curve}
std::string clone_report(const ReportHeader& header, std::span<const ScoredPair> pairs);

/// {task, variant, seed, accuracy, precision, recall, f1} with macro P/R/F1.
std::string classification_report(const ReportHeader& header,
                                  std::span<const std::size_t> predictions,
                                  std::span<const std::size_t> labels, std::size_t num_classes);

/// {"bins":n,"range":[-1,1],"positive":[...],"negative":[...]}
std::string histogram_json(const ScoreHistogram& histogram);

}  // namespace mtn::eval
