#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>

#include "mtn/evaluation.hpp"
#include "mtn/random.hpp"

namespace {

using namespace mtn;
using namespace mtn::eval;

// O(n^2) pairwise statistic: wins + half ties over all (pos, neg) pairs.
double brute_auc(const std::vector<ScoredPair>& pairs) {
    double wins = 0.0, total = 0.0;
    for (const auto& p : pairs)
        for (const auto& n : pairs) {
            if (p.label != 1 || n.label != -1) continue;
            total += 1.0;
            if (p.score > n.score) wins += 1.0;
            else if (p.score == n.score) wins += 0.5;
        }
    return wins / total;
}

std::vector<ScoredPair> random_pairs(Rng& rng, std::size_t n, bool ties) {
    std::vector<ScoredPair> out;
    for (std::size_t i = 0; i < n; ++i) {
        double s = rng.uniform(-1, 1);
        if (ties) s = std::round(s * 10) / 10;
        out.push_back({s, rng.chance(0.3) ? 1 : -1});
    }
    out[0].label = 1;
    out[1].label = -1;
    return out;
}

TEST(Accuracy, Basics) {
    const std::vector<std::size_t> y{0, 1, 2, 1};
    EXPECT_EQ(accuracy(y, y), 1.0);
    const std::vector<std::size_t> wrong{1, 2, 0, 0};
    EXPECT_EQ(accuracy(wrong, y), 0.0);
    const std::vector<std::size_t> three{0, 1, 2, 2};
    EXPECT_EQ(accuracy(three, y), 0.75);
    EXPECT_THROW(accuracy(std::vector<std::size_t>{0}, y), LengthMismatch);
}

TEST(Binary, PerfectSeparation) {
    const std::vector<ScoredPair> p{{0.9, 1}, {0.9, 1}, {-0.9, -1}, {-0.9, -1}};
    const auto m = binary_metrics(p);
    EXPECT_EQ(m.precision, 1.0);
    EXPECT_EQ(m.recall, 1.0);
    EXPECT_EQ(m.f1, 1.0);
}

TEST(Binary, NoPositivePredictions) {
    const std::vector<ScoredPair> p{{0.0, 1}, {-0.5, 1}, {-0.2, -1}};
    const auto m = binary_metrics(p);
    EXPECT_EQ(m.precision, 0.0);
    EXPECT_EQ(m.recall, 0.0);
    EXPECT_EQ(m.f1, 0.0);
}

TEST(Binary, HandCountedFixture) {
    // 2 TP, 1 FP, 1 FN, 2 TN.
    const std::vector<ScoredPair> p{{0.8, 1}, {0.1, 1}, {0.4, -1}, {-0.3, 1}, {-0.6, -1}, {0.0, -1}};
    const auto m = binary_metrics(p);
    EXPECT_EQ(m.tp, 2u);
    EXPECT_EQ(m.fp, 1u);
    EXPECT_EQ(m.fn, 1u);
    EXPECT_EQ(m.tn, 2u);
    EXPECT_DOUBLE_EQ(m.precision, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(m.recall, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(m.f1, 2.0 / 3.0);
}

TEST(Binary, ThresholdBelowMinimumGivesFullRecall) {
    Rng rng(2);
    const auto pairs = random_pairs(rng, 50, false);
    EXPECT_EQ(binary_metrics(pairs, -2.0).recall, 1.0);
}

TEST(Macro, HandCountedFixture) {
    const std::vector<std::size_t> pred{0, 0, 1, 2}, truth{0, 1, 1, 2};
    const auto m = macro_metrics(pred, truth, 3);
    // Per class P: 1/2, 1, 1; R: 1, 1/2, 1.
    EXPECT_DOUBLE_EQ(m.precision, (0.5 + 1 + 1) / 3);
    EXPECT_DOUBLE_EQ(m.recall, (1 + 0.5 + 1) / 3);
    EXPECT_DOUBLE_EQ(m.f1, (2.0 / 3 + 2.0 / 3 + 1) / 3);
}

TEST(Auc, Anchors) {
    const std::vector<ScoredPair> sep{{0.9, 1}, {0.5, 1}, {-0.1, -1}};
    EXPECT_EQ(roc_auc(sep), 1.0);
    const std::vector<ScoredPair> inv{{-0.9, 1}, {0.5, -1}, {0.7, -1}};
    EXPECT_EQ(roc_auc(inv), 0.0);
    const std::vector<ScoredPair> flat{{0.2, 1}, {0.2, -1}, {0.2, -1}, {0.2, 1}};
    EXPECT_EQ(roc_auc(flat), 0.5);
    const std::vector<ScoredPair> one{{0.2, 1}};
    EXPECT_THROW(roc_auc(one), OneClassOnly);
}

TEST(Auc, MatchesBruteForceWithTies) {
    Rng rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const auto pairs = random_pairs(rng, 200, trial % 2 == 0);
        EXPECT_NEAR(roc_auc(pairs), brute_auc(pairs), 1e-12);
    }
}

TEST(Auc, InvariantUnderMonotoneTransformAndPermutation) {
    Rng rng(5);
    auto pairs = random_pairs(rng, 120, true);
    const double base = roc_auc(pairs);
    auto moved = pairs;
    for (auto& p : moved) p.score = std::exp(3 * p.score) - 7;
    EXPECT_NEAR(roc_auc(moved), base, 1e-15);
    rng.shuffle(std::span<ScoredPair>(pairs));
    EXPECT_EQ(roc_auc(pairs), base);
}

TEST(PrCurve, PerfectSeparation) {
    const std::vector<ScoredPair> p{{0.9, 1}, {0.8, 1}, {-0.5, -1}, {-0.7, -1}};
    const auto curve = pr_curve(p);
    EXPECT_EQ(precision_at_recall(curve, 0.95), 1.0);
}

TEST(PrCurve, SinglePositiveRankedLast) {
    const std::vector<ScoredPair> p{{0.9, -1}, {0.8, -1}, {0.5, -1}, {-0.5, 1}};
    const auto curve = pr_curve(p);
    EXPECT_DOUBLE_EQ(precision_at_recall(curve, 1.0), 1.0 / 4.0);
}

TEST(PrCurve, EndpointAndMonotonicity) {
    Rng rng(8);
    const auto pairs = random_pairs(rng, 300, true);
    const auto curve = pr_curve(pairs);
    ASSERT_FALSE(curve.empty());
    const double prevalence =
        static_cast<double>(std::count_if(pairs.begin(), pairs.end(), [](const ScoredPair& s) { return s.label == 1; })) /
        static_cast<double>(pairs.size());
    EXPECT_EQ(curve.back().recall, 1.0);
    EXPECT_DOUBLE_EQ(curve.back().precision, prevalence);
    for (std::size_t i = 1; i < curve.size(); ++i) EXPECT_LT(curve[i].threshold, curve[i - 1].threshold);
    double previous = 1.0;
    for (double r = 0.0; r <= 1.0; r += 0.05) {
        const double p = precision_at_recall(curve, r);
        EXPECT_LE(p, previous);
        previous = p;
    }
    EXPECT_THROW(pr_curve(std::vector<ScoredPair>{{0.1, -1}}), OneClassOnly);
}

TEST(Histogram, RightmostBinAndConservation) {
    const std::vector<ScoredPair> pos{{1.0, 1}, {1.0, 1}};
    const auto h = score_histogram(pos);
    EXPECT_EQ(h.positive.back(), 2u);
    EXPECT_EQ(std::accumulate(h.positive.begin(), h.positive.end(), std::size_t{0}), 2u);
    EXPECT_EQ(std::accumulate(h.negative.begin(), h.negative.end(), std::size_t{0}), 0u);

    Rng rng(3);
    auto pairs = random_pairs(rng, 400, false);
    const auto a = score_histogram(pairs);
    rng.shuffle(std::span<ScoredPair>(pairs));
    const auto b = score_histogram(pairs);
    EXPECT_EQ(a.positive, b.positive);
    EXPECT_EQ(a.negative, b.negative);
    EXPECT_EQ(std::accumulate(a.positive.begin(), a.positive.end(), std::size_t{0}) +
                  std::accumulate(a.negative.begin(), a.negative.end(), std::size_t{0}),
              400u);
}

TEST(Reports, CloneReportFields) {
    const std::vector<ScoredPair> p{{0.9, 1}, {0.2, -1}, {-0.4, -1}, {0.5, 1}};
    const auto doc = nlohmann::json::parse(clone_report({"clone", "mtn-b", 3}, p));
    EXPECT_EQ(doc["task"], "clone");
    EXPECT_EQ(doc["variant"], "mtn-b");
    EXPECT_EQ(doc["seed"], 3);
    EXPECT_DOUBLE_EQ(doc["f1"].get<double>(), 0.8);
    EXPECT_EQ(doc["roc_auc"].get<double>(), 1.0);
    for (const char* r : {"0.8", "0.9", "0.95", "0.99"}) EXPECT_TRUE(doc["p_at_r"].contains(r));
    EXPECT_TRUE(doc["pr_curve"].is_array());
}

TEST(Reports, OneClassCloneReportHasNullAuc) {
    const std::vector<ScoredPair> p{{0.9, -1}, {0.2, -1}};
    const auto doc = nlohmann::json::parse(clone_report({"clone", "mtn-b", 1}, p));
    EXPECT_TRUE(doc["roc_auc"].is_null());
}

TEST(Reports, ClassificationReport) {
    const std::vector<std::size_t> pred{0, 1, 1}, truth{0, 1, 0};
    const auto doc = nlohmann::json::parse(classification_report({"classify", "mtn-a", 2}, pred, truth, 2));
    EXPECT_DOUBLE_EQ(doc["accuracy"].get<double>(), 2.0 / 3.0);
    EXPECT_TRUE(doc.contains("f1"));
}

}  // namespace
