#include "mtn/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>

namespace mtn::eval {

namespace {

using ordered_json = nlohmann::ordered_json;

double safe_ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) {
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

}  // namespace

LengthMismatch::LengthMismatch(std::size_t a, std::size_t b)
    : std::invalid_argument("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}

OneClassOnly::OneClassOnly() : std::invalid_argument("metric needs both positive and negative pairs") {}

double accuracy(std::span<const std::size_t> predictions, std::span<const std::size_t> labels) {
    if (predictions.size() != labels.size() || labels.empty())
        throw LengthMismatch(predictions.size(), labels.size());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) hits += predictions[i] == labels[i];
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

BinaryMetrics binary_metrics(std::span<const ScoredPair> pairs, double threshold) {
    BinaryMetrics m;
    for (const auto& p : pairs) {
        const bool predicted = p.score > threshold;
        const bool actual = p.label > 0;
        if (predicted && actual) ++m.tp;
        else if (predicted) ++m.fp;
        else if (actual) ++m.fn;
        else ++m.tn;
    }
    m.precision = safe_ratio(m.tp, m.tp + m.fp);
    m.recall = safe_ratio(m.tp, m.tp + m.fn);
    m.f1 = harmonic(m.precision, m.recall);
    return m;
}

double roc_auc(std::span<const ScoredPair> pairs) {
    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pairs[a].score < pairs[b].score; });

    double positive_rank_sum = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && pairs[order[j]].score == pairs[order[i]].score) ++j;
        // ranks i+1 .. j share the midrank
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (pairs[order[k]].label > 0) {
                positive_rank_sum += midrank;
                ++n_pos;
            }
        }
        i = j;
    }
    const std::size_t n_neg = pairs.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) throw OneClassOnly();
    const double np = static_cast<double>(n_pos);
    return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

std::vector<PrPoint> pr_curve(std::span<const ScoredPair> pairs) {
    std::vector<ScoredPair> sorted(pairs.begin(), pairs.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const ScoredPair& a, const ScoredPair& b) { return a.score > b.score; });
    std::size_t total_pos = 0;
    for (const auto& p : sorted) total_pos += p.label > 0;
    if (total_pos == 0) throw OneClassOnly();

    std::vector<PrPoint> curve;
    std::size_t tp = 0, seen = 0;
    for (std::size_t i = 0; i < sorted.size();) {
        const double threshold = sorted[i].score;
        while (i < sorted.size() && sorted[i].score == threshold) {
            tp += sorted[i].label > 0;
            ++seen;
            ++i;
        }
        curve.push_back({safe_ratio(tp, total_pos), safe_ratio(tp, seen), threshold});
    }
    return curve;
}

double precision_at_recall(std::span<const PrPoint> curve, double target) {
    double best = 0.0;
    for (const auto& p : curve) {
        if (p.recall >= target) best = std::max(best, p.precision);
    }
    return best;
}

ScoreHistogram score_histogram(std::span<const ScoredPair> pairs, std::size_t bins) {
    ScoreHistogram h;
    h.positive.assign(bins, 0);
    h.negative.assign(bins, 0);
    const double width = (h.hi - h.lo) / static_cast<double>(bins);
    for (const auto& p : pairs) {
        const double clamped = std::clamp(p.score, h.lo, h.hi);
        auto bin = static_cast<std::size_t>((clamped - h.lo) / width);
        bin = std::min(bin, bins - 1);
        (p.label > 0 ? h.positive : h.negative)[bin] += 1;
    }
    return h;
}

BinaryMetrics macro_metrics(std::span<const std::size_t> predictions,
                            std::span<const std::size_t> labels, std::size_t num_classes) {
    if (predictions.size() != labels.size()) throw LengthMismatch(predictions.size(), labels.size());
    BinaryMetrics out;
    if (num_classes == 0) return out;
    for (std::size_t c = 0; c < num_classes; ++c) {
        std::size_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const bool pred = predictions[i] == c;
            const bool actual = labels[i] == c;
            tp += pred && actual;
            fp += pred && !actual;
            fn += !pred && actual;
        }
        const double p = safe_ratio(tp, tp + fp);
        const double r = safe_ratio(tp, tp + fn);
        out.precision += p;
        out.recall += r;
        out.f1 += harmonic(p, r);
    }
    const double n = static_cast<double>(num_classes);
    out.precision /= n;
    out.recall /= n;
    out.f1 /= n;
    return out;
}

std::string clone_report(const ReportHeader& header, std::span<const ScoredPair> pairs) {
    const BinaryMetrics m = binary_metrics(pairs);
    ordered_json doc = ordered_json::object();
    doc["task"] = header.task;
    doc["variant"] = header.variant;
    doc["seed"] = header.seed;
    doc["pairs"] = pairs.size();
    doc["precision"] = m.precision;
    doc["recall"] = m.recall;
    doc["f1"] = m.f1;

    std::size_t positives = 0;
    for (const auto& p : pairs) positives += p.label > 0;
    const bool both = positives > 0 && positives < pairs.size();
    doc["roc_auc"] = both ? ordered_json(roc_auc(pairs)) : ordered_json(nullptr);
    ordered_json p_at_r = ordered_json::object();
    ordered_json curve_json = ordered_json::array();
    if (positives > 0) {
        const auto curve = pr_curve(pairs);
        for (const char* target : {"0.8", "0.9", "0.95", "0.99"})
            p_at_r[target] = precision_at_recall(curve, std::stod(target));
        for (const auto& p : curve) curve_json.push_back({p.recall, p.precision});
    }
    doc["p_at_r"] = std::move(p_at_r);
    doc["pr_curve"] = std::move(curve_json);
    return doc.dump();
}

std::string classification_report(const ReportHeader& header,
                                  std::span<const std::size_t> predictions,
                                  std::span<const std::size_t> labels, std::size_t num_classes) {
    const BinaryMetrics macro = macro_metrics(predictions, labels, num_classes);
    ordered_json doc = ordered_json::object();
    doc["task"] = header.task;
    doc["variant"] = header.variant;
    doc["seed"] = header.seed;
    doc["examples"] = labels.size();
    doc["accuracy"] = accuracy(predictions, labels);
    doc["precision"] = macro.precision;
    doc["recall"] = macro.recall;
    doc["f1"] = macro.f1;
    return doc.dump();
}

std::string histogram_json(const ScoreHistogram& histogram) {
    ordered_json doc = ordered_json::object();
    doc["bins"] = histogram.positive.size();
    doc["range"] = {histogram.lo, histogram.hi};
    doc["positive"] = histogram.positive;
    doc["negative"] = histogram.negative;
    return doc.dump();
}

}  // namespace mtn::eval
