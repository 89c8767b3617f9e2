#pragma once

// Dataset-level train / eval / embed / ablate workflows used by the
// command-line tool.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mtn/corpus.hpp"
#include "mtn/model.hpp"
#include "mtn/training.hpp"

namespace mtn::pipeline {

struct TrainRequest {
    corpus::Task task = corpus::Task::Classify;
    model::Variant variant = model::Variant::MtnB;
    std::size_t hidden = 32;
    std::size_t epochs = 10;
    std::size_t batch_size = 32;
    double lr = 0.001;
    std::uint64_t seed = 1;
    bool with_ids = false;
    double train_fraction = 1.0;
    model::ModuleSet disabled;
    // clone pair budgets
    std::size_t train_pos = 2000;
    std::size_t train_neg = 2000;
    std::size_t eval_pairs = 500;
    /// Epoch log lines go here when set.
    std::ostream* log = nullptr;
};

/// Fresh model configuration for `request` with a vocabulary built from
/// the training split.
model::ModelConfig make_config(const TrainRequest& request, const corpus::Dataset& data);

/// Fits on the train split and selects the best epoch on the valid split.
train::FitResult train(const TrainRequest& request, const corpus::Dataset& data);

/// Writes the model file and `<model>.adam.json` next to it.
void save_checkpoint(const std::filesystem::path& model_path, const train::FitResult& fit);
model::ParamStore load_model_file(const std::filesystem::path& path);

/// The fragments of one split and their class ids.
struct SplitView {
    std::vector<ast::AstNode> trees;
    std::vector<std::size_t> labels;
    std::vector<std::string> paths;
};

SplitView view(const corpus::Dataset& data, std::string_view split);

/// Metrics report JSON for `split`. Clone evaluation scores `eval_pairs`
/// random pairs of that split drawn with the model's seed.
std::string evaluate(corpus::Task task, model::ParamStore& params, const corpus::Dataset& data,
                     std::string_view split, std::size_t eval_pairs = 500);

/// Scored pairs for a clone split, as used by evaluate().
std::vector<eval::ScoredPair> clone_scores(model::ParamStore& params, const corpus::Dataset& data,
                                           std::string_view split, std::size_t eval_pairs);

/// {"id":..,"label":..,"vector":[..]} for one tree; label omitted if < 0.
std::string embedding_json(const std::string& id, long label, const std::vector<double>& vector);

struct AblationRow {
    std::string name;
    model::ModuleSet disabled;
    model::ParamCount params;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Modules removed one at a time by the ablation study.
inline constexpr std::array<model::ModuleType, 5> kAblatedModules = {
    model::ModuleType::FuncDef, model::ModuleType::For, model::ModuleType::If,
    model::ModuleType::While, model::ModuleType::Seq,
};

/// Full MTN-b followed by one run per ablated module, each trained on the
/// clone task with `base` settings and evaluated on the test split.
std::vector<AblationRow> ablate(const TrainRequest& base, const corpus::Dataset& data);
std::string ablation_report(const std::vector<AblationRow>& rows, const TrainRequest& base);

}  // namespace mtn::pipeline
