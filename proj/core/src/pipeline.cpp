#include "mtn/pipeline.hpp"

#include <json.hpp>

#include "mtn/evaluation.hpp"
#include "mtn/random.hpp"

namespace mtn::pipeline {

namespace {

using ordered_json = nlohmann::ordered_json;

std::uint64_t stream_seed(std::uint64_t seed, std::string_view purpose) {
    return combine_seed(seed, hash_name(purpose));
}

std::vector<train::ClonePair> split_pairs(const SplitView& v, std::size_t n, std::uint64_t seed,
                                          std::string_view split) {
    return train::sample_eval_pairs(v.labels, n, stream_seed(seed, std::string("pairs:") + std::string(split)));
}

SplitView training_view(const TrainRequest& r, const corpus::Dataset& data) {
    SplitView full = view(data, "train");
    if (r.train_fraction >= 1.0) return full;
    std::vector<std::size_t> all(full.trees.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    SplitView kept;
    for (std::size_t i :
         train::downsample_stratified(all, full.labels, r.train_fraction, stream_seed(r.seed, "fraction"))) {
        kept.trees.push_back(std::move(full.trees[i]));
        kept.labels.push_back(full.labels[i]);
        kept.paths.push_back(std::move(full.paths[i]));
    }
    return kept;
}

model::ModelConfig config_for(const TrainRequest& r, const corpus::Dataset& data, const SplitView& train_view) {
    model::ModelConfig c;
    c.variant = r.variant;
    c.hidden = r.hidden;
    c.seed = r.seed;
    c.disabled_modules = r.disabled;
    c.identifier_mode = r.with_ids ? ast::IdentifierMode::WithIds : ast::IdentifierMode::TypesOnly;
    std::vector<const ast::AstNode*> trees;
    for (const auto& t : train_view.trees) trees.push_back(&t);
    c.vocab = model::Vocabulary::build(trees, c.identifier_mode);
    if (r.task == corpus::Task::Classify) c.num_classes = data.manifest.class_names.size();
    c.validate();
    return c;
}

}  // namespace

SplitView view(const corpus::Dataset& data, std::string_view split) {
    SplitView v;
    for (std::size_t i : data.split(split)) {
        v.trees.push_back(data.trees[i]);
        v.labels.push_back(data.label(i));
        v.paths.push_back(data.manifest.files[i].path);
    }
    return v;
}

model::ModelConfig make_config(const TrainRequest& request, const corpus::Dataset& data) {
    return config_for(request, data, training_view(request, data));
}

train::FitResult train(const TrainRequest& r, const corpus::Dataset& data) {
    if (data.manifest.spec.task != r.task)
        throw std::invalid_argument("corpus task is " + std::string(corpus::task_name(data.manifest.spec.task)));
    const SplitView train_view = training_view(r, data);
    const SplitView valid_view = view(data, "valid");
    model::ParamStore params(config_for(r, data, train_view));

    train::FitOptions options;
    options.epochs = r.epochs;
    options.batch_size = r.batch_size;
    options.adam.lr = r.lr;
    options.log = r.log;

    if (r.task == corpus::Task::Classify) {
        std::vector<train::LabeledExample> train_set, valid_set;
        for (std::size_t i = 0; i < train_view.trees.size(); ++i)
            train_set.push_back({train_view.trees[i], train_view.labels[i]});
        for (std::size_t i = 0; i < valid_view.trees.size(); ++i)
            valid_set.push_back({valid_view.trees[i], valid_view.labels[i]});
        return train::fit_classifier(std::move(params), train_set, valid_set, options);
    }

    // Clone: train pairs index the training fragments, validation pairs
    // index the validation fragments appended after them.
    std::vector<ast::AstNode> fragments = train_view.trees;
    fragments.insert(fragments.end(), valid_view.trees.begin(), valid_view.trees.end());
    const auto train_pairs =
        train::sample_training_pairs(train_view.labels, r.train_pos, r.train_neg, stream_seed(r.seed, "train-pairs"));
    auto valid_pairs = split_pairs(valid_view, r.eval_pairs, r.seed, "valid");
    for (auto& p : valid_pairs) {
        p.first += train_view.trees.size();
        p.second += train_view.trees.size();
    }
    return train::fit_clone(std::move(params), fragments, train_pairs, valid_pairs, options);
}

void save_checkpoint(const std::filesystem::path& model_path, const train::FitResult& fit) {
    if (model_path.has_parent_path()) std::filesystem::create_directories(model_path.parent_path());
    corpus::write_atomic(model_path, model::save_model(fit.params));
    corpus::write_atomic(model_path.string() + ".adam.json", train::save_adam(fit.state, fit.params));
}

model::ParamStore load_model_file(const std::filesystem::path& path) {
    return model::load_model(corpus::read_file(path));
}

std::vector<eval::ScoredPair> clone_scores(model::ParamStore& params, const corpus::Dataset& data,
                                           std::string_view split, std::size_t eval_pairs) {
    const SplitView v = view(data, split);
    const auto pairs = split_pairs(v, eval_pairs, params.config().seed, split);
    return train::score_pairs(v.trees, pairs, params);
}

std::string evaluate(corpus::Task task, model::ParamStore& params, const corpus::Dataset& data,
                     std::string_view split, std::size_t eval_pairs) {
    const eval::ReportHeader header{std::string(corpus::task_name(task)),
                                    std::string(model::variant_name(params.config().variant)),
                                    params.config().seed};
    if (task == corpus::Task::Clone) return eval::clone_report(header, clone_scores(params, data, split, eval_pairs));

    if (params.config().num_classes == 0) throw std::invalid_argument("model has no classification head");
    const SplitView v = view(data, split);
    std::vector<train::LabeledExample> examples;
    for (std::size_t i = 0; i < v.trees.size(); ++i) examples.push_back({v.trees[i], v.labels[i]});
    const auto predictions = train::predict_classes(examples, params);
    return eval::classification_report(header, predictions, v.labels, params.config().num_classes);
}

std::string embedding_json(const std::string& id, long label, const std::vector<double>& vector) {
    ordered_json doc = ordered_json::object();
    doc["id"] = id;
    if (label >= 0) doc["label"] = label;
    doc["vector"] = vector;
    return doc.dump();
}

std::vector<AblationRow> ablate(const TrainRequest& base, const corpus::Dataset& data) {
    std::vector<std::pair<std::string, model::ModuleSet>> runs{{"MTN-b", base.disabled}};
    for (model::ModuleType m : kAblatedModules) {
        model::ModuleSet disabled = base.disabled;
        disabled.set(static_cast<std::size_t>(m));
        runs.emplace_back("-" + std::string(model::module_name(m)), disabled);
    }
    std::vector<AblationRow> rows;
    for (const auto& [name, disabled] : runs) {
        TrainRequest r = base;
        r.task = corpus::Task::Clone;
        r.variant = model::Variant::MtnB;
        r.disabled = disabled;
        train::FitResult fit = train(r, data);
        const auto scores = clone_scores(fit.params, data, "test", r.eval_pairs);
        const eval::BinaryMetrics m = eval::binary_metrics(scores);
        rows.push_back({name, disabled, model::param_count(fit.params.config()), m.precision, m.recall, m.f1});
    }
    return rows;
}

std::string ablation_report(const std::vector<AblationRow>& rows, const TrainRequest& base) {
    ordered_json doc = ordered_json::object();
    doc["task"] = "clone";
    doc["hidden"] = base.hidden;
    doc["seed"] = base.seed;
    doc["epochs"] = base.epochs;
    ordered_json out = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json row = ordered_json::object();
        row["name"] = r.name;
        ordered_json disabled = ordered_json::array();
        for (model::ModuleType m : model::kAllModuleTypes)
            if (r.disabled.test(static_cast<std::size_t>(m))) disabled.push_back(model::module_name(m));
        row["disabled"] = std::move(disabled);
        row["encoder_params"] = r.params.encoder();
        row["total_params"] = r.params.total();
        row["precision"] = r.precision;
        row["recall"] = r.recall;
        row["f1"] = r.f1;
        out.push_back(std::move(row));
    }
    doc["rows"] = std::move(out);
    return doc.dump();
}

}  // namespace mtn::pipeline
