// mtn: command-line front end for parsing, corpus generation, training,
// evaluation, embedding export, parameter counting and ablation.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "mtn/corpus.hpp"
#include "mtn/frontend.hpp"
#include "mtn/model.hpp"
#include "mtn/pipeline.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Failure with a machine-readable code; printed as one JSON line.
struct CliError : std::runtime_error {
    CliError(std::string code, const std::string& message)
        : std::runtime_error(message), code(std::move(code)) {}
    std::string code;
};

mtn::model::ModuleSet parse_modules(const std::vector<std::string>& names) {
    mtn::model::ModuleSet set;
    for (const auto& name : names) set.set(static_cast<std::size_t>(mtn::model::module_from_name(name)));
    return set;
}

const std::map<std::string, mtn::model::Variant> kVariants = {
    {"mtn-a", mtn::model::Variant::MtnA},
    {"mtn-b", mtn::model::Variant::MtnB},
    {"treelstm", mtn::model::Variant::TreeLstm},
    {"seq-lstm", mtn::model::Variant::SeqLstm},
};

const std::map<std::string, mtn::corpus::Task> kTasks = {
    {"classify", mtn::corpus::Task::Classify},
    {"clone", mtn::corpus::Task::Clone},
};

void write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text << '\n';
    } else {
        mtn::corpus::write_atomic(path, text + "\n");
    }
}

// -- parse ----------------------------------------------------------------------

struct ParseArgs {
    std::string file;
    std::string emit;
};

void add_parse(CLI::App& app, ParseArgs& a) {
    auto* cmd = app.add_subcommand("parse", "Parse a C-subset file and print its AST");
    cmd->add_option("file", a.file, "Source file (.c) or interchange file (.ast.json)")->required();
    cmd->add_option("--emit-ast", a.emit, "Write the AST to this file instead of stdout");
    cmd->callback([&a] {
        const mtn::ast::AstNode tree = mtn::corpus::load_tree(a.file);
        write_output(mtn::ast::to_interchange(tree), a.emit);
    });
}

// -- gen-corpus -----------------------------------------------------------------

struct GenArgs {
    mtn::corpus::CorpusSpec spec;
    std::string out;
    bool classes_set = false;
    bool per_class_set = false;
};

void add_gen(CLI::App& app, GenArgs& a) {
    auto* cmd = app.add_subcommand("gen-corpus", "Generate a synthetic corpus with manifest.json");
    cmd->add_option("--task", a.spec.task, "classify or clone")
        ->required()
        ->transform(CLI::CheckedTransformer(kTasks));
    cmd->add_option("--out", a.out, "Output directory")->required();
    cmd->add_option("--seed", a.spec.seed, "Generation seed (default: MTN_SEED or 1)");
    auto* classes = cmd->add_option("--classes", a.spec.classes, "Classes or problems");
    auto* per_class = cmd->add_option("--per-class", a.spec.per_class, "Files per class");
    cmd->add_option("--rename", a.spec.knobs.rename, "Identifier rename probability");
    cmd->add_option("--loop-swap", a.spec.knobs.loop_swap, "Auxiliary loop style swap probability");
    cmd->add_option("--jitter", a.spec.knobs.jitter, "Constant jitter range");
    cmd->add_option("--shuffle", a.spec.knobs.shuffle, "Declaration shuffle probability");
    cmd->add_option("--dead-code", a.spec.knobs.dead_code, "Dead declaration probability");
    cmd->callback([&a, cmd, classes, per_class] {
        if (cmd->count("--seed") == 0) a.spec.seed = mtn::corpus::seed_from_env(1);
        // clone corpora default to 15 problems x 40 fragments
        if (a.spec.task == mtn::corpus::Task::Clone) {
            if (classes->count() == 0) a.spec.classes = 15;
            if (per_class->count() == 0) a.spec.per_class = 40;
        }
        const auto manifest = mtn::corpus::generate_corpus(a.spec, a.out);
        ordered_json summary = {{"out", a.out}, {"files", manifest.files.size()}, {"classes", manifest.class_names.size()}};
        std::cout << summary.dump() << '\n';
    });
}

// -- train ----------------------------------------------------------------------

struct TrainArgs {
    mtn::pipeline::TrainRequest request;
    std::string data;
    std::string out;
    std::string log;
    std::vector<std::string> disabled;
};

void add_train(CLI::App& app, TrainArgs& a) {
    auto* cmd = app.add_subcommand("train", "Train an encoder on a corpus");
    auto& r = a.request;
    cmd->add_option("task", r.task, "classify or clone")->required()->transform(CLI::CheckedTransformer(kTasks));
    cmd->add_option("--data", a.data, "Corpus directory")->required();
    cmd->add_option("--variant", r.variant, "mtn-a, mtn-b, treelstm or seq-lstm")
        ->transform(CLI::CheckedTransformer(kVariants));
    cmd->add_option("--hidden", r.hidden, "Hidden size d");
    cmd->add_option("--epochs", r.epochs, "Epoch budget");
    cmd->add_option("--batch", r.batch_size, "Examples per optimizer step");
    cmd->add_option("--lr", r.lr, "ADAM learning rate");
    cmd->add_option("--seed", r.seed, "Seed (default: MTN_SEED or 1)");
    cmd->add_flag("--with-ids", r.with_ids, "Keep identifier and literal values as tokens");
    cmd->add_option("--train-fraction", r.train_fraction, "Stratified fraction of the train split to keep")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--disable-modules", a.disabled, "Modules replaced by default units")->delimiter(',');
    cmd->add_option("--train-pos", r.train_pos, "Positive training pairs (clone)");
    cmd->add_option("--train-neg", r.train_neg, "Negative training pairs (clone)");
    cmd->add_option("--eval-pairs", r.eval_pairs, "Validation pairs (clone)");
    cmd->add_option("--log", a.log, "Epoch log file (default: <out>.log.jsonl)");
    cmd->add_option("--out", a.out, "Model file")->required();
    cmd->callback([&a, cmd] {
        auto& req = a.request;
        if (cmd->count("--seed") == 0) req.seed = mtn::corpus::seed_from_env(1);
        req.disabled = parse_modules(a.disabled);
        const auto data = mtn::corpus::load_corpus(a.data);
        const std::string log_path = a.log.empty() ? a.out + ".log.jsonl" : a.log;
        if (fs::path(log_path).has_parent_path()) fs::create_directories(fs::path(log_path).parent_path());
        std::ofstream log(log_path, std::ios::trunc);
        req.log = &log;
        const auto fit = mtn::pipeline::train(req, data);
        mtn::pipeline::save_checkpoint(a.out, fit);
        ordered_json summary = {{"model", a.out}, {"best_epoch", fit.best_epoch}, {"log", log_path}};
        std::cout << summary.dump() << '\n';
    });
}

// -- eval -----------------------------------------------------------------------

struct EvalArgs {
    mtn::corpus::Task task = mtn::corpus::Task::Classify;
    std::string model;
    std::string data;
    std::string split = "test";
    std::size_t pairs = 500;
};

void add_eval(CLI::App& app, EvalArgs& a) {
    auto* cmd = app.add_subcommand("eval", "Evaluate a model on a corpus split");
    cmd->add_option("task", a.task, "classify or clone")->required()->transform(CLI::CheckedTransformer(kTasks));
    cmd->add_option("--model", a.model, "Model file")->required();
    cmd->add_option("--data", a.data, "Corpus directory")->required();
    cmd->add_option("--split", a.split, "train, valid or test")->check(CLI::IsMember({"train", "valid", "test"}));
    cmd->add_option("--pairs", a.pairs, "Random pairs to score (clone)");
    cmd->callback([&a] {
        auto params = mtn::pipeline::load_model_file(a.model);
        const auto data = mtn::corpus::load_corpus(a.data);
        std::cout << mtn::pipeline::evaluate(a.task, params, data, a.split, a.pairs) << '\n';
    });
}

// -- embed ----------------------------------------------------------------------

struct EmbedArgs {
    std::string model;
    std::string input;
    std::string data;
    std::string split = "test";
};

void add_embed(CLI::App& app, EmbedArgs& a) {
    auto* cmd = app.add_subcommand("embed", "Export code vectors as JSON lines");
    cmd->add_option("--model", a.model, "Model file")->required();
    auto* input = cmd->add_option("--input", a.input, "One .c or .ast.json file");
    auto* data = cmd->add_option("--data", a.data, "Corpus directory (exports one split)");
    input->excludes(data);
    cmd->add_option("--split", a.split, "Split to export with --data");
    cmd->callback([&a] {
        auto params = mtn::pipeline::load_model_file(a.model);
        if (!a.input.empty()) {
            const auto tree = mtn::corpus::load_tree(a.input);
            std::cout << mtn::pipeline::embedding_json(a.input, -1, mtn::model::embed(tree, params)) << '\n';
            return;
        }
        if (a.data.empty()) throw CliError("UsageError", "embed needs --input or --data");
        const auto data = mtn::corpus::load_corpus(a.data);
        const auto v = mtn::pipeline::view(data, a.split);
        for (std::size_t i = 0; i < v.trees.size(); ++i) {
            std::cout << mtn::pipeline::embedding_json(v.paths[i], static_cast<long>(v.labels[i]),
                                                       mtn::model::embed(v.trees[i], params))
                      << '\n';
        }
    });
}

// -- param-count ----------------------------------------------------------------

struct CountArgs {
    mtn::model::Variant variant = mtn::model::Variant::MtnB;
    std::size_t hidden = 32;
    std::size_t classes = 0;
    std::vector<std::string> disabled;
};

void add_param_count(CLI::App& app, CountArgs& a) {
    auto* cmd = app.add_subcommand("param-count", "Print the parameter breakdown of a configuration");
    cmd->add_option("--variant", a.variant, "mtn-a, mtn-b, treelstm or seq-lstm")
        ->required()
        ->transform(CLI::CheckedTransformer(kVariants));
    cmd->add_option("--hidden", a.hidden, "Hidden size d")->required();
    cmd->add_option("--classes", a.classes, "Classification head size (0: none)");
    cmd->add_option("--disable-modules", a.disabled, "Modules replaced by default units")->delimiter(',');
    cmd->callback([&a] {
        mtn::model::ModelConfig c;
        c.variant = a.variant;
        c.hidden = a.hidden;
        c.num_classes = a.classes;
        c.disabled_modules = parse_modules(a.disabled);
        c.validate();
        const auto n = mtn::model::param_count(c);
        ordered_json doc = {{"variant", mtn::model::variant_name(c.variant)},
                            {"hidden", c.hidden},
                            {"containers", n.containers},
                            {"modules", n.modules},
                            {"sequence", n.sequence},
                            {"encoder", n.encoder()},
                            {"embeddings", n.embeddings},
                            {"head", n.head},
                            {"total", n.encoder()},
                            {"total_with_embeddings", n.total()}};
        std::cout << doc.dump() << '\n';
    });
}

// -- ablate ---------------------------------------------------------------------

struct AblateArgs {
    mtn::pipeline::TrainRequest request;
    std::string task = "clone";
    std::string data;
};

void add_ablate(CLI::App& app, AblateArgs& a) {
    auto* cmd = app.add_subcommand("ablate", "Train MTN-b and its five single-module ablations");
    auto& r = a.request;
    r.task = mtn::corpus::Task::Clone;
    cmd->add_option("task", a.task, "Only clone is supported")->required()->check(CLI::IsMember({"clone"}));
    cmd->add_option("--data", a.data, "Clone corpus directory")->required();
    cmd->add_option("--hidden", r.hidden, "Hidden size d");
    cmd->add_option("--seed", r.seed, "Seed (default: MTN_SEED or 1)");
    cmd->add_option("--epochs", r.epochs, "Epoch budget per run");
    cmd->add_option("--batch", r.batch_size, "Examples per optimizer step");
    cmd->add_option("--lr", r.lr, "ADAM learning rate");
    cmd->add_option("--train-pos", r.train_pos, "Positive training pairs");
    cmd->add_option("--train-neg", r.train_neg, "Negative training pairs");
    cmd->add_option("--eval-pairs", r.eval_pairs, "Validation and test pairs");
    cmd->callback([&a, cmd] {
        if (cmd->count("--seed") == 0) a.request.seed = mtn::corpus::seed_from_env(1);
        const auto data = mtn::corpus::load_corpus(a.data);
        const auto rows = mtn::pipeline::ablate(a.request, data);
        std::cout << mtn::pipeline::ablation_report(rows, a.request) << '\n';
    });
}

void report_error(std::string_view code, const std::string& message, const ordered_json& extra = {}) {
    ordered_json doc = {{"error", code}, {"message", message}};
    if (extra.is_object()) doc.update(extra);
    std::cerr << doc.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Modular tree network toolkit"};
    app.require_subcommand(1);

    ParseArgs parse_args;
    GenArgs gen_args;
    TrainArgs train_args;
    EvalArgs eval_args;
    EmbedArgs embed_args;
    CountArgs count_args;
    AblateArgs ablate_args;
    add_parse(app, parse_args);
    add_gen(app, gen_args);
    add_train(app, train_args);
    add_eval(app, eval_args);
    add_embed(app, embed_args);
    add_param_count(app, count_args);
    add_ablate(app, ablate_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("UsageError", e.what());
        return 2;
    } catch (const mtn::ast::LexError& e) {
        report_error(e.code(), e.what(), {{"line", e.line()}, {"column", e.column()}});
        return 1;
    } catch (const mtn::ast::SyntaxError& e) {
        report_error(e.code(), e.what(), {{"line", e.line()}, {"column", e.column()}});
        return 1;
    } catch (const mtn::ast::FrontendError& e) {
        report_error(e.code(), e.what());
        return 1;
    } catch (const CliError& e) {
        report_error(e.code, e.what());
        return 1;
    } catch (const std::exception& e) {
        report_error("Error", e.what());
        return 1;
    }
    return 0;
}
