#include <json.hpp>
#include <set>

#include "mtn/model.hpp"

namespace mtn::model {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kFormat = "mtn-model/1";

[[noreturn]] void bad_model(const std::string& what) {
    throw std::runtime_error("invalid model file: " + what);
}

ordered_json config_to_json(const ModelConfig& c) {
    ordered_json j = ordered_json::object();
    j["variant"] = variant_name(c.variant);
    j["hidden"] = c.hidden;
    j["identifier_mode"] = ast::identifier_mode_name(c.identifier_mode);
    ordered_json disabled = ordered_json::array();
    for (ModuleType m : kAllModuleTypes) {
        if (c.disabled_modules.test(static_cast<std::size_t>(m))) disabled.push_back(module_name(m));
    }
    j["disabled_modules"] = std::move(disabled);
    j["seed"] = c.seed;
    j["for_outer_tanh"] = c.for_outer_tanh;
    j["num_classes"] = c.num_classes;
    ordered_json vocab = ordered_json::array();
    for (std::size_t i = 1; i < c.vocab.size(); ++i) vocab.push_back(c.vocab.tokens()[i]);
    j["vocab"] = std::move(vocab);
    return j;
}

ModelConfig config_from_json(const ordered_json& j) {
    if (!j.is_object()) bad_model("config is not an object");
    ModelConfig c;
    try {
        c.variant = variant_from_name(j.at("variant").get<std::string>());
        c.hidden = j.at("hidden").get<std::size_t>();
        c.identifier_mode = ast::identifier_mode_from_name(j.at("identifier_mode").get<std::string>());
        for (const auto& name : j.at("disabled_modules"))
            c.disabled_modules.set(static_cast<std::size_t>(module_from_name(name.get<std::string>())));
        c.seed = j.at("seed").get<std::uint64_t>();
        c.for_outer_tanh = j.at("for_outer_tanh").get<bool>();
        c.num_classes = j.at("num_classes").get<std::size_t>();
        c.vocab = Vocabulary(j.at("vocab").get<std::vector<std::string>>());
    } catch (const nlohmann::json::exception& e) {
        bad_model(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        bad_model(std::string("config: ") + e.what());
    }
    return c;
}

}  // namespace

std::string save_model(const ParamStore& params) {
    ordered_json doc = ordered_json::object();
    doc["format"] = kFormat;
    doc["config"] = config_to_json(params.config());
    ordered_json tensors = ordered_json::object();
    for (const auto& name : params.names()) {
        const auto data = params.at(name).data();
        tensors[name] = std::vector<double>(data.begin(), data.end());
    }
    doc["params"] = std::move(tensors);
    return doc.dump();
}

ParamStore load_model(std::string_view text) {
    const ordered_json doc = ordered_json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) bad_model("not a JSON object");
    if (!doc.contains("format") || doc["format"] != kFormat) bad_model("unsupported format tag");
    if (!doc.contains("config") || !doc.contains("params") || !doc["params"].is_object())
        bad_model("missing config or params");

    ParamStore store(config_from_json(doc["config"]));
    const auto& tensors = doc["params"];
    std::set<std::string> expected(store.names().begin(), store.names().end());
    for (const auto& [name, value] : tensors.items()) {
        if (!expected.contains(name)) bad_model("unexpected parameter " + name);
    }
    for (const auto& name : store.names()) {
        const auto it = tensors.find(name);
        if (it == tensors.end() || !it->is_array()) bad_model("missing parameter " + name);
        auto data = store.at(name).data();
        if (it->size() != data.size())
            bad_model("parameter " + name + " has " + std::to_string(it->size()) +
                      " values, expected " + std::to_string(data.size()));
        for (std::size_t i = 0; i < data.size(); ++i) {
            const auto& v = (*it)[i];
            if (!v.is_number()) bad_model("non-numeric value in " + name);
            data[i] = v.get<double>();
        }
    }
    return store;
}

}  // namespace mtn::model
