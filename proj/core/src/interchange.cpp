#include <json.hpp>

#include "mtn/frontend.hpp"

namespace mtn::ast {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json node_to_json(const AstNode& node) {
    ordered_json out = ordered_json::object();
    out["kind"] = kind_name(node.kind);
    out["value"] = node.value ? ordered_json(*node.value) : ordered_json(nullptr);
    ordered_json children = ordered_json::array();
    for (const auto& child : node.children) children.push_back(node_to_json(child));
    out["children"] = std::move(children);
    return out;
}

[[noreturn]] void malformed(const std::string& path) {
    throw InterchangeError(InterchangeError::Reason::MalformedDocument, path);
}

AstNode node_from_json(const ordered_json& doc, const std::string& path) {
    if (!doc.is_object()) malformed(path);
    const auto kind_it = doc.find("kind");
    if (kind_it == doc.end() || !kind_it->is_string()) malformed(path + ".kind");
    const auto& name = kind_it->get_ref<const std::string&>();
    const auto kind = kind_from_name(name);
    if (!kind) throw InterchangeError(InterchangeError::Reason::UnknownKind, name);

    AstNode node(*kind);
    if (const auto it = doc.find("value"); it != doc.end() && !it->is_null()) {
        if (!it->is_string()) malformed(path + ".value");
        node.value = it->get<std::string>();
    }
    if (const auto it = doc.find("children"); it != doc.end()) {
        if (!it->is_array()) malformed(path + ".children");
        node.children.reserve(it->size());
        for (std::size_t i = 0; i < it->size(); ++i) {
            node.children.push_back(
                node_from_json((*it)[i], path + ".children[" + std::to_string(i) + "]"));
        }
    }
    return node;
}

}  // namespace

std::string to_interchange(const AstNode& node) {
    return node_to_json(node).dump();
}

AstNode from_interchange(std::string_view text) {
    ordered_json doc = ordered_json::parse(text, nullptr, false);
    if (doc.is_discarded()) malformed("$");
    return node_from_json(doc, "$");
}

}  // namespace mtn::ast
