#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "toolalign/alignment.hpp"
#include "toolalign/peakedness.hpp"
#include "toolalign/schema.hpp"

namespace toolalign {

enum class Namespace { Original, Aligned };

inline std::string_view to_string(Namespace ns) {
    return ns == Namespace::Original ? "original" : "aligned";
}

/// A named invocation with named arguments. Values are opaque; translation
/// only ever touches the names.
struct ToolCall {
    std::string tool_name;
    ordered_json arguments = ordered_json::object();
    Namespace ns = Namespace::Aligned;

    bool operator==(const ToolCall& other) const {
        return tool_name == other.tool_name && arguments == other.arguments && ns == other.ns;
    }
};

struct TranslationError {
    enum class Kind { UnknownTool, UnknownParameter };
    Kind kind = Kind::UnknownTool;
    std::string offending_name;
    std::optional<std::pair<std::string, int>> nearest;  // name, edit distance in scope
    bool repaired = false;
    bool ambiguous = false;  // fuzzy repair refused: several names within the radius

    std::string kind_name() const {
        return kind == Kind::UnknownTool ? "unknown_tool" : "unknown_parameter";
    }
};

/// Result of translating one call. `call` is present when every name
/// resolved, possibly via fuzzy repair; `issues` then lists any repairs
/// that fired (repaired=true). On failure `issues` carries the diagnostics.
struct TranslationResult {
    std::optional<ToolCall> call;
    std::vector<TranslationError> issues;

    bool ok() const { return call.has_value(); }
};

namespace detail {

inline std::optional<std::pair<std::string, int>> nearest_name(
    const std::string& name, const std::vector<std::string>& scope) {
    std::optional<std::pair<std::string, int>> best;
    for (const auto& s : scope) {
        int d = edit_distance(name, s);
        if (!best || d < best->second || (d == best->second && s < best->first))
            best = {s, d};
    }
    return best;
}

// Fuzzy repair is conservative: it fires only when exactly one in-scope
// name lies within the radius.
inline std::optional<std::string> unique_within(const std::string& name,
                                                const std::vector<std::string>& scope,
                                                double radius, bool& ambiguous) {
    std::vector<std::string> hits;
    for (const auto& s : scope)
        if (edit_distance(name, s) <= radius) hits.push_back(s);
    ambiguous = hits.size() > 1;
    if (hits.size() == 1) return hits[0];
    return std::nullopt;
}

struct NameLookup {
    std::vector<std::string> scope;                // names in the call's namespace
    std::map<std::string, std::string> translate;  // call namespace -> target namespace
};

inline std::string resolve_name(const std::string& name, const NameLookup& lookup,
                                TranslationError::Kind kind, std::optional<double> fuzzy,
                                std::vector<TranslationError>& issues, bool& failed) {
    auto it = lookup.translate.find(name);
    if (it != lookup.translate.end()) return it->second;

    TranslationError err;
    err.kind = kind;
    err.offending_name = name;
    err.nearest = nearest_name(name, lookup.scope);
    if (fuzzy) {
        bool ambiguous = false;
        auto repaired = unique_within(name, lookup.scope, *fuzzy, ambiguous);
        if (repaired) {
            err.repaired = true;
            issues.push_back(err);
            return lookup.translate.at(*repaired);
        }
        err.ambiguous = ambiguous;
    }
    failed = true;
    issues.push_back(err);
    return name;
}

}  // namespace detail

/// Translates a call between namespaces using the mapping. Arguments keep
/// their values and order; only the tool name and top-level argument keys
/// are renamed, and the namespace tag flips. With `fuzzy_radius` set, an
/// unknown name is repaired to the unique in-scope name within that edit
/// distance; ambiguous repairs are refused.
inline TranslationResult translate_call(const ToolCall& call, const AlignmentMapping& mapping,
                                        std::optional<double> fuzzy_radius = std::nullopt) {
    TranslationResult result;
    bool failed = false;
    const bool from_aligned = call.ns == Namespace::Aligned;

    detail::NameLookup tool_lookup;
    tool_lookup.scope = mapping.tool_names(from_aligned);
    for (const auto& r : mapping.records) {
        if (r.component.kind != ComponentKind::Tool) continue;
        if (from_aligned)
            tool_lookup.translate[r.aligned_name] = r.original_name;
        else
            tool_lookup.translate[r.original_name] = r.aligned_name;
    }

    std::string target_tool = detail::resolve_name(call.tool_name, tool_lookup,
                                                   TranslationError::Kind::UnknownTool,
                                                   fuzzy_radius, result.issues, failed);
    if (failed) return result;

    // the parameter scope is keyed by the original tool name
    std::string original_tool = from_aligned ? target_tool : call.tool_name;
    detail::NameLookup param_lookup;
    {
        auto fwd = mapping.param_forward(original_tool);
        for (const auto& [orig, aligned] : fwd) {
            if (from_aligned) {
                param_lookup.scope.push_back(aligned);
                param_lookup.translate[aligned] = orig;
            } else {
                param_lookup.scope.push_back(orig);
                param_lookup.translate[orig] = aligned;
            }
        }
    }

    ToolCall translated;
    translated.tool_name = target_tool;
    translated.ns = from_aligned ? Namespace::Original : Namespace::Aligned;
    for (auto it = call.arguments.begin(); it != call.arguments.end(); ++it) {
        std::string key = detail::resolve_name(it.key(), param_lookup,
                                               TranslationError::Kind::UnknownParameter,
                                               fuzzy_radius, result.issues, failed);
        translated.arguments[key] = it.value();
    }
    if (failed) return result;
    result.call = std::move(translated);
    return result;
}

/// Canonical text for presenting the aligned schema to a model. Identical
/// to serialize_schema; named so agent frameworks consume one call.
inline std::string render_aligned_schema(const ToolSchema& aligned_schema) {
    return serialize_schema(aligned_schema);
}

struct MisalignmentCheck {
    bool ok = true;
    std::vector<std::string> offending;  // names absent from the schema
};

/// Mechanical schema-misalignment detector: a call is flagged when its tool
/// name or any argument key does not exist in the given schema. No judgment
/// of functional confusion; the check is purely structural.
inline MisalignmentCheck detect_misalignment(const ToolCall& call, const ToolSchema& schema) {
    MisalignmentCheck check;
    const ToolDef* tool = schema.find_tool(call.tool_name);
    if (!tool) {
        check.ok = false;
        check.offending.push_back(call.tool_name);
        return check;
    }
    for (auto it = call.arguments.begin(); it != call.arguments.end(); ++it) {
        bool found = false;
        for (const auto& p : tool->parameters) {
            if (p.name == it.key()) {
                found = true;
                break;
            }
        }
        if (!found) {
            check.ok = false;
            check.offending.push_back(it.key());
        }
    }
    return check;
}

// ---------------------------------------------------------------------------
// line protocol: one {"name": ..., "arguments": {...}} record per line

inline ToolCall parse_tool_call(std::string_view line, Namespace ns) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed tool call: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("name") || !doc["name"].is_string())
        throw ParseError("tool call must be an object with a string \"name\"");
    ToolCall call;
    call.tool_name = doc["name"].get<std::string>();
    call.ns = ns;
    if (doc.contains("arguments")) {
        if (!doc["arguments"].is_object())
            throw ParseError("tool call \"arguments\" must be an object");
        call.arguments = doc["arguments"];
    }
    return call;
}

inline std::string serialize_tool_call(const ToolCall& call) {
    ordered_json doc;
    doc["name"] = call.tool_name;
    doc["arguments"] = call.arguments;
    return doc.dump();
}

inline ordered_json translation_error_to_json(const TranslationError& err) {
    ordered_json j;
    j["kind"] = err.kind_name();
    j["name"] = err.offending_name;
    if (err.nearest) {
        ordered_json n;
        n["name"] = err.nearest->first;
        n["distance"] = err.nearest->second;
        j["nearest"] = n;
    }
    j["repaired"] = err.repaired;
    if (err.ambiguous) j["ambiguous"] = true;
    return j;
}

}  // namespace toolalign
