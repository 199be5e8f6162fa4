#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "toolalign/util.hpp"

namespace toolalign {

using ordered_json = nlohmann::ordered_json;

/// Raised when a schema, mapping, call, or task document is malformed or
/// violates a structural invariant. Messages carry the component path.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class ValueType { String, Number, Integer, Boolean, Array, Object };

inline std::string_view to_string(ValueType t) {
    switch (t) {
        case ValueType::String: return "string";
        case ValueType::Number: return "number";
        case ValueType::Integer: return "integer";
        case ValueType::Boolean: return "boolean";
        case ValueType::Array: return "array";
        case ValueType::Object: return "object";
    }
    return "string";
}

inline ValueType value_type_from_string(std::string_view s, const std::string& where) {
    if (s == "string") return ValueType::String;
    if (s == "number") return ValueType::Number;
    if (s == "integer") return ValueType::Integer;
    if (s == "boolean") return ValueType::Boolean;
    if (s == "array") return ValueType::Array;
    if (s == "object") return ValueType::Object;
    throw ParseError("unsupported parameter type \"" + std::string(s) + "\" at " + where);
}

/// A named parameter. Object-typed parameters carry their renamable
/// properties in `children`; everything else about the property node
/// (enum, items, default, ...) is preserved verbatim in `extras`.
struct ParamDef {
    std::string name;
    std::string description;
    ValueType value_type = ValueType::String;
    bool required = false;
    std::string path;  // dot-joined path within the tool, e.g. "options.max_results"
    std::vector<ParamDef> children;  // object properties, document order
    ordered_json extras = ordered_json::object();

    bool operator==(const ParamDef& other) const {
        return name == other.name && description == other.description &&
               value_type == other.value_type && required == other.required &&
               path == other.path && children == other.children && extras == other.extras;
    }
};

struct ToolDef {
    std::string name;
    std::string description;
    std::vector<ParamDef> parameters;  // document order
    ordered_json param_node_extras = ordered_json::object();  // e.g. additionalProperties
    ordered_json extras = ordered_json::object();             // tool-level extra keys

    bool operator==(const ToolDef& other) const {
        return name == other.name && description == other.description &&
               parameters == other.parameters &&
               param_node_extras == other.param_node_extras && extras == other.extras;
    }
};

struct ToolSchema {
    std::vector<ToolDef> tools;
    std::string source_digest;

    bool operator==(const ToolSchema& other) const { return tools == other.tools; }

    const ToolDef* find_tool(std::string_view name) const {
        for (const auto& t : tools)
            if (t.name == name) return &t;
        return nullptr;
    }
};

enum class ComponentKind { Tool, Parameter };

/// Addresses exactly one renamable component and carries the description
/// text fed to the name sampler.
struct ComponentRef {
    ComponentKind kind = ComponentKind::Tool;
    std::string tool_name;
    std::string param_path;  // empty for tools
    std::string description;

    /// Flat form used in fixture keys, CLI flags, and error messages:
    /// "<tool>" for tools, "<tool>/<param.path>" for parameters.
    std::string flat_path() const {
        return kind == ComponentKind::Tool ? tool_name : tool_name + "/" + param_path;
    }
};

namespace detail {

inline std::string join_path(const std::string& parent, const std::string& name) {
    return parent.empty() ? name : parent + "." + name;
}

inline ParamDef parse_param(const std::string& tool_name, const std::string& parent_path,
                            const std::string& pname, const ordered_json& node, bool required,
                            bool permissive) {
    std::string where = tool_name + "/" + join_path(parent_path, pname);
    if (!node.is_object()) throw ParseError("parameter node must be an object at " + where);

    ParamDef p;
    p.name = pname;
    p.path = join_path(parent_path, pname);
    p.required = required;
    if (node.contains("type")) {
        if (!node["type"].is_string())
            throw ParseError("parameter \"type\" must be a string at " + where);
        p.value_type = value_type_from_string(node["type"].get<std::string>(), where);
    }
    if (node.contains("description")) {
        if (!node["description"].is_string())
            throw ParseError("parameter \"description\" must be a string at " + where);
        p.description = node["description"].get<std::string>();
    }
    if (p.description.empty() && !permissive)
        throw ParseError("empty description on renamable component " + where);

    std::vector<std::string> req;
    if (p.value_type == ValueType::Object && node.contains("properties")) {
        const auto& props = node["properties"];
        if (!props.is_object()) throw ParseError("\"properties\" must be an object at " + where);
        if (node.contains("required")) {
            if (!node["required"].is_array())
                throw ParseError("\"required\" must be an array at " + where);
            for (const auto& r : node["required"]) req.push_back(r.get<std::string>());
        }
        for (auto it = props.begin(); it != props.end(); ++it) {
            bool child_required =
                std::find(req.begin(), req.end(), it.key()) != req.end();
            p.children.push_back(parse_param(tool_name, p.path, it.key(), it.value(),
                                             child_required, permissive));
        }
    }
    for (auto it = node.begin(); it != node.end(); ++it) {
        const std::string& k = it.key();
        if (k == "type" || k == "description") continue;
        if (p.value_type == ValueType::Object && (k == "properties" || k == "required")) continue;
        p.extras[k] = it.value();
    }
    return p;
}

inline ordered_json serialize_param(const ParamDef& p) {
    ordered_json node;
    node["type"] = std::string(to_string(p.value_type));
    node["description"] = p.description;
    if (p.value_type == ValueType::Object) {
        ordered_json props = ordered_json::object();
        for (const auto& c : p.children) props[c.name] = serialize_param(c);
        node["properties"] = props;
        ordered_json req = ordered_json::array();
        for (const auto& c : p.children)
            if (c.required) req.push_back(c.name);
        node["required"] = req;
    }
    for (auto it = p.extras.begin(); it != p.extras.end(); ++it) node[it.key()] = it.value();
    return node;
}

}  // namespace detail

/// Parses the function-calling convention document:
/// top-level `tools` array, each entry {name, description, parameters} with a
/// standard object-schema parameters node. With `permissive` set, components
/// with empty descriptions parse cleanly and are skipped by alignment
/// instead of rejected here.
inline ToolSchema parse_schema(std::string_view document, bool permissive = false) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(document);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed schema document: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("tools"))
        throw ParseError("schema document must be an object with a \"tools\" array");
    const auto& tools = doc["tools"];
    if (!tools.is_array()) throw ParseError("\"tools\" must be an array");

    ToolSchema schema;
    for (size_t i = 0; i < tools.size(); ++i) {
        const auto& tj = tools[i];
        std::string pos = "tools[" + std::to_string(i) + "]";
        if (!tj.is_object()) throw ParseError("tool entry must be an object at " + pos);
        ToolDef tool;
        if (!tj.contains("name") || !tj["name"].is_string())
            throw ParseError("tool entry missing string \"name\" at " + pos);
        tool.name = tj["name"].get<std::string>();
        if (!is_identifier(tool.name))
            throw ParseError("tool name \"" + tool.name + "\" is not a valid identifier at " + pos);
        for (size_t k = 0; k < i; ++k) {
            if (schema.tools[k].name == tool.name)
                throw ParseError("duplicate tool name \"" + tool.name + "\" at tools[" +
                                 std::to_string(k) + "] and " + pos);
        }
        if (tj.contains("description")) {
            if (!tj["description"].is_string())
                throw ParseError("tool \"description\" must be a string at " + pos);
            tool.description = tj["description"].get<std::string>();
        }
        if (tool.description.empty() && !permissive)
            throw ParseError("empty description on renamable component " + tool.name);

        if (tj.contains("parameters")) {
            const auto& pj = tj["parameters"];
            if (!pj.is_object())
                throw ParseError("\"parameters\" must be an object at " + pos);
            std::vector<std::string> req;
            if (pj.contains("required")) {
                if (!pj["required"].is_array())
                    throw ParseError("\"required\" must be an array at " + pos);
                for (const auto& r : pj["required"]) req.push_back(r.get<std::string>());
            }
            if (pj.contains("properties")) {
                const auto& props = pj["properties"];
                if (!props.is_object())
                    throw ParseError("\"properties\" must be an object at " + pos);
                for (auto it = props.begin(); it != props.end(); ++it) {
                    bool required =
                        std::find(req.begin(), req.end(), it.key()) != req.end();
                    tool.parameters.push_back(detail::parse_param(
                        tool.name, "", it.key(), it.value(), required, permissive));
                }
            }
            for (auto it = pj.begin(); it != pj.end(); ++it) {
                const std::string& k = it.key();
                if (k == "type" || k == "properties" || k == "required") continue;
                tool.param_node_extras[k] = it.value();
            }
        }
        for (auto it = tj.begin(); it != tj.end(); ++it) {
            const std::string& k = it.key();
            if (k == "name" || k == "description" || k == "parameters") continue;
            tool.extras[k] = it.value();
        }
        schema.tools.push_back(std::move(tool));
    }

    // digest of the canonical form, so equal structures share a digest
    schema.source_digest = "";
    return schema;
}

/// Canonical serialization: tool keys in (name, description, parameters)
/// order, property keys in document order, 2-space indentation, trailing
/// newline. Byte-identical across runs for equal schemas.
inline std::string serialize_schema(const ToolSchema& schema) {
    ordered_json doc;
    ordered_json tools = ordered_json::array();
    for (const auto& t : schema.tools) {
        ordered_json tj;
        tj["name"] = t.name;
        tj["description"] = t.description;
        ordered_json params;
        params["type"] = "object";
        ordered_json props = ordered_json::object();
        for (const auto& p : t.parameters) props[p.name] = detail::serialize_param(p);
        params["properties"] = props;
        ordered_json req = ordered_json::array();
        for (const auto& p : t.parameters)
            if (p.required) req.push_back(p.name);
        params["required"] = req;
        for (auto it = t.param_node_extras.begin(); it != t.param_node_extras.end(); ++it)
            params[it.key()] = it.value();
        tj["parameters"] = params;
        for (auto it = t.extras.begin(); it != t.extras.end(); ++it) tj[it.key()] = it.value();
        tools.push_back(tj);
    }
    doc["tools"] = tools;
    return doc.dump(2) + "\n";
}

inline std::string schema_digest(const ToolSchema& schema) {
    return fnv1a_digest(serialize_schema(schema));
}

/// Parses and stamps the content digest in one step.
inline ToolSchema load_schema(std::string_view document, bool permissive = false) {
    ToolSchema s = parse_schema(document, permissive);
    s.source_digest = schema_digest(s);
    return s;
}

namespace detail {

inline void collect_param_refs(const std::string& tool_name, const ParamDef& p,
                               std::vector<ComponentRef>& out) {
    out.push_back({ComponentKind::Parameter, tool_name, p.path, p.description});
    for (const auto& c : p.children) collect_param_refs(tool_name, c, out);
}

}  // namespace detail

/// Enumerates every component to be renamed: each tool followed by its
/// parameters in document order, nested object properties depth-first.
inline std::vector<ComponentRef> iterate_components(const ToolSchema& schema) {
    std::vector<ComponentRef> out;
    for (const auto& t : schema.tools) {
        out.push_back({ComponentKind::Tool, t.name, "", t.description});
        for (const auto& p : t.parameters) detail::collect_param_refs(t.name, p, out);
    }
    return out;
}

/// Resolves a ComponentRef back to the parameter it addresses, or nullptr.
inline const ParamDef* find_param(const ToolDef& tool, std::string_view path) {
    const std::vector<ParamDef>* level = &tool.parameters;
    const ParamDef* found = nullptr;
    size_t start = 0;
    while (start <= path.size()) {
        size_t dot = path.find('.', start);
        std::string_view seg =
            path.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
        found = nullptr;
        for (const auto& p : *level) {
            if (p.name == seg) {
                found = &p;
                break;
            }
        }
        if (!found) return nullptr;
        if (dot == std::string_view::npos) return found;
        level = &found->children;
        start = dot + 1;
    }
    return nullptr;
}

}  // namespace toolalign
