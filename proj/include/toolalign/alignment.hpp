#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "toolalign/peakedness.hpp"
#include "toolalign/sampling.hpp"
#include "toolalign/schema.hpp"
#include "toolalign/util.hpp"

namespace toolalign {

/// Raised when collision resolution cannot produce a valid schema, e.g. a
/// component's original name was claimed by an earlier rename.
class CollisionError : public std::runtime_error {
public:
    explicit CollisionError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class CollisionResolution { None, NextBest, KeptOriginal };

inline std::string_view to_string(CollisionResolution r) {
    switch (r) {
        case CollisionResolution::None: return "none";
        case CollisionResolution::NextBest: return "next_best";
        case CollisionResolution::KeptOriginal: return "kept_original";
    }
    return "none";
}

inline CollisionResolution collision_resolution_from_string(std::string_view s) {
    if (s == "none") return CollisionResolution::None;
    if (s == "next_best") return CollisionResolution::NextBest;
    if (s == "kept_original") return CollisionResolution::KeptOriginal;
    throw ParseError("unknown collision_resolution \"" + std::string(s) + "\"");
}

/// The full audit record for one renamed component.
struct AlignmentRecord {
    ComponentRef component;
    std::string original_name;
    std::string aligned_name;
    PeakednessReport report;
    std::vector<std::string> candidates;  // sanitized, request order
    std::string reference;
    std::string candidate_set_digest;
    CollisionResolution collision_resolution = CollisionResolution::None;
    bool skipped = false;  // empty description: kept under the original name
};

struct MappingMetadata {
    std::string model_id;
    int num_candidates = 0;
    double temperature = 0.0;
    double alpha = 0.0;
    uint64_t seed = 0;
    std::string source_digest;
    std::string timestamp;  // empty for fixture runs so artifacts stay byte-stable
};

/// Bidirectional original<->aligned dictionary plus run metadata. Tools live
/// in the schema-wide scope; parameters in per-tool scopes keyed by the
/// original tool name (sibling groups within a tool for nested paths).
struct AlignmentMapping {
    std::vector<AlignmentRecord> records;
    MappingMetadata metadata;

    const AlignmentRecord* find(const ComponentRef& ref) const {
        for (const auto& r : records) {
            if (r.component.kind == ref.kind && r.component.tool_name == ref.tool_name &&
                r.component.param_path == ref.param_path)
                return &r;
        }
        return nullptr;
    }

    std::optional<std::string> tool_forward(std::string_view original) const {
        for (const auto& r : records)
            if (r.component.kind == ComponentKind::Tool && r.original_name == original)
                return r.aligned_name;
        return std::nullopt;
    }

    std::optional<std::string> tool_backward(std::string_view aligned) const {
        for (const auto& r : records)
            if (r.component.kind == ComponentKind::Tool && r.aligned_name == aligned)
                return r.original_name;
        return std::nullopt;
    }

    /// Top-level parameter maps for one tool (original tool name).
    std::map<std::string, std::string> param_forward(std::string_view original_tool) const {
        std::map<std::string, std::string> out;
        for (const auto& r : records) {
            if (r.component.kind == ComponentKind::Parameter &&
                r.component.tool_name == original_tool &&
                r.component.param_path.find('.') == std::string::npos)
                out[r.original_name] = r.aligned_name;
        }
        return out;
    }

    std::map<std::string, std::string> param_backward(std::string_view original_tool) const {
        std::map<std::string, std::string> out;
        for (const auto& r : records) {
            if (r.component.kind == ComponentKind::Parameter &&
                r.component.tool_name == original_tool &&
                r.component.param_path.find('.') == std::string::npos)
                out[r.aligned_name] = r.original_name;
        }
        return out;
    }

    std::vector<std::string> tool_names(bool aligned) const {
        std::vector<std::string> out;
        for (const auto& r : records)
            if (r.component.kind == ComponentKind::Tool)
                out.push_back(aligned ? r.aligned_name : r.original_name);
        return out;
    }

    /// Checks the bijection invariants. Returns a description of the first
    /// violation, or empty when the mapping is sound.
    std::string validate() const {
        std::set<std::string> tool_orig, tool_aligned;
        for (const auto& r : records) {
            if (!is_identifier(r.aligned_name))
                return "aligned name \"" + r.aligned_name + "\" for " +
                       r.component.flat_path() + " is not a valid identifier";
            if (r.collision_resolution == CollisionResolution::None &&
                !r.skipped && r.aligned_name != r.report.selected)
                return "record " + r.component.flat_path() +
                       " marked collision_resolution=none but aligned_name differs from the "
                       "selected candidate";
            if (r.component.kind == ComponentKind::Tool) {
                if (!tool_orig.insert(r.original_name).second)
                    return "duplicate original tool name \"" + r.original_name + "\"";
                if (!tool_aligned.insert(r.aligned_name).second)
                    return "two tools share the aligned name \"" + r.aligned_name + "\"";
            }
        }
        // parameter scopes: sibling group = (tool, parent path)
        std::map<std::string, std::set<std::string>> scope_orig, scope_aligned;
        for (const auto& r : records) {
            if (r.component.kind != ComponentKind::Parameter) continue;
            const std::string& path = r.component.param_path;
            size_t dot = path.rfind('.');
            std::string parent = dot == std::string::npos ? "" : path.substr(0, dot);
            std::string scope = r.component.tool_name + "/" + parent;
            if (!scope_orig[scope].insert(r.original_name).second)
                return "duplicate original parameter name \"" + r.original_name +
                       "\" in scope " + scope;
            if (!scope_aligned[scope].insert(r.aligned_name).second)
                return "two parameters in scope " + scope + " share the aligned name \"" +
                       r.aligned_name + "\"";
        }
        return "";
    }
};

inline std::string leaf_name(const std::string& param_path) {
    size_t dot = param_path.rfind('.');
    return dot == std::string::npos ? param_path : param_path.substr(dot + 1);
}

/// Tracks claimed names per scope and applies the collision policy:
/// first claimant in document order keeps its selection; later claimants
/// take their best non-colliding candidate; exhausted claimants keep their
/// original name; an original name already claimed by someone else's rename
/// is a hard error.
class CollisionResolver {
public:
    AlignmentRecord resolve(AlignmentRecord record) {
        Scope& claimed = scope_for(record.component);
        if (record.skipped) {
            claim_or_throw(claimed, record);
            return record;
        }
        std::vector<std::string> order =
            preference_order(record.candidates, record.report.scores, record.reference);
        // order[0] is the selected name itself
        for (const auto& name : order) {
            if (claimed.count(name)) continue;
            record.aligned_name = name;
            record.collision_resolution = name == record.report.selected
                                              ? CollisionResolution::None
                                              : CollisionResolution::NextBest;
            claimed.emplace(name, record.component.flat_path());
            return record;
        }
        // every candidate is taken: fall back to the original name
        record.aligned_name = record.original_name;
        record.collision_resolution = CollisionResolution::KeptOriginal;
        claim_or_throw(claimed, record);
        return record;
    }

private:
    using Scope = std::map<std::string, std::string>;  // claimed name -> claimant

    Scope& scope_for(const ComponentRef& ref) {
        if (ref.kind == ComponentKind::Tool) return tool_scope_;
        size_t dot = ref.param_path.rfind('.');
        std::string parent = dot == std::string::npos ? "" : ref.param_path.substr(0, dot);
        return param_scopes_[ref.tool_name + "/" + parent];
    }

    void claim_or_throw(Scope& claimed, const AlignmentRecord& record) {
        auto it = claimed.find(record.aligned_name);
        if (it != claimed.end()) {
            throw CollisionError("collision: component " + record.component.flat_path() +
                                 " must keep its original name \"" + record.aligned_name +
                                 "\" but that name is already claimed by " + it->second);
        }
        claimed.emplace(record.aligned_name, record.component.flat_path());
    }

    Scope tool_scope_;
    std::map<std::string, Scope> param_scopes_;
};

/// Applies the collision policy to records in document order.
inline std::vector<AlignmentRecord> resolve_collisions(std::vector<AlignmentRecord> records) {
    CollisionResolver resolver;
    for (auto& r : records) r = resolver.resolve(std::move(r));
    return records;
}

/// Runs the per-component pipeline: prompt, N+1 samples, threshold, scores,
/// selection. Collision handling happens at schema level.
inline AlignmentRecord align_component(const ComponentRef& component, const SamplerConfig& config,
                                       Sampler& sampler,
                                       std::optional<ToolContext> tool_context = std::nullopt) {
    PromptSpec prompt = build_prompt(component, std::move(tool_context));
    CandidateSet set = sample_candidates(prompt, config, sampler, component.flat_path());
    PeakednessReport report = analyze_candidates(set.candidates, set.reference, config.alpha);

    AlignmentRecord record;
    record.component = component;
    record.original_name = component.kind == ComponentKind::Tool
                               ? component.tool_name
                               : leaf_name(component.param_path);
    record.aligned_name = report.selected;
    record.report = std::move(report);
    record.candidates = std::move(set.candidates);
    record.reference = set.reference;
    record.candidate_set_digest = set.digest();
    return record;
}

namespace detail {

// Renames leaves by their original paths; paths are rebuilt afterwards.
inline void rename_params(std::vector<ParamDef>& params, const std::string& tool_name,
                          const std::map<std::string, std::string>& aligned_by_path) {
    for (auto& p : params) {
        rename_params(p.children, tool_name, aligned_by_path);
        auto it = aligned_by_path.find(tool_name + "/" + p.path);
        if (it != aligned_by_path.end()) p.name = it->second;
    }
}

inline void fix_paths(std::vector<ParamDef>& params, const std::string& parent_path) {
    for (auto& p : params) {
        p.path = join_path(parent_path, p.name);
        fix_paths(p.children, p.path);
    }
}

}  // namespace detail

struct AlignmentResult {
    ToolSchema aligned_schema;
    AlignmentMapping mapping;
};

/// Stages 1-3 across the whole schema: components are processed in
/// iterate_components order (each tool before its parameters, so parameter
/// prompts condition on the aligned tool name), selections are made
/// collision-free in document order, and the renamed schema is rebuilt with
/// descriptions, types, and required flags untouched.
inline AlignmentResult align_schema(const ToolSchema& schema, const SamplerConfig& config,
                                    Sampler& sampler) {
    config.validate();

    AlignmentMapping mapping;
    mapping.metadata.model_id = sampler.id();
    mapping.metadata.num_candidates = config.num_candidates;
    mapping.metadata.temperature = config.temperature;
    mapping.metadata.alpha = config.alpha;
    mapping.metadata.seed = config.rng_seed;
    mapping.metadata.source_digest =
        schema.source_digest.empty() ? schema_digest(schema) : schema.source_digest;

    CollisionResolver resolver;
    std::map<std::string, std::string> aligned_tool_names;  // original -> aligned

    std::vector<ComponentRef> components = iterate_components(schema);
    for (const auto& component : components) {
        AlignmentRecord record;
        if (component.description.empty()) {
            // skipped: kept under the original name
            record.component = component;
            record.original_name = component.kind == ComponentKind::Tool
                                       ? component.tool_name
                                       : leaf_name(component.param_path);
            record.aligned_name = record.original_name;
            record.collision_resolution = CollisionResolution::KeptOriginal;
            record.skipped = true;
            record = resolver.resolve(std::move(record));
        } else {
            std::optional<ToolContext> ctx;
            if (component.kind == ComponentKind::Parameter) {
                const ToolDef* tool = schema.find_tool(component.tool_name);
                ctx = ToolContext{aligned_tool_names.at(component.tool_name), tool->description};
            }
            record = align_component(component, config, sampler, std::move(ctx));
            record = resolver.resolve(std::move(record));
        }
        if (component.kind == ComponentKind::Tool)
            aligned_tool_names[component.tool_name] = record.aligned_name;
        mapping.records.push_back(std::move(record));
    }

    // rebuild the schema under the new names
    ToolSchema aligned = schema;
    std::map<std::string, std::string> aligned_by_path;  // "tool/p.path" -> aligned leaf
    for (const auto& r : mapping.records)
        if (r.component.kind == ComponentKind::Parameter)
            aligned_by_path[r.component.tool_name + "/" + r.component.param_path] =
                r.aligned_name;
    for (auto& tool : aligned.tools) {
        std::string original_tool = tool.name;
        detail::rename_params(tool.parameters, original_tool, aligned_by_path);
        detail::fix_paths(tool.parameters, "");
        tool.name = aligned_tool_names.at(original_tool);
    }
    aligned.source_digest = schema_digest(aligned);

    std::string violation = mapping.validate();
    if (!violation.empty()) throw CollisionError("alignment produced an invalid mapping: " + violation);
    return {std::move(aligned), std::move(mapping)};
}

// ---------------------------------------------------------------------------
// mapping artifact serialization

inline ordered_json component_to_json(const ComponentRef& ref) {
    ordered_json j;
    j["kind"] = ref.kind == ComponentKind::Tool ? "tool" : "parameter";
    j["tool"] = ref.tool_name;
    j["path"] = ref.param_path;
    return j;
}

inline ComponentRef component_from_json(const ordered_json& j) {
    ComponentRef ref;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "tool") ref.kind = ComponentKind::Tool;
    else if (kind == "parameter") ref.kind = ComponentKind::Parameter;
    else throw ParseError("unknown component kind \"" + kind + "\"");
    ref.tool_name = j.at("tool").get<std::string>();
    ref.param_path = j.at("path").get<std::string>();
    return ref;
}

/// Canonical mapping serialization; see docs/formats.md. Deterministic:
/// equal mappings serialize to identical bytes.
inline std::string serialize_mapping(const AlignmentMapping& mapping) {
    ordered_json doc;
    doc["format"] = "toolalign-mapping/1";
    ordered_json meta;
    meta["model_id"] = mapping.metadata.model_id;
    meta["num_candidates"] = mapping.metadata.num_candidates;
    meta["temperature"] = mapping.metadata.temperature;
    meta["alpha"] = mapping.metadata.alpha;
    meta["seed"] = mapping.metadata.seed;
    meta["source_digest"] = mapping.metadata.source_digest;
    meta["timestamp"] = mapping.metadata.timestamp;
    doc["metadata"] = meta;
    ordered_json records = ordered_json::array();
    for (const auto& r : mapping.records) {
        ordered_json rec;
        rec["component"] = component_to_json(r.component);
        rec["original"] = r.original_name;
        rec["aligned"] = r.aligned_name;
        rec["collision_resolution"] = std::string(to_string(r.collision_resolution));
        rec["skipped"] = r.skipped;
        rec["candidate_set_digest"] = r.candidate_set_digest;
        if (!r.skipped) {
            ordered_json pk;
            pk["tau"] = r.report.threshold;
            pk["max_length"] = r.report.max_length;
            pk["candidates"] = r.candidates;
            pk["scores"] = r.report.scores;
            ordered_json argmax = ordered_json::array();
            for (size_t i : r.report.argmax_set) argmax.push_back(i);
            pk["argmax"] = argmax;
            pk["reference"] = r.reference;
            pk["selected"] = r.report.selected;
            pk["selected_index"] = r.report.selected_index;
            pk["selected_score"] = r.report.selected_score;
            pk["tie_broken_by_reference"] = r.report.tie_broken_by_reference;
            pk["tie_broken_lexicographically"] = r.report.tie_broken_lexicographically;
            rec["peakedness"] = pk;
        }
        records.push_back(rec);
    }
    doc["records"] = records;
    return doc.dump(2) + "\n";
}

inline AlignmentMapping parse_mapping(std::string_view text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed mapping document: ") + e.what());
    }
    if (!doc.is_object() || doc.value("format", "") != "toolalign-mapping/1")
        throw ParseError("not a toolalign-mapping/1 document");
    AlignmentMapping mapping;
    const auto& meta = doc.at("metadata");
    mapping.metadata.model_id = meta.value("model_id", "");
    mapping.metadata.num_candidates = meta.value("num_candidates", 0);
    mapping.metadata.temperature = meta.value("temperature", 0.0);
    mapping.metadata.alpha = meta.value("alpha", 0.0);
    mapping.metadata.seed = meta.value("seed", 0ull);
    mapping.metadata.source_digest = meta.value("source_digest", "");
    mapping.metadata.timestamp = meta.value("timestamp", "");
    for (const auto& rec : doc.at("records")) {
        AlignmentRecord r;
        r.component = component_from_json(rec.at("component"));
        r.original_name = rec.at("original").get<std::string>();
        r.aligned_name = rec.at("aligned").get<std::string>();
        r.collision_resolution =
            collision_resolution_from_string(rec.at("collision_resolution").get<std::string>());
        r.skipped = rec.value("skipped", false);
        r.candidate_set_digest = rec.value("candidate_set_digest", "");
        if (rec.contains("peakedness")) {
            const auto& pk = rec["peakedness"];
            r.report.threshold = pk.value("tau", 0.0);
            r.report.max_length = pk.value("max_length", 0);
            r.candidates = pk.value("candidates", std::vector<std::string>{});
            r.report.scores = pk.value("scores", std::vector<int>{});
            for (const auto& i : pk.value("argmax", ordered_json::array()))
                r.report.argmax_set.push_back(i.get<size_t>());
            r.reference = pk.value("reference", "");
            r.report.selected = pk.value("selected", "");
            r.report.selected_index = pk.value("selected_index", size_t{0});
            r.report.selected_score = pk.value("selected_score", 0);
            r.report.tie_broken_by_reference = pk.value("tie_broken_by_reference", false);
            r.report.tie_broken_lexicographically =
                pk.value("tie_broken_lexicographically", false);
        }
        mapping.records.push_back(std::move(r));
    }
    std::string violation = mapping.validate();
    if (!violation.empty()) throw ParseError("invalid mapping: " + violation);
    return mapping;
}

/// Validates and writes the mapping artifact atomically. Refuses to persist
/// a mapping whose forward/backward maps are not mutual inverses.
inline void emit_mapping(const AlignmentMapping& mapping, const std::filesystem::path& dest) {
    std::string violation = mapping.validate();
    if (!violation.empty())
        throw std::invalid_argument("refusing to write invalid mapping: " + violation);
    atomic_write_file(dest, serialize_mapping(mapping));
}

inline AlignmentMapping load_mapping(const std::filesystem::path& path) {
    return parse_mapping(read_file(path));
}

}  // namespace toolalign
