#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "toolalign/alignment.hpp"
#include "toolalign/schema.hpp"
#include "toolalign/translation.hpp"

namespace toolalign {

/// One scripted tool-selection task. Candidate tools and gold labels are
/// expressed in the original namespace; an empty gold set means "no
/// suitable tool". Scripts hold the agent's emitted tool names for each
/// schema variant.
struct EvalTask {
    std::string id;
    std::string query;
    std::vector<std::string> candidate_tools;            // original namespace
    std::set<std::string> gold;                          // original namespace
    std::map<std::string, std::vector<std::string>> responses;  // variant -> emitted names
};

class EvalError : public std::runtime_error {
public:
    explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Answers one task under one schema variant. The scripted implementation
/// replays fixture responses; a live adapter can drive a real model behind
/// the same interface.
class ToolSelectionAgent {
public:
    virtual ~ToolSelectionAgent() = default;
    virtual std::vector<std::string> select_tools(const EvalTask& task, Namespace variant,
                                                  const std::vector<std::string>& visible_tools) = 0;
};

class ScriptedAgent : public ToolSelectionAgent {
public:
    std::vector<std::string> select_tools(const EvalTask& task, Namespace variant,
                                          const std::vector<std::string>&) override {
        auto it = task.responses.find(std::string(to_string(variant)));
        if (it == task.responses.end())
            throw EvalError("agent script exhausted: task \"" + task.id +
                            "\" has no scripted response for the " +
                            std::string(to_string(variant)) + " variant");
        return it->second;
    }
};

struct TaskOutcome {
    std::string task_id;
    std::string variant;
    std::vector<std::string> emitted;
    std::vector<std::string> compared;  // emitted names mapped to the original namespace
    bool correct = false;
    std::vector<std::string> misaligned;  // emitted names absent from the variant schema
};

struct VariantStats {
    int correct = 0;
    int total = 0;
    int misalignments = 0;

    double accuracy() const { return total == 0 ? 0.0 : double(correct) / double(total); }
};

struct EvalReport {
    std::map<std::string, VariantStats> variants;  // "original" / "aligned"
    std::vector<TaskOutcome> outcomes;
    bool accuracy_undefined = false;  // empty task list
};

namespace detail {

// Minimal schema carrying just the visible tool names, so misalignment
// counting runs through the same detector as the translation module.
inline ToolSchema name_only_schema(const std::vector<std::string>& tool_names) {
    ToolSchema schema;
    for (const auto& n : tool_names) {
        ToolDef t;
        t.name = n;
        schema.tools.push_back(std::move(t));
    }
    return schema;
}

}  // namespace detail

/// Runs every task under both schema variants with the given agent and
/// scores exact-match accuracy plus mechanical misalignment counts.
/// Aligned-variant emissions are translated back to the original namespace
/// before comparison against gold.
inline EvalReport run_eval(const std::vector<EvalTask>& tasks, const AlignmentMapping& mapping,
                           ToolSelectionAgent& agent) {
    EvalReport report;
    report.variants["original"] = {};
    report.variants["aligned"] = {};
    report.accuracy_undefined = tasks.empty();

    for (const auto& task : tasks) {
        for (const auto& t : task.gold) {
            if (std::find(task.candidate_tools.begin(), task.candidate_tools.end(), t) ==
                task.candidate_tools.end())
                throw EvalError("task \"" + task.id + "\": gold tool \"" + t +
                                "\" is not among the candidate tools");
        }
        // candidate names must exist in the mapping so the aligned variant
        // can be rendered
        std::vector<std::string> aligned_candidates;
        for (const auto& t : task.candidate_tools) {
            auto aligned = mapping.tool_forward(t);
            if (!aligned)
                throw EvalError("task \"" + task.id + "\" references unknown tool \"" + t + "\"");
            aligned_candidates.push_back(*aligned);
        }

        for (Namespace variant : {Namespace::Original, Namespace::Aligned}) {
            const bool is_aligned = variant == Namespace::Aligned;
            const auto& visible = is_aligned ? aligned_candidates : task.candidate_tools;
            ToolSchema variant_schema = detail::name_only_schema(visible);

            TaskOutcome outcome;
            outcome.task_id = task.id;
            outcome.variant = std::string(to_string(variant));
            outcome.emitted = agent.select_tools(task, variant, visible);

            for (const auto& name : outcome.emitted) {
                ToolCall probe{name, ordered_json::object(), variant};
                if (!detect_misalignment(probe, variant_schema).ok)
                    outcome.misaligned.push_back(name);
            }

            std::set<std::string> compared;
            for (const auto& name : outcome.emitted) {
                if (is_aligned) {
                    auto original = mapping.tool_backward(name);
                    compared.insert(original ? *original : name);
                } else {
                    compared.insert(name);
                }
            }
            outcome.compared.assign(compared.begin(), compared.end());
            outcome.correct = compared == task.gold;

            VariantStats& stats = report.variants[outcome.variant];
            stats.total += 1;
            stats.correct += outcome.correct ? 1 : 0;
            stats.misalignments += static_cast<int>(outcome.misaligned.size());
            report.outcomes.push_back(std::move(outcome));
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// fixture and report formats

inline std::vector<EvalTask> parse_eval_tasks(std::string_view text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed task fixture: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("tasks") || !doc["tasks"].is_array())
        throw ParseError("task fixture must be an object with a \"tasks\" array");
    std::vector<EvalTask> tasks;
    for (const auto& tj : doc["tasks"]) {
        EvalTask task;
        task.id = tj.value("id", "task" + std::to_string(tasks.size()));
        task.query = tj.value("query", "");
        for (const auto& c : tj.value("candidates", ordered_json::array()))
            task.candidate_tools.push_back(c.get<std::string>());
        for (const auto& g : tj.value("gold", ordered_json::array()))
            task.gold.insert(g.get<std::string>());
        if (tj.contains("responses")) {
            for (auto it = tj["responses"].begin(); it != tj["responses"].end(); ++it) {
                std::vector<std::string> names;
                for (const auto& n : it.value()) names.push_back(n.get<std::string>());
                task.responses[it.key()] = std::move(names);
            }
        }
        tasks.push_back(std::move(task));
    }
    return tasks;
}

inline std::string serialize_eval_report(const EvalReport& report) {
    ordered_json doc;
    ordered_json variants;
    for (const auto& [name, stats] : report.variants) {
        ordered_json v;
        v["correct"] = stats.correct;
        v["total"] = stats.total;
        if (report.accuracy_undefined)
            v["accuracy"] = nullptr;
        else
            v["accuracy"] = stats.accuracy();
        v["misalignments"] = stats.misalignments;
        variants[name] = v;
    }
    doc["variants"] = variants;
    doc["accuracy_undefined"] = report.accuracy_undefined;
    ordered_json outcomes = ordered_json::array();
    for (const auto& o : report.outcomes) {
        ordered_json oj;
        oj["task"] = o.task_id;
        oj["variant"] = o.variant;
        oj["emitted"] = o.emitted;
        oj["compared"] = o.compared;
        oj["correct"] = o.correct;
        oj["misaligned"] = o.misaligned;
        outcomes.push_back(oj);
    }
    doc["outcomes"] = outcomes;
    return doc.dump(2) + "\n";
}

}  // namespace toolalign
