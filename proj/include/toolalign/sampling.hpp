#pragma once

#include <atomic>
#include <cctype>
#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "toolalign/schema.hpp"
#include "toolalign/util.hpp"

namespace toolalign {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class SamplerError : public std::runtime_error {
public:
    explicit SamplerError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SamplerConfig {
    std::string model_id;
    int num_candidates = 32;
    double temperature = 0.4;
    double alpha = 0.2;
    uint64_t rng_seed = 0;      // recorded for reproducibility; fixture scripts are
                                // deterministic on their own
    int max_retries = 8;        // extra requests allowed per component
    int request_parallelism = 1;
    int max_output_tokens = 24;

    void validate() const {
        if (num_candidates < 1) throw ConfigError("num_candidates must be >= 1");
        if (!(temperature > 0.0 && temperature <= 1.0))
            throw ConfigError("temperature must be in (0, 1]");
        if (alpha < 0.0 || alpha > 1.0) throw ConfigError("alpha must be in [0, 1]");
        if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
        if (request_parallelism < 1) throw ConfigError("request_parallelism must be >= 1");
        if (max_output_tokens < 1) throw ConfigError("max_output_tokens must be >= 1");
    }
};

struct ToolContext {
    std::string tool_name;
    std::string tool_description;
};

struct PromptSpec {
    ComponentKind component_kind = ComponentKind::Tool;
    std::string description;
    std::optional<ToolContext> tool_context;  // present iff component is a parameter
};

/// Builds the generation prompt spec for a component. Parameter components
/// must carry the context of their enclosing tool; tool components must not.
inline PromptSpec build_prompt(const ComponentRef& component,
                               std::optional<ToolContext> tool_context = std::nullopt) {
    if (component.description.empty())
        throw std::invalid_argument("build_prompt: empty description for " +
                                    component.flat_path());
    if (component.kind == ComponentKind::Parameter && !tool_context)
        throw std::invalid_argument("build_prompt: parameter prompt requires tool context for " +
                                    component.flat_path());
    if (component.kind == ComponentKind::Tool && tool_context)
        throw std::invalid_argument("build_prompt: tool prompt must not carry tool context for " +
                                    component.flat_path());
    return {component.kind, component.description, std::move(tool_context)};
}

/// Renders the prompt text. Tool prompts embed the file_manager one-shot
/// example; parameter prompts embed the file_path example and the enclosing
/// tool's context block.
inline std::string render_prompt(const PromptSpec& spec) {
    std::string kind = spec.component_kind == ComponentKind::Tool ? "tool" : "parameter";
    std::string out;
    out += "Generate a " + kind + " name from the description below.\n";
    out += "The " + kind + " will be used in a tool agent scenario.\n";
    out += "\n";
    out += "Description:\n";
    out += spec.description + "\n";
    out += "\n";
    if (spec.component_kind == ComponentKind::Tool) {
        out += "Example:\n";
        out += "Description: A tool that manages files and directories on the system.\n";
        out += "Output: file_manager\n";
    } else {
        out += "Example:\n";
        out += "Context:\n";
        out += "Tool: file_manager - A tool for managing files and directories\n";
        out += "Output: file_path\n";
        out += "\n";
        out += "Context:\n";
        out += "Tool: " + spec.tool_context->tool_name + " - " +
               spec.tool_context->tool_description + "\n";
    }
    out += "\n";
    out += "Generate only the name without additional explanation.\n";
    return out;
}

/// Normalizes a raw model output into an identifier candidate, or returns
/// empty to signal rejection. Pipeline: first non-empty line; strip backticks,
/// surrounding quotes, whitespace and terminal punctuation; map interior
/// whitespace/hyphens to underscores; drop anything else outside
/// [A-Za-z0-9_]; prefix an underscore if the first char is a digit.
/// Case is preserved. Idempotent.
inline std::string sanitize_name(std::string_view raw) {
    auto is_space = [](char c) {
        return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
    };

    // first non-empty line
    std::string line;
    size_t start = 0;
    while (start <= raw.size()) {
        size_t end = raw.find('\n', start);
        std::string_view l =
            raw.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        size_t a = 0, b = l.size();
        while (a < b && is_space(l[a])) ++a;
        while (b > a && is_space(l[b - 1])) --b;
        if (b > a) {
            line.assign(l.substr(a, b - a));
            break;
        }
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    if (line.empty()) return "";

    // backticks and code fences
    std::string no_ticks;
    for (char c : line)
        if (c != '`') no_ticks += c;
    line = no_ticks;

    // surrounding quote pairs
    while (line.size() >= 2 &&
           ((line.front() == '"' && line.back() == '"') ||
            (line.front() == '\'' && line.back() == '\''))) {
        line = line.substr(1, line.size() - 2);
    }

    // re-trim, then terminal punctuation
    size_t a = 0, b = line.size();
    while (a < b && is_space(line[a])) ++a;
    while (b > a && is_space(line[b - 1])) --b;
    line = line.substr(a, b - a);
    auto is_term_punct = [](char c) {
        return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?';
    };
    while (!line.empty() && is_term_punct(line.back())) line.pop_back();

    // interior whitespace and hyphens become underscores, then drop the rest
    std::string out;
    out.reserve(line.size());
    for (char c : line) {
        if (is_space(c) || c == '-') {
            out += '_';
        } else if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                   (c >= '0' && c <= '9') || c == '_') {
            out += c;
        }
    }
    if (!out.empty() && out[0] >= '0' && out[0] <= '9') out = "_" + out;
    return out;
}

/// One generation request. `sequence` is assigned deterministically by the
/// orchestrator (slot order, then retries in ascending slot order) so that
/// scripted samplers are reproducible under any request parallelism.
/// sequence -1 addresses the greedy reference slot.
struct SampleRequest {
    std::string component_path;  // flat path, e.g. "file_search/options.max_results"
    std::string prompt;
    double temperature = 0.0;
    int max_output_tokens = 24;
    int sequence = 0;
};

class Sampler {
public:
    virtual ~Sampler() = default;

    /// Returns the raw model output for one request. Throws SamplerError on
    /// transport failure or script exhaustion.
    virtual std::string generate(const SampleRequest& request) = 0;

    virtual std::string id() const = 0;

    uint64_t request_count() const { return requests_.load(); }

protected:
    void count_request() { requests_.fetch_add(1); }

private:
    std::atomic<uint64_t> requests_{0};
};

/// Script-driven stand-in for a live model. The script file maps component
/// paths to an ordered list of raw sampled outputs plus one greedy output:
///
///   { "components": { "<path>": { "samples": ["...", ...], "greedy": "..." } } }
///
/// Requests are answered by sequence index; running past the end of a
/// script is an error so undersized fixtures fail loudly.
class FixtureSampler : public Sampler {
public:
    struct Script {
        std::vector<std::string> samples;
        std::string greedy;
    };

    static FixtureSampler from_json(const ordered_json& doc, std::string id = "fixture") {
        FixtureSampler s;
        s.id_ = std::move(id);
        if (!doc.is_object() || !doc.contains("components") || !doc["components"].is_object())
            throw ParseError("fixture script must be an object with a \"components\" object");
        for (auto it = doc["components"].begin(); it != doc["components"].end(); ++it) {
            Script script;
            const auto& node = it.value();
            if (!node.is_object() || !node.contains("samples") || !node["samples"].is_array() ||
                !node.contains("greedy"))
                throw ParseError("fixture script entry for \"" + it.key() +
                                 "\" must carry \"samples\" and \"greedy\"");
            for (const auto& s2 : node["samples"]) script.samples.push_back(s2.get<std::string>());
            script.greedy = node["greedy"].get<std::string>();
            s.scripts_.emplace(it.key(), std::move(script));
        }
        return s;
    }

    static FixtureSampler from_file(const std::filesystem::path& path) {
        ordered_json doc;
        try {
            doc = ordered_json::parse(read_file(path));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("malformed fixture script " + path.string() + ": " + e.what());
        }
        return from_json(doc, "fixture:" + path.filename().string());
    }

    std::string generate(const SampleRequest& request) override {
        count_request();
        auto it = scripts_.find(request.component_path);
        if (it == scripts_.end())
            throw SamplerError("fixture script has no entry for component \"" +
                               request.component_path + "\"");
        const Script& script = it->second;
        if (request.sequence < 0) return script.greedy;
        if (static_cast<size_t>(request.sequence) >= script.samples.size())
            throw SamplerError("fixture script exhausted for component \"" +
                               request.component_path + "\": need sample index " +
                               std::to_string(request.sequence) + " but script has " +
                               std::to_string(script.samples.size()) + " entries");
        return script.samples[request.sequence];
    }

    std::string id() const override { return id_; }

private:
    std::map<std::string, Script> scripts_;
    std::string id_ = "fixture";
};

/// N temperature-sampled candidates plus the greedy reference for one
/// component. Raw transcripts are retained for audit; the reference is kept
/// out of the candidate list by construction.
struct CandidateSet {
    std::vector<std::string> candidates;
    std::string reference;
    std::vector<std::string> raw_transcripts;  // N candidate raws, then the greedy raw

    std::string digest() const {
        std::string acc;
        for (const auto& r : raw_transcripts) {
            acc += r;
            acc += '\x1f';
        }
        acc += reference;
        return fnv1a_digest(acc);
    }
};

namespace detail {

// Runs requests[i] for all i in `slots`, at most `parallelism` at a time.
// Results land by slot, so scheduling never affects output order.
inline void run_requests(Sampler& sampler, const std::vector<SampleRequest>& requests,
                         std::vector<std::string>& outputs, int parallelism) {
    const size_t n = requests.size();
    if (n == 0) return;
    outputs.resize(n);
    if (parallelism <= 1 || n == 1) {
        for (size_t i = 0; i < n; ++i) outputs[i] = sampler.generate(requests[i]);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto worker = [&] {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                outputs[i] = sampler.generate(requests[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    size_t nthreads = std::min<size_t>(static_cast<size_t>(parallelism), n);
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (size_t i = 0; i < n; ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);
}

}  // namespace detail

/// Collects exactly N sanitized candidates plus the greedy reference for
/// one component. A raw output that sanitizes to empty triggers one
/// re-request, counted against config.max_retries; sequence numbers are
/// assigned in ascending slot order so fixture runs are bit-deterministic
/// under any parallelism setting.
inline CandidateSet sample_candidates(const PromptSpec& prompt, const SamplerConfig& config,
                                      Sampler& sampler, const std::string& component_path) {
    config.validate();
    const int n = config.num_candidates;
    const std::string prompt_text = render_prompt(prompt);

    CandidateSet set;
    set.candidates.assign(n, "");
    std::vector<std::string> raws(n);

    int next_sequence = 0;
    int retries_left = config.max_retries;
    std::vector<size_t> pending(n);
    for (int i = 0; i < n; ++i) pending[i] = static_cast<size_t>(i);

    bool first_round = true;
    while (!pending.empty() && (first_round || retries_left > 0)) {
        std::vector<size_t> batch;
        if (first_round) {
            batch = std::move(pending);
            pending.clear();
        } else {
            size_t allowed = std::min(pending.size(), static_cast<size_t>(retries_left));
            batch.assign(pending.begin(), pending.begin() + static_cast<long>(allowed));
            pending.erase(pending.begin(), pending.begin() + static_cast<long>(allowed));
            retries_left -= static_cast<int>(allowed);
        }
        std::vector<SampleRequest> requests;
        requests.reserve(batch.size());
        for (size_t slot : batch) {
            (void)slot;
            requests.push_back({component_path, prompt_text, config.temperature,
                                config.max_output_tokens, next_sequence++});
        }
        std::vector<std::string> outputs;
        detail::run_requests(sampler, requests, outputs, config.request_parallelism);

        std::vector<size_t> still_pending;
        for (size_t k = 0; k < batch.size(); ++k) {
            size_t slot = batch[k];
            raws[slot] = outputs[k];
            std::string clean = sanitize_name(outputs[k]);
            if (clean.empty()) {
                still_pending.push_back(slot);
            } else {
                set.candidates[slot] = clean;
            }
        }
        // failed slots queue ahead of any slots deferred by the budget
        still_pending.insert(still_pending.end(), pending.begin(), pending.end());
        pending = std::move(still_pending);
        first_round = false;
    }
    if (!pending.empty()) {
        int collected = n - static_cast<int>(pending.size());
        throw SamplerError("could not obtain " + std::to_string(n) +
                           " valid candidates for component \"" + component_path +
                           "\" within the retry budget (collected " +
                           std::to_string(collected) + ")");
    }

    // greedy reference, temperature 0
    std::string ref_raw;
    std::string reference;
    int ref_attempts = 1 + config.max_retries;
    for (int attempt = 0; attempt < ref_attempts; ++attempt) {
        ref_raw = sampler.generate(
            {component_path, prompt_text, 0.0, config.max_output_tokens, -1});
        reference = sanitize_name(ref_raw);
        if (!reference.empty()) break;
    }
    if (reference.empty())
        throw SamplerError("reference generation failed for component \"" + component_path +
                           "\": greedy output sanitizes to empty");

    set.reference = reference;
    set.raw_transcripts = std::move(raws);
    set.raw_transcripts.push_back(ref_raw);
    return set;
}

}  // namespace toolalign
