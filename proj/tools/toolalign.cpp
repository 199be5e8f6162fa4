// toolalign: rename tool-schema components to the names a language model
// generates most consistently from their descriptions, and translate runtime
// tool calls between the aligned and original namespaces.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "toolalign/alignment.hpp"
#include "toolalign/evalkit.hpp"
#include "toolalign/http_sampler.hpp"
#include "toolalign/oracles.hpp"
#include "toolalign/peakedness.hpp"
#include "toolalign/sampling.hpp"
#include "toolalign/schema.hpp"
#include "toolalign/translation.hpp"
#include "toolalign/util.hpp"

namespace fs = std::filesystem;
using namespace toolalign;

namespace {

// exit codes: 0 success, 2 config/usage, 3 parse, 4 sampler, 5 collision or
// translation hard error
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitParse = 3;
constexpr int kExitSampler = 4;
constexpr int kExitHard = 5;

struct SamplerSpec {
    std::string fixture_path;
    std::string api_base;
    std::string model = "default";
    std::string api_key_env;

    bool is_fixture() const { return !fixture_path.empty(); }

    void validate() const {
        bool live = !api_base.empty();
        if (is_fixture() == live)
            throw ConfigError("exactly one sampler must be configured: --fixture or --api-base");
    }

    std::unique_ptr<Sampler> make() const {
        validate();
        if (is_fixture())
            return std::make_unique<FixtureSampler>(FixtureSampler::from_file(fixture_path));
        HttpSampler::Options options;
        options.base_url = api_base;
        options.model = model;
        options.api_key = HttpSampler::api_key_from_env(api_key_env);
        return std::make_unique<HttpSampler>(std::move(options));
    }
};

std::string utc_now_iso8601() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

ordered_json config_to_json(const SamplerConfig& config, bool permissive) {
    ordered_json j;
    j["model_id"] = config.model_id;
    j["num_candidates"] = config.num_candidates;
    j["temperature"] = config.temperature;
    j["alpha"] = config.alpha;
    j["seed"] = config.rng_seed;
    j["max_retries"] = config.max_retries;
    j["request_parallelism"] = config.request_parallelism;
    j["max_output_tokens"] = config.max_output_tokens;
    j["permissive"] = permissive;
    return j;
}

void write_manifest(const fs::path& path, const std::string& command,
                    const ordered_json& config, const ordered_json& inputs,
                    const ordered_json& outputs, long long wall_ms,
                    uint64_t sampler_requests) {
    ordered_json doc;
    doc["command"] = command;
    doc["config"] = config;
    doc["inputs"] = inputs;
    doc["outputs"] = outputs;
    doc["wall_time_ms"] = wall_ms;
    doc["sampler_requests"] = sampler_requests;
    atomic_write_file(path, doc.dump(2) + "\n");
}

struct AlignOutcome {
    AlignmentResult result;
    uint64_t sampler_requests = 0;
};

AlignOutcome run_alignment(const std::string& schema_path, const SamplerSpec& sampler_spec,
                           SamplerConfig config, bool permissive) {
    ToolSchema schema = load_schema(read_file(schema_path), permissive);
    std::unique_ptr<Sampler> sampler = sampler_spec.make();
    if (config.model_id.empty()) config.model_id = sampler->id();
    AlignmentResult result = align_schema(schema, config, *sampler);
    result.mapping.metadata.timestamp = sampler_spec.is_fixture() ? "" : utc_now_iso8601();
    return {std::move(result), sampler->request_count()};
}

// align: schema in, aligned schema + mapping + manifest out. The two
// artifacts are staged and renamed schema-first so a crash never leaves a
// mapping without its schema.
int cmd_align(const std::string& schema_path, const SamplerSpec& sampler_spec,
              const SamplerConfig& config, bool permissive, const std::string& out_schema,
              const std::string& out_mapping, std::string manifest_path) {
    auto started = std::chrono::steady_clock::now();
    AlignOutcome outcome = run_alignment(schema_path, sampler_spec, config, permissive);

    std::string schema_text = serialize_schema(outcome.result.aligned_schema);
    std::string mapping_text = serialize_mapping(outcome.result.mapping);
    std::string violation = outcome.result.mapping.validate();
    if (!violation.empty()) throw CollisionError(violation);
    atomic_write_file(out_schema, schema_text);
    atomic_write_file(out_mapping, mapping_text);

    auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - started)
                       .count();
    if (manifest_path.empty()) manifest_path = out_mapping + ".manifest.json";
    ordered_json inputs;
    inputs["schema"] = schema_path;
    inputs["schema_digest"] = outcome.result.mapping.metadata.source_digest;
    if (sampler_spec.is_fixture()) {
        inputs["fixture"] = sampler_spec.fixture_path;
        inputs["fixture_digest"] = fnv1a_digest(read_file(sampler_spec.fixture_path));
    } else {
        inputs["api_base"] = sampler_spec.api_base;
    }
    ordered_json outputs;
    outputs["aligned_schema"] = out_schema;
    outputs["mapping"] = out_mapping;
    write_manifest(manifest_path, "align", config_to_json(config, permissive), inputs, outputs,
                   wall_ms, outcome.sampler_requests);

    std::cout << "aligned " << outcome.result.mapping.records.size() << " components -> "
              << out_schema << ", " << out_mapping << "\n";
    return kExitOk;
}

void print_record(std::ostream& out, const AlignmentRecord& r) {
    out << "component: " << r.component.flat_path() << " ("
        << (r.component.kind == ComponentKind::Tool ? "tool" : "parameter") << ")\n";
    out << "  original: " << r.original_name << "\n";
    out << "  aligned:  " << r.aligned_name << "\n";
    out << "  collision_resolution: " << to_string(r.collision_resolution) << "\n";
    if (r.skipped) {
        out << "  skipped: empty description, kept original name\n";
        return;
    }
    out << "  tau: " << r.report.threshold << " (alpha x max_length " << r.report.max_length
        << ")\n";
    out << "  reference (greedy): " << r.reference << "\n";
    out << "  selected: " << r.report.selected << " (peakedness=" << r.report.selected_score
        << ")\n";
    out << "  tie_broken_by_reference: " << (r.report.tie_broken_by_reference ? "yes" : "no")
        << "\n";
    out << "  tie_broken_lexicographically: "
        << (r.report.tie_broken_lexicographically ? "yes" : "no") << "\n";

    // frequency table over distinct candidates, most frequent first
    std::map<std::string, int> freq;
    std::map<std::string, int> phi;
    for (size_t i = 0; i < r.candidates.size(); ++i) {
        freq[r.candidates[i]] += 1;
        phi[r.candidates[i]] = r.report.scores[i];
    }
    std::vector<std::pair<std::string, int>> rows(freq.begin(), freq.end());
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    out << "  candidates by frequency (" << r.candidates.size() << " samples):\n";
    for (const auto& [name, count] : rows) {
        out << "    " << name << ": " << count << " (phi=" << phi[name] << ")";
        if (name == r.report.selected) out << " [selected]";
        out << "\n";
    }
}

int cmd_inspect(const std::string& mapping_path, const std::string& component) {
    AlignmentMapping mapping = load_mapping(mapping_path);
    if (!component.empty()) {
        const AlignmentRecord* found = nullptr;
        for (const auto& r : mapping.records)
            if (r.component.flat_path() == component) found = &r;
        if (!found) {
            std::ostringstream ss;
            ss << "unknown component path \"" << component << "\"; valid paths:";
            for (const auto& r : mapping.records) ss << "\n  " << r.component.flat_path();
            throw ConfigError(ss.str());
        }
        print_record(std::cout, *found);
        return kExitOk;
    }
    std::cout << mapping.records.size() << " records (model " << mapping.metadata.model_id
              << ", N=" << mapping.metadata.num_candidates
              << ", t=" << mapping.metadata.temperature << ", alpha=" << mapping.metadata.alpha
              << ")\n";
    for (const auto& r : mapping.records) {
        std::cout << "\n";
        print_record(std::cout, r);
    }
    return kExitOk;
}

int cmd_translate(const std::string& mapping_path, const std::string& direction,
                  std::optional<double> fuzzy_radius, bool fail_fast,
                  const std::string& in_path) {
    AlignmentMapping mapping = load_mapping(mapping_path);
    Namespace source_ns = direction == "to-aligned" ? Namespace::Original : Namespace::Aligned;

    std::ifstream file_in;
    std::istream* in = &std::cin;
    if (!in_path.empty()) {
        file_in.open(in_path);
        if (!file_in) throw ConfigError("cannot open input file " + in_path);
        in = &file_in;
    }

    std::string line;
    while (std::getline(*in, line)) {
        if (line.empty()) continue;
        ordered_json out_record;
        bool hard_error = false;
        try {
            ToolCall call = parse_tool_call(line, source_ns);
            TranslationResult result = translate_call(call, mapping, fuzzy_radius);
            if (result.ok()) {
                out_record = ordered_json::parse(serialize_tool_call(*result.call));
                if (!result.issues.empty()) {
                    ordered_json repairs = ordered_json::array();
                    for (const auto& issue : result.issues)
                        repairs.push_back(translation_error_to_json(issue));
                    out_record["repairs"] = repairs;
                }
            } else {
                ordered_json errors = ordered_json::array();
                for (const auto& issue : result.issues)
                    errors.push_back(translation_error_to_json(issue));
                out_record["error"] = ordered_json{{"kind", "translation_failed"},
                                                   {"issues", errors}};
                hard_error = true;
            }
        } catch (const ParseError& e) {
            out_record["error"] = ordered_json{{"kind", "malformed_call"},
                                               {"message", e.what()}};
            hard_error = true;
        }
        std::cout << out_record.dump() << "\n";
        if (hard_error && fail_fast) {
            std::cerr << "translate: stopping on first error (--fail-fast)\n";
            return kExitHard;
        }
    }
    return kExitOk;
}

std::vector<double> parse_grid(const std::string& csv, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("invalid value \"" + item + "\" in " + flag);
        }
    }
    if (out.empty()) throw ConfigError(flag + " must list at least one value");
    return out;
}

std::string cell_name(int n, double alpha, double t) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "N%d_a%.2f_t%.2f", n, alpha, t);
    return buf;
}

// sweep: one aligned schema + mapping per grid cell plus a stability
// summary. Stability is the fraction of components whose aligned name is
// identical across every cell.
int cmd_sweep(const std::string& schema_path, const SamplerSpec& sampler_spec,
              const SamplerConfig& base_config, bool permissive, const std::string& out_dir,
              const std::vector<double>& n_grid, const std::vector<double>& alpha_grid,
              const std::vector<double>& t_grid) {
    auto started = std::chrono::steady_clock::now();
    fs::create_directories(out_dir);

    struct Cell {
        int n;
        double alpha;
        double t;
        std::string dir;
        AlignmentMapping mapping;
    };
    std::vector<Cell> cells;
    uint64_t total_requests = 0;

    for (double nd : n_grid) {
        for (double alpha : alpha_grid) {
            for (double t : t_grid) {
                SamplerConfig config = base_config;
                config.num_candidates = static_cast<int>(nd);
                config.alpha = alpha;
                config.temperature = t;
                config.validate();
                AlignOutcome outcome = run_alignment(schema_path, sampler_spec, config, permissive);
                total_requests += outcome.sampler_requests;

                std::string dir = cell_name(config.num_candidates, alpha, t);
                fs::path cell_dir = fs::path(out_dir) / dir;
                atomic_write_file(cell_dir / "aligned_schema.json",
                                  serialize_schema(outcome.result.aligned_schema));
                atomic_write_file(cell_dir / "mapping.json",
                                  serialize_mapping(outcome.result.mapping));
                cells.push_back({config.num_candidates, alpha, t, dir,
                                 std::move(outcome.result.mapping)});
            }
        }
    }

    // selection stability across cells
    std::map<std::string, std::vector<std::string>> selected_by_component;
    for (const auto& cell : cells)
        for (const auto& r : cell.mapping.records)
            selected_by_component[r.component.flat_path()].push_back(r.aligned_name);
    int changed = 0;
    ordered_json component_rows = ordered_json::array();
    for (const auto& [path, names] : selected_by_component) {
        bool stable = std::all_of(names.begin(), names.end(),
                                  [&](const std::string& n) { return n == names.front(); });
        if (!stable) ++changed;
        ordered_json row;
        row["component"] = path;
        row["stable"] = stable;
        ordered_json per_cell;
        for (size_t i = 0; i < cells.size(); ++i) per_cell[cells[i].dir] = names[i];
        row["aligned"] = per_cell;
        component_rows.push_back(row);
    }
    int total_components = static_cast<int>(selected_by_component.size());
    double fraction_changed =
        total_components == 0 ? 0.0 : double(changed) / double(total_components);

    // alpha monotonicity surfaced: for fixed (N, t), raising alpha never
    // lowers any candidate's score
    bool monotonic = true;
    for (const auto& a : cells) {
        for (const auto& b : cells) {
            if (a.n != b.n || a.t != b.t || !(a.alpha < b.alpha)) continue;
            for (size_t ri = 0; ri < a.mapping.records.size(); ++ri) {
                const auto& ra = a.mapping.records[ri];
                const auto& rb = b.mapping.records[ri];
                if (ra.skipped || rb.skipped) continue;
                for (size_t i = 0; i < ra.report.scores.size(); ++i)
                    if (rb.report.scores[i] < ra.report.scores[i]) monotonic = false;
            }
        }
    }

    ordered_json summary;
    ordered_json cell_list = ordered_json::array();
    for (const auto& cell : cells) {
        ordered_json cj;
        cj["num_candidates"] = cell.n;
        cj["alpha"] = cell.alpha;
        cj["temperature"] = cell.t;
        cj["dir"] = cell.dir;
        cell_list.push_back(cj);
    }
    summary["cells"] = cell_list;
    summary["components"] = component_rows;
    ordered_json stability;
    stability["changed"] = changed;
    stability["total"] = total_components;
    stability["fraction_changed"] = fraction_changed;
    summary["stability"] = stability;
    summary["alpha_monotonicity_ok"] = monotonic;
    atomic_write_file(fs::path(out_dir) / "sweep_summary.json", summary.dump(2) + "\n");

    auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - started)
                       .count();
    ordered_json inputs;
    inputs["schema"] = schema_path;
    if (sampler_spec.is_fixture()) inputs["fixture"] = sampler_spec.fixture_path;
    ordered_json outputs;
    outputs["out_dir"] = out_dir;
    outputs["cells"] = cell_list;
    ordered_json grid_config = config_to_json(base_config, permissive);
    {
        ordered_json grids;
        ordered_json gn = ordered_json::array();
        for (double v : n_grid) gn.push_back(static_cast<int>(v));
        grids["num_candidates"] = gn;
        grids["alpha"] = alpha_grid;
        grids["temperature"] = t_grid;
        grid_config["grids"] = grids;
    }
    write_manifest(fs::path(out_dir) / "sweep_manifest.json", "sweep", grid_config, inputs,
                   outputs, wall_ms, total_requests);

    std::cout << "sweep: " << cells.size() << " cells -> " << out_dir << "\n";
    std::cout << "stability: " << (total_components - changed) << "/" << total_components
              << " components stable (fraction changed " << std::fixed << std::setprecision(3)
              << fraction_changed << ")\n";
    std::cout << "alpha monotonicity: " << (monotonic ? "ok" : "VIOLATED") << "\n";
    return kExitOk;
}

int cmd_verify(uint64_t seed, bool seed_given, int cases, bool inject_fault) {
    if (cases < 1) throw ConfigError("--cases must be >= 1");
    if (!seed_given) seed = std::random_device{}();
    std::cout << "verify: seed " << seed << ", " << cases << " cases\n";

    struct Named {
        const char* name;
        oracles::OracleResult result;
    };
    std::mt19937_64 rng(seed);
    std::vector<Named> checks;
    checks.push_back(
        {"edit distance vs full DP table", oracles::check_edit_distance(rng, cases, inject_fault)});
    int set_cases = std::max(1, cases / 5);
    checks.push_back({"peakedness vs naive double loop",
                      oracles::check_peakedness(rng, set_cases, inject_fault)});
    checks.push_back({"selection permutation invariance",
                      oracles::check_permutation_invariance(rng, set_cases, inject_fault)});

    bool all_ok = true;
    for (const auto& check : checks) {
        std::cout << "  " << check.name << ": " << (check.result.passed ? "ok" : "MISMATCH")
                  << "\n";
        if (!check.result.passed) {
            std::cout << "    " << check.result.detail << "\n";
            all_ok = false;
        }
    }
    if (!all_ok) {
        std::cout << "oracle mismatch (seed " << seed << ")\n";
        return 1;
    }
    std::cout << "all oracles passed (seed " << seed << ")\n";
    return kExitOk;
}

int cmd_eval(const std::string& tasks_path, const std::string& mapping_path,
             const std::string& out_path) {
    std::vector<EvalTask> tasks = parse_eval_tasks(read_file(tasks_path));
    AlignmentMapping mapping = load_mapping(mapping_path);
    ScriptedAgent agent;
    EvalReport report = run_eval(tasks, mapping, agent);

    std::cout << "variant    correct/total  accuracy  misalignments\n";
    for (const auto& [name, stats] : report.variants) {
        std::ostringstream acc;
        if (report.accuracy_undefined)
            acc << "undefined";
        else
            acc << std::fixed << std::setprecision(3) << stats.accuracy();
        std::cout << std::left << std::setw(11) << name << std::setw(15)
                  << (std::to_string(stats.correct) + "/" + std::to_string(stats.total))
                  << std::setw(10) << acc.str() << stats.misalignments << "\n";
    }
    if (!out_path.empty()) {
        atomic_write_file(out_path, serialize_eval_report(report));
        std::cout << "report -> " << out_path << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"toolalign: align tool schemas with a model's preferred naming"};
    app.require_subcommand(1);

    // shared sampler/config flags
    SamplerSpec sampler_spec;
    SamplerConfig config;
    bool permissive = false;

    auto add_sampler_flags = [&](CLI::App* cmd) {
        cmd->add_option("--fixture", sampler_spec.fixture_path,
                        "fixture sampler script (JSON)")
            ->check(CLI::ExistingFile);
        cmd->add_option("--api-base", sampler_spec.api_base,
                        "live sampler base URL, e.g. http://host:8000/v1");
        cmd->add_option("--model", sampler_spec.model, "live sampler model id");
        cmd->add_option("--api-key-env", sampler_spec.api_key_env,
                        "environment variable holding the API key");
    };
    auto add_config_flags = [&](CLI::App* cmd) {
        cmd->add_option("--num-candidates,-n", config.num_candidates,
                        "sampled candidates per component")
            ->capture_default_str();
        cmd->add_option("--temperature,-t", config.temperature, "sampling temperature")
            ->capture_default_str();
        cmd->add_option("--alpha,-a", config.alpha, "similarity threshold factor")
            ->capture_default_str();
        cmd->add_option("--seed", config.rng_seed, "run seed recorded in artifacts")
            ->capture_default_str();
        cmd->add_option("--parallelism", config.request_parallelism,
                        "concurrent sampler requests per component")
            ->capture_default_str();
        cmd->add_option("--max-retries", config.max_retries,
                        "extra requests allowed per component")
            ->capture_default_str();
        cmd->add_option("--max-tokens", config.max_output_tokens,
                        "max output tokens per request")
            ->capture_default_str();
        cmd->add_flag("--permissive", permissive,
                      "skip components with empty descriptions instead of failing");
    };

    // align
    std::string schema_path, out_schema = "aligned_schema.json", out_mapping = "mapping.json";
    std::string manifest_path;
    CLI::App* align = app.add_subcommand("align", "rename schema components to aligned names");
    align->add_option("--schema", schema_path, "input tool schema (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    align->add_option("--out-schema", out_schema, "aligned schema output path")
        ->capture_default_str();
    align->add_option("--out-mapping", out_mapping, "mapping artifact output path")
        ->capture_default_str();
    align->add_option("--manifest", manifest_path,
                      "run manifest path (default: <out-mapping>.manifest.json)");
    add_sampler_flags(align);
    add_config_flags(align);

    // inspect
    std::string mapping_path, component_filter;
    CLI::App* inspect = app.add_subcommand("inspect", "show per-component selection reports");
    inspect->add_option("--mapping", mapping_path, "mapping artifact")
        ->required()
        ->check(CLI::ExistingFile);
    inspect->add_option("--component", component_filter,
                        "show one component (flat path, e.g. tool or tool/param.path)");

    // translate
    std::string direction = "to-original", in_path;
    double fuzzy_value = -1.0;
    bool fail_fast = false;
    CLI::App* translate =
        app.add_subcommand("translate", "translate tool calls between namespaces (JSONL)");
    translate->add_option("--mapping", mapping_path, "mapping artifact")
        ->required()
        ->check(CLI::ExistingFile);
    translate->add_option("--direction", direction, "to-original (default) or to-aligned")
        ->check(CLI::IsMember({"to-original", "to-aligned"}));
    translate->add_option("--fuzzy-repair", fuzzy_value,
                          "repair unknown names to the unique in-scope name within this edit "
                          "distance");
    translate->add_flag("--fail-fast", fail_fast, "stop at the first error");
    translate->add_option("--in", in_path, "input file (default: stdin)")
        ->check(CLI::ExistingFile);

    // sweep
    std::string out_dir;
    std::string n_grid_csv = "32", alpha_grid_csv = "0.2", t_grid_csv = "0.4";
    CLI::App* sweep = app.add_subcommand("sweep", "grid-run align and report selection stability");
    sweep->add_option("--schema", schema_path, "input tool schema (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sweep->add_option("--out-dir", out_dir, "output directory for per-cell artifacts")
        ->required();
    sweep->add_option("--num-candidates-grid", n_grid_csv, "comma list of N values")
        ->capture_default_str();
    sweep->add_option("--alpha-grid", alpha_grid_csv, "comma list of alpha values")
        ->capture_default_str();
    sweep->add_option("--temperature-grid", t_grid_csv, "comma list of temperatures")
        ->capture_default_str();
    add_sampler_flags(sweep);
    add_config_flags(sweep);

    // verify
    uint64_t verify_seed = 0;
    int verify_cases = 1000;
    bool inject_fault = false;
    CLI::App* verify = app.add_subcommand("verify", "run built-in brute-force oracles");
    CLI::Option* seed_opt =
        verify->add_option("--seed", verify_seed, "oracle RNG seed (default: random, printed)");
    verify->add_option("--cases", verify_cases, "random cases per oracle")
        ->capture_default_str();
    verify->add_flag("--inject-fault", inject_fault)->group("");  // test hook, hidden

    // eval
    std::string tasks_path, eval_out;
    CLI::App* eval =
        app.add_subcommand("eval", "score scripted tool selection on base vs aligned schemas");
    eval->add_option("--tasks", tasks_path, "task fixture (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_option("--mapping", mapping_path, "mapping artifact")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_option("--out", eval_out, "write the full report JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (align->parsed()) {
            config.validate();
            return cmd_align(schema_path, sampler_spec, config, permissive, out_schema,
                             out_mapping, manifest_path);
        }
        if (inspect->parsed()) return cmd_inspect(mapping_path, component_filter);
        if (translate->parsed()) {
            std::optional<double> fuzzy;
            if (translate->count("--fuzzy-repair")) {
                if (fuzzy_value < 0) throw ConfigError("--fuzzy-repair must be >= 0");
                fuzzy = fuzzy_value;
            }
            return cmd_translate(mapping_path, direction, fuzzy, fail_fast, in_path);
        }
        if (sweep->parsed()) {
            std::vector<double> n_grid = parse_grid(n_grid_csv, "--num-candidates-grid");
            std::vector<double> alpha_grid = parse_grid(alpha_grid_csv, "--alpha-grid");
            std::vector<double> t_grid = parse_grid(t_grid_csv, "--temperature-grid");
            return cmd_sweep(schema_path, sampler_spec, config, permissive, out_dir, n_grid,
                             alpha_grid, t_grid);
        }
        if (verify->parsed())
            return cmd_verify(verify_seed, seed_opt->count() > 0, verify_cases, inject_fault);
        if (eval->parsed()) return cmd_eval(tasks_path, mapping_path, eval_out);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const SamplerError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSampler;
    } catch (const CollisionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitHard;
    } catch (const EvalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
