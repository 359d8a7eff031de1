// Command-line runner: single runs, exhaustive enumeration, metric matrices,
// closure witnesses, verdicts for stored traces and the impossibility harnesses.
//
// Exit status: 0 success, 1 a property violation was found, 2 usage or config error.

#include "sddsim/enumerate.hpp"
#include "sddsim/scenario.hpp"
#include "sddsim/sdd.hpp"
#include "sddsim/topology.hpp"
#include "sddsim/trace.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace sddsim;

namespace
{

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

struct Common
{
    std::string config;
    std::optional<std::size_t> horizon;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> budget;
    std::string out;
    std::string algorithm;
};

void add_common(CLI::App *cmd, Common &c, bool config_positional = true)
{
    if (config_positional)
        cmd->add_option("config", c.config, "scenario file (JSON)");
    else
        cmd->add_option("--config", c.config, "scenario file (JSON)");
    cmd->add_option("--horizon", c.horizon, "override the scenario horizon");
    cmd->add_option("--seed", c.seed, "override the scenario seed");
    cmd->add_option("--budget", c.budget, "override the enumeration budget");
    cmd->add_option("--out", c.out, "output directory (default $SDDSIM_OUT or .)");
    cmd->add_option("--algorithm", c.algorithm, "override the registry algorithm");
}

ScenarioConfig load(const Common &c)
{
    ScenarioConfig s = c.config.empty() ? parse_scenario("{}", "<defaults>") : load_scenario(c.config);
    if (c.horizon)
    {
        if (*c.horizon < 1)
            throw Error(ErrorCode::Config, "--horizon must be at least 1");
        s.horizon = *c.horizon;
    }
    if (c.seed)
        s.seed = *c.seed;
    if (c.budget)
        s.budget = *c.budget;
    if (!c.algorithm.empty())
    {
        s.algorithm = c.algorithm;
        resolve_algorithm(s);
    }
    return s;
}

fs::path output_dir(const Common &c)
{
    fs::path dir = ".";
    if (!c.out.empty())
        dir = c.out;
    else if (const char *env = std::getenv("SDDSIM_OUT"); env && *env)
        dir = env;
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::Config, "cannot write " + path.string());
    out << text;
}

void write_json(const fs::path &path, const Json &doc) { write_text(path, doc.dump(2) + "\n"); }

std::string file_safe(std::string name)
{
    for (auto &ch : name)
        if (ch == '\'')
            ch = 'p';
    return name;
}

Json verdict_json(const SDDVerdict &v)
{
    return Json{{"integrity", to_string(v.integrity)},
                {"validity", to_string(v.validity)},
                {"termination", to_string(v.termination)}};
}

Json metric_json(const MetricResult &m)
{
    return Json{{"kind", m.is_exact() ? "exact" : "at_most"},
                {"zero", m.zero},
                {"exponent", m.exponent},
                {"text", to_string(m)}};
}

// Options for harness traces: a transformed algorithm is rebuilt through the
// "c1:" registry prefix.
Json harness_options(const ScenarioConfig &s, const std::string &algorithm_name)
{
    auto options = s.algorithm_options_json();
    if (algorithm_name.rfind("c1(", 0) == 0 && s.algorithm.rfind("c1:", 0) != 0)
        options["registry"] = "c1:" + s.algorithm;
    return options;
}

Json report_json(const ImpossibilityReport &report, const ScenarioConfig &s, const fs::path &dir,
                 const std::string &prefix)
{
    Json traces = Json::object();
    for (const auto &t : report.scenario_traces)
    {
        const auto file = prefix + "-" + file_safe(t.name) + ".jsonl";
        write_text(dir / file, trace_to_string(t.trace, harness_options(s, t.trace.algorithm)));
        traces[t.name] = file;
    }
    Json certs = Json::array();
    for (const auto &c : report.certificates)
    {
        Json entries = Json::array();
        for (const auto &e : c.entries)
            entries.push_back(Json{{"left", e.left_position},
                                   {"right", e.right_position},
                                   {"state_equal", e.state_equal},
                                   {"observation_equal", e.observation_equal}});
        certs.push_back(Json{{"left", c.left},
                             {"right", c.right},
                             {"alignment", c.alignment == ViewAlignment::ByIndex ? "by-index" : "by-own-step"},
                             {"through", c.through},
                             {"holds", c.holds()},
                             {"entries", entries}});
    }
    Json doc;
    doc["harness"] = report.harness;
    doc["algorithm"] = report.scenario_traces.empty() ? s.algorithm : report.scenario_traces.front().trace.algorithm;
    doc["outcome"] = "violation";
    doc["violated_property"] = report.violated_property;
    doc["cited_trace"] = report.cited_trace;
    doc["interpretation"] = std::string(to_string(report.interpretation));
    doc["violation_index"] = report.violation_index ? Json(*report.violation_index) : Json(nullptr);
    doc["reverified"] = reverify(report);
    doc["traces"] = traces;
    doc["certificates"] = certs;
    doc["narrative"] = report.narrative;
    return doc;
}

int cmd_run(const Common &c)
{
    const auto s = load(c);
    const auto alg = resolve_algorithm(s);
    const auto prefix = run_scenario(s, alg);
    const auto dir = output_dir(c);
    write_text(dir / "trace.jsonl", trace_to_string(prefix, s.algorithm_options_json()));
    const auto verdict = check_sdd(prefix, s.interpretation);
    const auto adm = check_admissible(prefix, s.model);
    std::cout << "trace: " << (dir / "trace.jsonl").string() << "\n"
              << "steps: " << prefix.horizon() << "\n"
              << "verdict: " << verdict_json(verdict).dump() << "\n"
              << "admissible: " << (adm.violated() ? "violated" : "compliant so far") << "\n";
    return verdict.any_violation() ? kViolation : kOk;
}

int cmd_enumerate(const Common &c)
{
    const auto s = load(c);
    const auto config = enumeration_config(s);
    const auto summary = enumerate_schedules(config);
    const auto dir = output_dir(c);
    Json cex = Json::array();
    for (const auto &ce : summary.counterexamples)
    {
        const auto file = "counterexample-" + std::to_string(ce.ordinal) + ".jsonl";
        write_text(dir / file, trace_to_string(ce.trace, s.algorithm_options_json()));
        cex.push_back(Json{{"ordinal", ce.ordinal}, {"trace", file}, {"verdict", verdict_json(ce.verdict)}});
    }
    Json doc;
    doc["algorithm"] = config.algorithm.name;
    doc["model"] = model_to_json(config.params);
    doc["horizon"] = config.horizon;
    doc["crash_patterns"] = s.crash_patterns;
    doc["interpretation"] = std::string(to_string(config.interpretation));
    doc["schedules_explored"] = summary.schedules_explored;
    doc["verdict_histogram"] = summary.verdict_histogram;
    doc["violations"] = summary.violations;
    doc["undecided_with_correct_destination"] = summary.undecided_correct;
    doc["counterexamples"] = cex;
    write_json(dir / "enumeration.json", doc);
    std::cout << "schedules explored: " << summary.schedules_explored << "\n"
              << "violations: " << summary.violations << "\n";
    for (const auto &[k, v] : summary.verdict_histogram)
        std::cout << "  " << k << ": " << v << "\n";
    return summary.violations > 0 ? kViolation : kOk;
}

int cmd_metric(const Common &c, const std::string &trace_dir)
{
    std::vector<fs::path> files;
    if (!fs::is_directory(trace_dir))
        throw Error(ErrorCode::Config, "not a directory: " + trace_dir);
    for (const auto &e : fs::directory_iterator(trace_dir))
        if (e.is_regular_file() && e.path().extension() == ".jsonl")
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<TraceFile> traces;
    for (const auto &f : files)
        traces.push_back(read_trace_file(f.string()));

    Json names = Json::array();
    for (const auto &f : files)
        names.push_back(f.filename().string());
    Json matrix = Json::array();
    for (std::size_t i = 0; i < traces.size(); ++i)
    {
        Json row = Json::array();
        for (std::size_t j = 0; j < traces.size(); ++j)
        {
            const auto m = metric_digests(traces[i].digests, traces[j].digests, traces[i].provenance,
                                          traces[j].provenance);
            row.push_back(metric_json(m));
            if (j > i)
                std::cout << names[i].get<std::string>() << " " << names[j].get<std::string>() << " "
                          << to_string(m) << "\n";
        }
        matrix.push_back(row);
    }
    const auto dir = output_dir(c);
    write_json(dir / "metric.json", Json{{"traces", names}, {"matrix", matrix}});
    return kOk;
}

int cmd_closure(const Common &c)
{
    const auto s = load(c);
    const auto alg = resolve_algorithm(s);
    const auto family = unbounded_decision_family(alg, s.family_input, s.k_max, s.horizon);
    const auto limit = never_stabilizing_limit(alg, s.family_input, s.horizon);
    const auto witness = closure_witness(family, limit, s.model, s.k_max);
    const auto dir = output_dir(c);

    Json doc;
    doc["family"] = family.description;
    doc["model"] = model_to_json(s.model);
    doc["horizon"] = s.horizon;
    doc["k_max"] = s.k_max;
    if (!witness)
    {
        doc["witness"] = nullptr;
        write_json(dir / "closure.json", doc);
        std::cout << "no witness: a member is inadmissible or the limit is admissible\n";
        return kOk;
    }
    write_text(dir / "closure-limit.jsonl", trace_to_string(limit, s.algorithm_options_json()));
    Json members = Json::array();
    for (const auto &[k, n] : witness->agreement)
    {
        const auto file = "closure-member-" + std::to_string(k) + ".jsonl";
        write_text(dir / file, trace_to_string(family.generator(k), s.algorithm_options_json()));
        members.push_back(Json{{"k", k},
                               {"gst", k},
                               {"agreement", n},
                               {"distance", metric_json(witness->distances.at(k))},
                               {"trace", file}});
    }
    Json w;
    w["members"] = members;
    w["limit"] = "closure-limit.jsonl";
    w["limit_violation"] = std::string(to_string(witness->limit_violation));
    w["checked_gst_max"] = witness->checked_gst_max ? Json(*witness->checked_gst_max) : Json(nullptr);
    w["revalidated"] = revalidate_witness(*witness, s.model);
    doc["witness"] = w;
    write_json(dir / "closure.json", doc);
    std::cout << "witness: " << members.size() << " admissible members converge to a limit that breaks the "
              << to_string(witness->limit_violation) << " rule";
    if (witness->checked_gst_max)
        std::cout << " for every gst <= " << *witness->checked_gst_max;
    std::cout << "\n";
    return kOk;
}

int cmd_sdd_check(const Common &c, const std::vector<std::string> &trace_files, const std::string &interp)
{
    InitialCrashInterpretation interpretation = InitialCrashInterpretation::ByFailurePattern;
    if (interp == "step-activity")
        interpretation = InitialCrashInterpretation::ByStepActivity;
    else if (interp != "failure-pattern")
        throw Error(ErrorCode::Config, "--interpretation must be failure-pattern or step-activity");

    bool violated = false;
    Json results = Json::array();
    for (const auto &path : trace_files)
    {
        const auto trace = read_trace_file(path);
        const auto alg = algorithm_from_options(trace.header.value("algorithm_options", Json::object()));
        const auto prefix = replay(trace, alg);
        const auto verdict = check_sdd(prefix, interpretation);
        violated = violated || verdict.any_violation();
        results.push_back(Json{{"trace", path}, {"verdict", verdict_json(verdict)}});
        std::cout << path << ": " << verdict_json(verdict).dump() << "\n";
    }
    const auto dir = output_dir(c);
    write_json(dir / "sdd-check.json",
               Json{{"interpretation", std::string(to_string(interpretation))}, {"results", results}});
    return violated ? kViolation : kOk;
}

int cmd_theorem3(const Common &c)
{
    const auto s = load(c);
    const auto alg = resolve_algorithm(s);
    const auto dir = output_dir(c);
    Theorem3Options options;
    options.horizon = s.horizon;
    options.extension_budget = s.extension_budget;
    try
    {
        const auto report = theorem3_quadruple(alg, s.model, options);
        write_json(dir / "theorem3.json", report_json(report, s, dir, "theorem3"));
        std::cout << report.narrative;
        return kViolation;
    }
    catch (const Error &e)
    {
        if (e.code() != ErrorCode::BoundedDecisionTime)
            throw;
        write_json(dir / "theorem3.json", Json{{"harness", "theorem3"},
                                               {"algorithm", alg.name},
                                               {"outcome", "bounded-decision-time"},
                                               {"model", model_to_json(s.model)},
                                               {"detail", e.what()}});
        std::cout << "no counterexample: " << e.what() << "\n";
        return kOk;
    }
}

int cmd_fd(const Common &c, bool pattern)
{
    const auto s = load(c);
    const auto alg = resolve_algorithm(s);
    const auto dir = output_dir(c);
    FdHarnessOptions options;
    options.crash_time = s.crash_time;
    options.horizon = s.horizon;
    options.horizon_cap = std::max(s.horizon_cap, s.horizon);
    const auto source = s.fd == "random" ? random_fd_source(s.seed) : perfect_fd_source();
    const std::string name = pattern ? "fd-pattern" : "fd-step";

    const auto report = pattern ? fd_impossibility_pattern_interp(alg, source, options)
                                : fd_impossibility_step_interp(alg, source, options);
    auto doc = report_json(report, s, dir, name);
    doc["fd"] = s.fd == "random" ? "random" : "perfect";
    if (pattern && s.random_tables > 0)
    {
        Json tables = Json::array();
        for (std::size_t i = 0; i < s.random_tables; ++i)
        {
            const auto seed = s.seed + i;
            const auto r = fd_impossibility_pattern_interp(alg, random_fd_source(seed), options);
            tables.push_back(Json{{"seed", seed},
                                  {"violation_index", r.violation_index ? Json(*r.violation_index) : Json(nullptr)},
                                  {"reverified", reverify(r)}});
        }
        doc["random_tables"] = tables;
    }
    write_json(dir / (name + ".json"), doc);
    std::cout << report.narrative;
    return kViolation;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Two-process strongly dependent decision simulator"};
    app.require_subcommand(1);

    Common common;
    std::string trace_dir;
    std::vector<std::string> trace_files;
    std::string interpretation = "failure-pattern";

    auto *run = app.add_subcommand("run", "run one execution and write its trace");
    add_common(run, common);
    auto *enumerate = app.add_subcommand("enumerate", "enumerate every admissible schedule up to the horizon");
    add_common(enumerate, common);
    auto *metric = app.add_subcommand("metric", "pairwise distance matrix over a directory of traces");
    metric->add_option("traces", trace_dir, "directory of .jsonl traces")->required();
    add_common(metric, common, false);
    auto *closure = app.add_subcommand("closure", "converging admissible family with an inadmissible limit");
    add_common(closure, common);
    auto *check = app.add_subcommand("sdd-check", "Integrity / Validity / Termination verdicts for traces");
    check->add_option("traces", trace_files, "trace files")->required();
    check->add_option("--interpretation", interpretation, "failure-pattern or step-activity");
    add_common(check, common, false);
    auto *t3 = app.add_subcommand("theorem3", "withheld-message construction against a (C1) algorithm");
    add_common(t3, common);
    auto *fdp = app.add_subcommand("fd-pattern", "failure-detector harness, crash-by-pattern reading");
    add_common(fdp, common);
    auto *fds = app.add_subcommand("fd-step", "failure-detector harness, step-activity reading");
    add_common(fds, common);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try
    {
        if (*run)
            return cmd_run(common);
        if (*enumerate)
            return cmd_enumerate(common);
        if (*metric)
            return cmd_metric(common, trace_dir);
        if (*closure)
            return cmd_closure(common);
        if (*check)
            return cmd_sdd_check(common, trace_files, interpretation);
        if (*t3)
            return cmd_theorem3(common);
        if (*fdp)
            return cmd_fd(common, true);
        if (*fds)
            return cmd_fd(common, false);
    }
    catch (const Error &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
