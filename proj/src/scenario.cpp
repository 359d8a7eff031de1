#include "sddsim/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace sddsim
{

namespace
{

struct Position
{
    std::size_t line = 1;
    std::size_t column = 1;
};

Position locate(std::string_view text, std::size_t byte)
{
    Position p;
    byte = std::min(byte, text.size());
    for (std::size_t i = 0; i < byte; ++i)
    {
        if (text[i] == '\n')
        {
            ++p.line;
            p.column = 1;
        }
        else
            ++p.column;
    }
    return p;
}

class Reader
{
public:
    explicit Reader(std::string origin) : origin_(std::move(origin)) {}

    [[noreturn]] void fail(const std::string &field, const std::string &message) const
    {
        throw Error(ErrorCode::Config, origin_ + ": " + field + ": " + message);
    }

    void only(const Json &obj, const std::string &where, std::initializer_list<const char *> keys) const
    {
        if (!obj.is_object())
            fail(where.empty() ? "<root>" : where, "expected an object");
        std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto &item : obj.items())
            if (!allowed.count(item.key()))
                fail(join(where, item.key()), "unknown field");
    }

    std::size_t count(const Json &obj, const std::string &where, const char *key, std::size_t fallback) const
    {
        if (!obj.contains(key))
            return fallback;
        const auto &v = obj.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0)
            fail(join(where, key), "expected a non-negative integer");
        return v.get<std::size_t>();
    }

    std::optional<TimeIndex> optional_time(const Json &obj, const std::string &where, const char *key) const
    {
        if (!obj.contains(key) || obj.at(key).is_null())
            return std::nullopt;
        return count(obj, where, key, 0);
    }

    std::string text(const Json &obj, const std::string &where, const char *key, std::string fallback) const
    {
        if (!obj.contains(key))
            return fallback;
        if (!obj.at(key).is_string())
            fail(join(where, key), "expected a string");
        return obj.at(key).get<std::string>();
    }

    Bit bit(const Json &v, const std::string &field) const
    {
        if (!v.is_number_integer())
            fail(field, "expected 0 or 1");
        const auto b = bit_from_int(v.get<long long>());
        if (!b)
            fail(field, "expected 0 or 1");
        return *b;
    }

    ProcessId process(const Json &v, const std::string &field) const
    {
        if (!v.is_string())
            fail(field, "expected \"s\" or \"d\"");
        const auto p = parse_process(v.get<std::string>());
        if (!p)
            fail(field, "expected \"s\" or \"d\"");
        return *p;
    }

    static std::string join(const std::string &where, const std::string &key)
    {
        return where.empty() ? key : where + "." + key;
    }

private:
    std::string origin_;
};

ModelParams parse_model(const Reader &r, const Json &j)
{
    r.only(j, "model", {"kind", "gst", "delta", "phi"});
    const auto kind = r.text(j, "model", "kind", "synchronous");
    ModelParams m;
    if (kind == "async")
        m = ModelParams::async();
    else if (kind == "synchronous" || kind == "sync")
        m = ModelParams::synchronous();
    else if (kind == "gst")
        m = ModelParams::gst_model(0);
    else
        r.fail("model.kind", "expected async, synchronous or gst");
    if (m.kind != ModelKind::Async)
    {
        m.delta = r.count(j, "model", "delta", *m.delta);
        m.phi = r.count(j, "model", "phi", *m.phi);
        if (*m.delta == 0)
            r.fail("model.delta", "must be positive");
        if (*m.phi == 0)
            r.fail("model.phi", "must be positive");
    }
    if (m.kind == ModelKind::GST)
        m.gst = r.count(j, "model", "gst", 0);
    else if (j.contains("gst"))
        r.fail("model.gst", "only meaningful for the gst model");
    return m;
}

} // namespace

Json model_to_json(const ModelParams &params)
{
    Json m;
    m["kind"] = params.kind == ModelKind::Async ? "async" : (params.kind == ModelKind::GST ? "gst" : "synchronous");
    if (params.gst)
        m["gst"] = *params.gst;
    if (params.delta)
        m["delta"] = *params.delta;
    if (params.phi)
        m["phi"] = *params.phi;
    return m;
}

Json ScenarioConfig::algorithm_options_json() const
{
    return Json{{"registry", algorithm},
                {"timeout_steps", algorithm_options.timeout_steps},
                {"model", model_to_json(algorithm_options.model)}};
}

AlgorithmSpec algorithm_from_options(const Json &options)
{
    if (!options.is_object() || !options.contains("registry"))
        throw Error(ErrorCode::Trace, "trace header does not name a registry algorithm");
    try
    {
        const Reader r("trace header");
        AlgorithmOptions o;
        o.timeout_steps = static_cast<unsigned>(r.count(options, "algorithm_options", "timeout_steps", 3));
        if (options.contains("model"))
            o.model = parse_model(r, options.at("model"));
        const auto name = options.at("registry").get<std::string>();
        auto a = make_algorithm(name, o);
        if (!a)
            throw Error(ErrorCode::Trace, "unknown algorithm '" + name + "' in trace header");
        return *a;
    }
    catch (const Json::exception &e)
    {
        throw Error(ErrorCode::Trace, std::string("bad algorithm_options: ") + e.what());
    }
    catch (const Error &e)
    {
        if (e.code() == ErrorCode::Trace)
            throw;
        throw Error(ErrorCode::Trace, e.what());
    }
}

ScenarioConfig parse_scenario(std::string_view text, const std::string &origin)
{
    Json doc;
    try
    {
        doc = Json::parse(text.begin(), text.end());
    }
    catch (const Json::parse_error &e)
    {
        const auto pos = locate(text, e.byte == 0 ? 0 : e.byte - 1);
        std::string message = e.what();
        const auto cut = message.find("parse error");
        if (cut != std::string::npos)
            message = message.substr(cut);
        throw Error(ErrorCode::Config, origin + ":" + std::to_string(pos.line) + ":" + std::to_string(pos.column) +
                                           ": " + message);
    }

    const Reader r(origin);
    r.only(doc, "",
           {"algorithm", "algorithm_options", "inputs", "model", "failure", "fd", "seed", "horizon", "budget",
            "interpretation", "schedule", "enumerate", "closure", "theorem3", "fd_harness"});

    ScenarioConfig c;
    c.algorithm = r.text(doc, "", "algorithm", c.algorithm);
    if (doc.contains("algorithm_options"))
    {
        const auto &o = doc.at("algorithm_options");
        r.only(o, "algorithm_options", {"timeout_steps"});
        c.algorithm_options.timeout_steps =
            static_cast<unsigned>(r.count(o, "algorithm_options", "timeout_steps", c.algorithm_options.timeout_steps));
        if (c.algorithm_options.timeout_steps == 0 || c.algorithm_options.timeout_steps > 255)
            r.fail("algorithm_options.timeout_steps", "must be in 1..255");
    }
    if (doc.contains("inputs"))
    {
        const auto &in = doc.at("inputs");
        r.only(in, "inputs", {"s", "d"});
        c.inputs.source = in.contains("s") && !in.at("s").is_null() ? std::optional{r.bit(in.at("s"), "inputs.s")}
                                                                      : std::nullopt;
        if (in.contains("d") && !in.at("d").is_null())
            c.inputs.destination = r.bit(in.at("d"), "inputs.d");
    }
    if (doc.contains("model"))
        c.model = parse_model(r, doc.at("model"));
    c.algorithm_options.model = c.model;
    if (doc.contains("failure"))
    {
        const auto &f = doc.at("failure");
        r.only(f, "failure", {"s", "d"});
        c.failure.crash_time[slot(ProcessId::Source)] = r.optional_time(f, "failure", "s");
        c.failure.crash_time[slot(ProcessId::Destination)] = r.optional_time(f, "failure", "d");
    }
    c.fd = r.text(doc, "", "fd", c.fd);
    if (c.fd != "none" && c.fd != "perfect" && c.fd != "random")
        r.fail("fd", "expected none, perfect or random");
    c.seed = r.count(doc, "", "seed", 0);
    c.horizon = r.count(doc, "", "horizon", c.horizon);
    if (c.horizon < 1)
        r.fail("horizon", "must be at least 1");
    c.budget = r.count(doc, "", "budget", 0);
    const auto interp = r.text(doc, "", "interpretation", "failure-pattern");
    if (interp == "failure-pattern")
        c.interpretation = InitialCrashInterpretation::ByFailurePattern;
    else if (interp == "step-activity")
        c.interpretation = InitialCrashInterpretation::ByStepActivity;
    else
        r.fail("interpretation", "expected failure-pattern or step-activity");

    if (doc.contains("schedule"))
    {
        const auto &s = doc.at("schedule");
        if (s.is_string())
        {
            c.schedule = s.get<std::string>();
            if (c.schedule != "lockstep" && c.schedule != "lockstep-d")
                r.fail("schedule", "expected lockstep, lockstep-d or a list of steps");
        }
        else if (s.is_array())
        {
            c.schedule = "explicit";
            for (std::size_t i = 0; i < s.size(); ++i)
            {
                const auto where = "schedule[" + std::to_string(i) + "]";
                const auto &e = s.at(i);
                r.only(e, where, {"actor", "deliver", "fd"});
                if (!e.contains("actor"))
                    r.fail(where, "missing actor");
                ScheduledStep step;
                step.actor = r.process(e.at("actor"), where + ".actor");
                if (e.contains("deliver") && !(e.at("deliver").is_string() && e.at("deliver") == "all"))
                {
                    if (!e.at("deliver").is_array())
                        r.fail(where + ".deliver", "expected \"all\" or a list of tags");
                    std::vector<MessageTag> tags;
                    for (const auto &t : e.at("deliver"))
                    {
                        if (!t.is_number_unsigned())
                            r.fail(where + ".deliver", "tags are non-negative integers");
                        tags.push_back(t.get<MessageTag>());
                    }
                    step.deliver = std::move(tags);
                }
                if (e.contains("fd"))
                    step.fd_value = r.text(e, where, "fd", "");
                c.steps.push_back(std::move(step));
            }
        }
        else
            r.fail("schedule", "expected lockstep, lockstep-d or a list of steps");
    }

    if (doc.contains("enumerate"))
    {
        const auto &e = doc.at("enumerate");
        r.only(e, "enumerate", {"inputs", "crash_patterns", "keep_counterexamples"});
        if (e.contains("inputs"))
        {
            if (!e.at("inputs").is_array() || e.at("inputs").empty())
                r.fail("enumerate.inputs", "expected a nonempty list of bits");
            c.enumerate_inputs.clear();
            for (const auto &b : e.at("inputs"))
                c.enumerate_inputs.push_back(r.bit(b, "enumerate.inputs"));
        }
        c.crash_patterns = r.text(e, "enumerate", "crash_patterns", c.crash_patterns);
        if (c.crash_patterns != "none" && c.crash_patterns != "all" && c.crash_patterns != "given")
            r.fail("enumerate.crash_patterns", "expected none, all or given");
        c.keep_counterexamples = r.count(e, "enumerate", "keep_counterexamples", c.keep_counterexamples);
    }
    if (doc.contains("closure"))
    {
        const auto &e = doc.at("closure");
        r.only(e, "closure", {"k_max", "input"});
        c.k_max = r.count(e, "closure", "k_max", c.k_max);
        if (e.contains("input"))
            c.family_input = r.bit(e.at("input"), "closure.input");
    }
    if (doc.contains("theorem3"))
    {
        const auto &e = doc.at("theorem3");
        r.only(e, "theorem3", {"extension_budget"});
        c.extension_budget = r.count(e, "theorem3", "extension_budget", c.extension_budget);
    }
    if (doc.contains("fd_harness"))
    {
        const auto &e = doc.at("fd_harness");
        r.only(e, "fd_harness", {"crash_time", "horizon_cap", "random_tables"});
        c.crash_time = r.count(e, "fd_harness", "crash_time", c.crash_time);
        c.horizon_cap = r.count(e, "fd_harness", "horizon_cap", c.horizon_cap);
        c.random_tables = r.count(e, "fd_harness", "random_tables", c.random_tables);
    }

    if (!make_algorithm(c.algorithm, c.algorithm_options))
        r.fail("algorithm", "unknown algorithm '" + c.algorithm + "'");
    return c;
}

ScenarioConfig load_scenario(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Config, "cannot read config " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str(), path);
}

AlgorithmSpec resolve_algorithm(const ScenarioConfig &config)
{
    auto a = make_algorithm(config.algorithm, config.algorithm_options);
    if (!a)
        throw Error(ErrorCode::Config, "unknown algorithm '" + config.algorithm + "'");
    return *a;
}

FdHistorySource resolve_fd_source(const ScenarioConfig &config)
{
    if (config.fd == "perfect")
        return perfect_fd_source();
    if (config.fd == "random")
        return random_fd_source(config.seed);
    return {};
}

FailureContext scenario_context(const ScenarioConfig &config)
{
    FailureContext ctx{config.failure, std::nullopt};
    if (auto source = resolve_fd_source(config))
        ctx.history = source(config.failure, config.horizon);
    return ctx;
}

EnumerationConfig enumeration_config(const ScenarioConfig &config)
{
    EnumerationConfig e;
    e.algorithm = resolve_algorithm(config);
    e.params = config.model;
    e.horizon = config.horizon;
    e.inputs = config.enumerate_inputs;
    e.patterns = config.crash_patterns == "given" ? std::vector<FailurePattern>{config.failure}
                                                  : crash_patterns(config.crash_patterns, config.horizon);
    e.interpretation = config.interpretation;
    e.fd_source = resolve_fd_source(config);
    e.budget = config.budget;
    e.keep_counterexamples = config.keep_counterexamples;
    return e;
}

ExecutionPrefix run_scenario(const ScenarioConfig &config, const AlgorithmSpec &algorithm)
{
    const auto ctx = scenario_context(config);
    if (config.schedule == "lockstep" || config.schedule == "lockstep-d")
    {
        const auto first = config.schedule == "lockstep" ? ProcessId::Source : ProcessId::Destination;
        return run_generated(algorithm, config.inputs, lockstep_generator(first), ctx, config.horizon);
    }

    auto prefix = run(algorithm, config.inputs, {}, ctx);
    for (const auto &step : config.steps)
    {
        if (prefix.horizon() >= config.horizon)
            break;
        StepDirective d;
        d.actor = step.actor;
        d.fd_value = step.fd_value;
        if (step.deliver)
            d.deliver = *step.deliver;
        else
            for (const auto &m : prefix.last().buffer(step.actor))
                d.deliver.push_back(m.tag);
        prefix = extend(prefix, d, algorithm);
    }
    return run(algorithm, config.inputs, prefix.schedule, ctx);
}

} // namespace sddsim
