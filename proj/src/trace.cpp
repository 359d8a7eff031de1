#include "sddsim/trace.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace sddsim
{

std::string hex_digest(std::uint64_t value)
{
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << value;
    return os.str();
}

std::optional<std::uint64_t> parse_hex_digest(const std::string &text)
{
    if (text.empty() || text.size() > 16)
        return std::nullopt;
    std::uint64_t v = 0;
    for (char c : text)
    {
        int d;
        if (c >= '0' && c <= '9')
            d = c - '0';
        else if (c >= 'a' && c <= 'f')
            d = c - 'a' + 10;
        else
            return std::nullopt;
        v = (v << 4) | static_cast<std::uint64_t>(d);
    }
    return v;
}

namespace
{

Json opt_bit(const std::optional<Bit> &b) { return b ? Json(to_int(*b)) : Json(nullptr); }

std::optional<Bit> bit_field(const Json &j, const char *key)
{
    if (!j.contains(key) || j.at(key).is_null())
        return std::nullopt;
    return bit_from_int(j.at(key).get<long long>());
}

Json tags(const std::vector<MessageRecord> &records)
{
    Json out = Json::array();
    for (const auto &m : records)
        out.push_back(m.tag);
    return out;
}

[[noreturn]] void trace_error(std::size_t line, const std::string &what)
{
    throw Error(ErrorCode::Trace, "trace line " + std::to_string(line) + ": " + what);
}

} // namespace

Json inputs_to_json(const Inputs &inputs)
{
    return Json{{"s", opt_bit(inputs.source)}, {"d", opt_bit(inputs.destination)}};
}

Json pattern_to_json(const FailurePattern &pattern)
{
    Json out = Json::object();
    for (auto p : kProcesses)
    {
        const auto c = pattern.crash_of(p);
        out[std::string(to_string(p))] = c ? Json(*c) : Json(nullptr);
    }
    return out;
}

Json trace_header(const ExecutionPrefix &prefix, const Json &algorithm_options)
{
    Json h;
    h["algorithm"] = prefix.algorithm;
    h["algorithm_options"] = algorithm_options;
    h["inputs"] = inputs_to_json(prefix.inputs);
    h["crash"] = pattern_to_json(prefix.context.pattern);
    h["fd_domain"] = prefix.context.history ? Json(prefix.context.history->domain_name) : Json(nullptr);
    h["horizon"] = prefix.horizon();
    h["initial_digest"] = hex_digest(digest(prefix.initial()));
    h["provenance"] = prefix.provenance ? Json(hex_digest(*prefix.provenance)) : Json(nullptr);
    return Json{{"header", h}};
}

Json trace_step(const ExecutionPrefix &prefix, std::size_t index)
{
    const auto &o = prefix.outcomes.at(index);
    Json s;
    s["index"] = index;
    s["actor"] = std::string(to_string(o.actor));
    s["kind"] = std::string(to_string(o.kind));
    s["trivial"] = o.trivial;
    s["delivered_tags"] = tags(o.delivered);
    s["sent_tags"] = tags(o.messages_sent);
    s["fd_value"] = o.fd_value ? Json(*o.fd_value) : Json(nullptr);
    s["state_digest"] = hex_digest(digest(prefix.configurations.at(index + 1)));
    return s;
}

void write_trace(std::ostream &out, const ExecutionPrefix &prefix, const Json &algorithm_options)
{
    out << trace_header(prefix, algorithm_options).dump() << '\n';
    for (std::size_t i = 0; i < prefix.horizon(); ++i)
        out << trace_step(prefix, i).dump() << '\n';
}

std::string trace_to_string(const ExecutionPrefix &prefix, const Json &algorithm_options)
{
    std::ostringstream os;
    write_trace(os, prefix, algorithm_options);
    return os.str();
}

std::string TraceFile::algorithm() const { return header.value("algorithm", std::string{}); }

Inputs TraceFile::inputs() const
{
    Inputs in;
    if (header.contains("inputs"))
    {
        in.source = bit_field(header.at("inputs"), "s");
        in.destination = bit_field(header.at("inputs"), "d");
    }
    return in;
}

FailurePattern TraceFile::crash() const
{
    FailurePattern f;
    if (!header.contains("crash"))
        return f;
    for (auto p : kProcesses)
    {
        const auto key = std::string(to_string(p));
        const auto &c = header.at("crash");
        if (c.contains(key) && !c.at(key).is_null())
            f.crash_time[slot(p)] = c.at(key).get<TimeIndex>();
    }
    return f;
}

std::vector<StepDirective> TraceFile::schedule() const
{
    std::vector<StepDirective> out;
    for (const auto &s : steps)
    {
        StepDirective d;
        d.actor = *parse_process(s.at("actor").get<std::string>());
        d.deliver = s.at("delivered_tags").get<std::vector<MessageTag>>();
        if (!s.at("fd_value").is_null())
            d.fd_value = s.at("fd_value").get<std::string>();
        out.push_back(std::move(d));
    }
    return out;
}

TraceFile read_trace(std::istream &in)
{
    TraceFile t;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line))
    {
        ++number;
        if (line.empty())
            continue;
        Json j;
        try
        {
            j = Json::parse(line);
        }
        catch (const Json::parse_error &e)
        {
            trace_error(number, e.what());
        }
        try
        {
            if (t.header.is_null())
            {
                if (!j.contains("header"))
                    trace_error(number, "first record must be the header");
                t.header = j.at("header");
                const auto d = parse_hex_digest(t.header.at("initial_digest").get<std::string>());
                if (!d)
                    trace_error(number, "bad initial_digest");
                t.digests.push_back(*d);
                if (!t.header.at("provenance").is_null())
                    t.provenance = parse_hex_digest(t.header.at("provenance").get<std::string>());
                continue;
            }
            if (j.at("index").get<std::size_t>() != t.steps.size())
                trace_error(number, "step index out of order");
            if (!parse_process(j.at("actor").get<std::string>()))
                trace_error(number, "unknown actor");
            const auto d = parse_hex_digest(j.at("state_digest").get<std::string>());
            if (!d)
                trace_error(number, "bad state_digest");
            (void)j.at("delivered_tags").get<std::vector<MessageTag>>();
            (void)j.at("fd_value");
            t.digests.push_back(*d);
            t.steps.push_back(std::move(j));
        }
        catch (const Json::exception &e)
        {
            trace_error(number, e.what());
        }
    }
    if (t.header.is_null())
        throw Error(ErrorCode::Trace, "trace is empty");
    return t;
}

TraceFile read_trace_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Trace, "cannot open trace " + path);
    try
    {
        return read_trace(in);
    }
    catch (const Error &e)
    {
        throw Error(ErrorCode::Trace, path + ": " + e.what());
    }
}

ExecutionPrefix replay(const TraceFile &trace, const AlgorithmSpec &algorithm)
{
    FailureContext ctx;
    ctx.pattern = trace.crash();
    auto prefix = run(algorithm, trace.inputs(), trace.schedule(), ctx);
    for (std::size_t k = 0; k < trace.digests.size(); ++k)
        if (digest(prefix.configurations.at(k)) != trace.digests[k])
            throw Error(ErrorCode::Trace, "replay diverges at configuration " + std::to_string(k), k);
    prefix.provenance = trace.provenance;
    return prefix;
}

} // namespace sddsim
