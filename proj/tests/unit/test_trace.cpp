#include "../support.hpp"

#include "sddsim/algorithms.hpp"
#include "sddsim/sdd.hpp"
#include "sddsim/topology.hpp"
#include "sddsim/trace.hpp"

#include <doctest.h>

#include <sstream>

using namespace sddsim;
using namespace sddsim::testing;

TEST_CASE("hex digests")
{
    CHECK(hex_digest(0) == "0000000000000000");
    CHECK(hex_digest(0xdeadbeefULL) == "00000000deadbeef");
    CHECK(parse_hex_digest("00000000deadbeef") == 0xdeadbeefULL);
    CHECK_FALSE(parse_hex_digest("xyz").has_value());
    CHECK_FALSE(parse_hex_digest("").has_value());
}

TEST_CASE("trace round trip and replay")
{
    const auto alg = fd_suspicion_decider();
    const auto pattern = FailurePattern::crash(ProcessId::Source, 2);
    const FailureContext ctx{pattern, perfect_fd_history(pattern, 8)};
    const auto p = run_generated(alg, Inputs{Bit::One, std::nullopt}, lockstep_generator(), ctx, 6);

    std::stringstream ss;
    write_trace(ss, p, Json{{"registry", "fd-suspicion-decider"}});
    const auto t = read_trace(ss);
    CHECK(t.algorithm() == alg.name);
    CHECK(t.inputs() == p.inputs);
    CHECK(t.crash() == pattern);
    CHECK(t.steps.size() == p.horizon());
    CHECK(t.provenance == p.provenance);
    REQUIRE(t.digests.size() == p.configurations.size());
    for (std::size_t k = 0; k < t.digests.size(); ++k)
        CHECK(t.digests[k] == digest(p.configurations[k]));
    CHECK(t.header.at("fd_domain") == "P");

    const auto again = replay(t, alg);
    CHECK(first_difference(again, p) == std::nullopt);
    CHECK(check_sdd(again, InitialCrashInterpretation::ByFailurePattern).category() ==
          check_sdd(p, InitialCrashInterpretation::ByFailurePattern).category());

    CHECK(metric_digests(t.digests, t.digests, t.provenance, t.provenance) == MetricResult::exact_zero());
}

TEST_CASE("replay detects a different algorithm")
{
    const auto p = run_generated(sync_sdd_solver(), Inputs{Bit::One, std::nullopt}, lockstep_generator(), {}, 4);
    std::stringstream ss;
    write_trace(ss, p);
    const auto t = read_trace(ss);
    CHECK_THROWS_AS(replay(t, double_decider()), Error);
}

TEST_CASE("digest metric agrees with the prefix metric")
{
    const auto alg = sync_sdd_solver();
    const auto a = run(alg, Inputs{Bit::Zero, std::nullopt}, std::vector{s_step(), s_step(), d_step({0})}, {});
    const auto b = run(alg, Inputs{Bit::Zero, std::nullopt}, std::vector{s_step(), d_step({0}), s_step()}, {});
    std::vector<std::uint64_t> da, db;
    for (const auto &c : a.configurations)
        da.push_back(digest(c));
    for (const auto &c : b.configurations)
        db.push_back(digest(c));
    CHECK(metric_digests(da, db, a.provenance, b.provenance) == metric_prefix(a, b));
    CHECK(metric_prefix(a, b) == MetricResult::exact(2));
}

TEST_CASE("malformed traces name the line")
{
    auto fails_with = [](const std::string &text, const std::string &needle) {
        std::stringstream ss(text);
        try
        {
            read_trace(ss);
        }
        catch (const Error &e)
        {
            CHECK(e.code() == ErrorCode::Trace);
            return std::string(e.what()).find(needle) != std::string::npos;
        }
        return false;
    };
    CHECK(fails_with("", "empty"));
    CHECK(fails_with("{\"index\":0}\n", "line 1"));
    const auto p = run_generated(sync_sdd_solver(), Inputs{Bit::One, std::nullopt}, lockstep_generator(), {}, 2);
    auto text = trace_to_string(p);
    CHECK(fails_with(text + "{not json\n", "line 4"));
    const auto pos = text.find("\"index\":1");
    auto reordered = text;
    reordered.replace(pos, 9, "\"index\":5");
    CHECK(fails_with(reordered, "line 3"));
}
