#include "../support.hpp"

#include "sddsim/algorithms.hpp"
#include "sddsim/sdd.hpp"

#include <doctest.h>

using namespace sddsim;
using namespace sddsim::testing;

namespace
{

bool destination_decided_against_input(const ExecutionPrefix &p)
{
    const auto d = p.last().state(ProcessId::Destination).decision;
    return d.has_value() && d != p.inputs.source;
}

} // namespace

TEST_CASE("withheld-message construction against a timeout decider under GST")
{
    const auto report = theorem3_quadruple(timeout_decider(3), ModelParams::gst_model(0), {12, 6});
    CHECK(report.violated_property == "Validity");
    CHECK(report.cited_trace == "alpha_1'");
    CHECK(report.violation_index == 4);
    REQUIRE(report.certificates.size() == 3);
    for (const auto &c : report.certificates)
        CHECK(c.holds());
    CHECK(reverify(report));

    const auto &cited = report.trace(report.cited_trace);
    CHECK(destination_decided_against_input(cited));
    CHECK(cited.context.pattern.correct(ProcessId::Source));
    CHECK(cited.schedule.front().actor == ProcessId::Source);
    CHECK_FALSE(check_admissible(cited, ModelParams::gst_model(4)).violated());

    auto tampered = report;
    tampered.violation_index = 5;
    CHECK_FALSE(reverify(tampered));
    tampered = report;
    tampered.cited_trace = "alpha_0'";
    CHECK_FALSE(reverify(tampered));
}

TEST_CASE("the synchronous solver admits no withheld message")
{
    try
    {
        theorem3_quadruple(sync_sdd_solver(), ModelParams::synchronous(), {12, 6});
        FAIL("expected BoundedDecisionTime");
    }
    catch (const Error &e)
    {
        CHECK(e.code() == ErrorCode::BoundedDecisionTime);
    }
}

TEST_CASE("an algorithm that waits forever fails Termination")
{
    const auto report = theorem3_quadruple(wait_for_source(), ModelParams::gst_model(0), {10, 5});
    CHECK(report.violated_property == "Termination");
    CHECK(reverify(report));

    // non-(C1) algorithms are analysed in normal form
    const auto chatty = theorem3_quadruple(chatty_algorithm(), ModelParams::gst_model(0), {10, 5});
    CHECK(chatty.narrative.find("c1(chatty)") != std::string::npos);
    CHECK(reverify(chatty));
}

TEST_CASE("view certificates")
{
    const auto alg = timeout_decider(3);
    const FailureContext down{FailurePattern::crash(ProcessId::Source, 0), std::nullopt};
    const auto a = run(alg, Inputs{Bit::Zero, std::nullopt}, std::vector{d_step(), d_step(), d_step()}, down);
    const auto b = run(alg, Inputs{Bit::One, std::nullopt}, std::vector{d_step(), d_step(), d_step()}, down);
    const auto c = run(alg, Inputs{Bit::One, std::nullopt}, std::vector{s_step(), d_step({make_tag(0, 0)})}, {});
    CHECK(certify_view({"a", a}, {"b", b}, ViewAlignment::ByIndex, 3).holds());
    CHECK(certify_view({"a", a}, {"b", b}, ViewAlignment::ByOwnStep, 3).holds());
    const auto broken = certify_view({"a", a}, {"c", c}, ViewAlignment::ByOwnStep, 1);
    CHECK_FALSE(broken.holds());
    CHECK_FALSE(certify_view({"a", a}, {"b", b}, ViewAlignment::ByOwnStep, 5).holds());
}

TEST_CASE("random failure-detector tables")
{
    const auto source = random_fd_source(42);
    const auto f = FailurePattern::crash(ProcessId::Source, 3);
    const auto h1 = source(f, 20);
    const auto h2 = source(f, 20);
    CHECK(h1 == h2);
    CHECK(fd_history_consistent(f, h1, f, h2));
    // longer horizons extend, never rewrite
    const auto h3 = source(f, 40);
    for (const auto &[key, value] : h1.values)
        CHECK(h3.values.at(key) == value);
    for (TimeIndex t = 0; t <= 20; ++t)
    {
        CHECK(h1.at(ProcessId::Source, t).has_value() == (t < 3));
        CHECK(h1.at(ProcessId::Destination, t).has_value());
    }
    const auto other = random_fd_source(43)(f, 20);
    CHECK_FALSE(other == h1);
}

TEST_CASE("failure-detector harness, crash-by-pattern reading")
{
    FdHarnessOptions opts;
    opts.crash_time = 3;
    opts.horizon = 10;

    const auto r = fd_impossibility_pattern_interp(fd_suspicion_decider(), perfect_fd_source(), opts);
    CHECK(reverify(r));
    CHECK(r.violation_index == 4);
    const auto &cited = r.trace(r.cited_trace);
    CHECK(destination_decided_against_input(cited));
    CHECK(cited.context.pattern.crash_of(ProcessId::Source) == 3);
    // s takes exactly one step, before it crashes
    std::size_t s_steps = 0;
    for (const auto &d : cited.schedule)
        s_steps += d.actor == ProcessId::Source;
    CHECK(s_steps == 1);
    for (const auto &t : r.scenario_traces)
        CHECK(fd_history_consistent(t.trace.context.pattern, *t.trace.context.history, cited.context.pattern,
                                    *cited.context.history));

    // the timeout decider has no spare step before t_c = 3, so the crash moves later
    const auto t = fd_impossibility_pattern_interp(timeout_decider(3), perfect_fd_source(), opts);
    CHECK(reverify(t));
    CHECK(t.trace(t.cited_trace).context.pattern.crash_of(ProcessId::Source) == 4);

    CHECK_THROWS_AS(fd_impossibility_pattern_interp(wait_for_source(), perfect_fd_source(), {3, 10, 40}), Error);
}

TEST_CASE("failure-detector harness, step-activity reading")
{
    const auto r = fd_impossibility_step_interp(fd_suspicion_decider(), perfect_fd_source(), {3, 10, 80});
    CHECK(reverify(r));
    const auto &cited = r.trace(r.cited_trace);
    for (const auto &d : cited.schedule)
        CHECK(d.actor == ProcessId::Destination);
    CHECK(check_sdd(cited, InitialCrashInterpretation::ByFailurePattern).validity.violated());
    CHECK(check_sdd(cited, InitialCrashInterpretation::ByStepActivity).validity.kind ==
          PropertyStatus::Kind::VacuouslyHolds);
    REQUIRE(r.certificates.size() == 1);
    CHECK(r.certificates[0].holds());
}
