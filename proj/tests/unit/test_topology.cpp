#include "../support.hpp"

#include "sddsim/algorithms.hpp"
#include "sddsim/sdd.hpp"
#include "sddsim/topology.hpp"

#include <doctest.h>

using namespace sddsim;
using namespace sddsim::testing;

TEST_CASE("metric on prefixes")
{
    const auto alg = sync_sdd_solver();
    const std::vector<StepDirective> sched{s_step(), d_step({make_tag(0, 0)}), s_step()};
    const auto zero = run(alg, Inputs{Bit::Zero, std::nullopt}, sched, {});
    const auto one = run(alg, Inputs{Bit::One, std::nullopt}, sched, {});

    SUBCASE("difference at C_0 gives distance 1")
    {
        const auto m = metric_prefix(zero, one);
        CHECK(m == MetricResult::exact(0));
        CHECK(to_string(m) == "Exact(2^-0)");
    }
    SUBCASE("same generating tuple gives 0")
    {
        const auto again = run(alg, Inputs{Bit::Zero, std::nullopt}, sched, {});
        CHECK(metric_prefix(zero, again) == MetricResult::exact_zero());
        CHECK_FALSE(metric_prefix(zero, again).agreement().has_value());
    }
    SUBCASE("equal prefixes of different executions give an upper bound")
    {
        const std::vector<StepDirective> other{s_step(), d_step({make_tag(0, 0)}), d_step()};
        const auto b = run(alg, Inputs{Bit::Zero, std::nullopt}, other, {});
        // C_3 coincides too: both third steps are trivial
        CHECK(metric_prefix(zero, b) == MetricResult::at_most(4));
        const auto shorter = run(alg, Inputs{Bit::Zero, std::nullopt}, std::span(sched).first(1), {});
        CHECK(metric_prefix(zero, shorter) == MetricResult::at_most(2));
    }
    SUBCASE("first difference")
    {
        const std::vector<StepDirective> other{s_step(), s_step(), d_step({make_tag(0, 0)})};
        const auto b = run(alg, Inputs{Bit::Zero, std::nullopt}, other, {});
        const auto n = first_difference(zero, b);
        REQUIRE(n.has_value());
        CHECK(metric_prefix(zero, b) == MetricResult::exact(static_cast<unsigned>(*n)));
        CHECK(*n == 2);
    }
    SUBCASE("empty prefixes are rejected")
    {
        ExecutionPrefix empty;
        CHECK_THROWS_AS(metric_prefix(empty, zero), Error);
        CHECK_THROWS_AS(metric_digests({}, {}, std::nullopt, std::nullopt), Error);
    }
}

TEST_CASE("dyadic comparison")
{
    CHECK(compare_pow2(3, Dyadic::pow2(3)) == 0);
    CHECK(compare_pow2(3, Dyadic::pow2(2)) < 0);
    CHECK(compare_pow2(2, Dyadic::pow2(3)) > 0);
    CHECK(compare_pow2(2, Dyadic{3, 4}) > 0); // 1/4 vs 3/16
    CHECK(compare_pow2(2, Dyadic{5, 4}) < 0); // 1/4 vs 5/16
    CHECK(compare_pow2(0, Dyadic{1, 200}) > 0);
}

TEST_CASE("ball membership")
{
    const auto eps = Dyadic::pow2(3);
    CHECK(ball_membership(MetricResult::exact(4), eps) == Membership::In);
    CHECK(ball_membership(MetricResult::exact(3), eps) == Membership::Out);
    CHECK(ball_membership(MetricResult::exact_zero(), eps) == Membership::In);
    CHECK(ball_membership(MetricResult::at_most(4), eps) == Membership::In);
    CHECK(ball_membership(MetricResult::at_most(2), eps) == Membership::Unknown);
    CHECK_THROWS_AS(ball_membership(MetricResult::exact(1), Dyadic{0, 1}), Error);
}

TEST_CASE("convergence of the deferred-delivery family")
{
    const auto alg = sync_sdd_solver();
    const auto family = unbounded_decision_family(alg, Bit::Zero, 6, 12);
    const auto limit = never_stabilizing_limit(alg, Bit::Zero, 12);
    const auto profile = convergence_profile(family, limit, 6);
    CHECK(profile.converging);
    CHECK(profile.increasing == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6});
    for (std::size_t k = 0; k <= 6; ++k)
    {
        const auto n = first_difference(family.generator(k), limit);
        REQUIRE(n.has_value());
        CHECK(profile.entries.at(k) == MetricResult::exact(static_cast<unsigned>(*n)));
    }
}

TEST_CASE("a constant family does not converge")
{
    const auto alg = sync_sdd_solver();
    ExecutionFamily constant;
    constant.generator = [alg](std::size_t) {
        return run_generated(alg, Inputs{Bit::Zero, std::nullopt}, lockstep_generator(), {}, 10);
    };
    constant.family_horizon = [](std::size_t) { return std::size_t{10}; };
    const auto limit = never_stabilizing_limit(alg, Bit::Zero, 10);
    CHECK_FALSE(convergence_profile(constant, limit, 4).converging);
    CHECK_THROWS_AS(closure_witness(constant, limit, ModelParams::gst_model(0), 4), Error);
}

TEST_CASE("closure witness in the GST model, none in the synchronous model")
{
    const auto alg = sync_sdd_solver();
    const auto family = unbounded_decision_family(alg, Bit::One, 8, 16);
    const auto limit = never_stabilizing_limit(alg, Bit::One, 16);
    const auto w = closure_witness(family, limit, ModelParams::gst_model(0), 8);
    REQUIRE(w.has_value());
    CHECK(w->checked_gst_max == 14);
    CHECK(w->limit_violation == AdmissibilityRule::StepWindow);
    CHECK(revalidate_witness(*w, ModelParams::gst_model(0)));

    // tampering is caught
    auto bad = *w;
    bad.agreement[3] = 99;
    CHECK_FALSE(revalidate_witness(bad, ModelParams::gst_model(0)));

    // members with a late delivery are not synchronous executions
    CHECK_FALSE(closure_witness(family, limit, ModelParams::synchronous(), 8).has_value());
}

TEST_CASE("prefix stability of monitors")
{
    const auto alg = double_decider();
    std::vector<PrefixWithExtensions> entries;
    const Inputs in{Bit::Zero, std::nullopt};
    for (std::size_t h = 0; h < 4; ++h)
    {
        const auto p = run_generated(alg, in, lockstep_generator(ProcessId::Destination), {}, h);
        PrefixWithExtensions e{p, {}};
        for (const auto &d : candidate_directives(p.last(), p.context))
            e.extensions.push_back(extend(p, d, alg));
        entries.push_back(std::move(e));
    }
    CHECK(monitor_is_prefix_stable(integrity_monitor(), entries));

    PropertyMonitor flaky{"odd-length", [](const ExecutionPrefix &p) {
                              return p.horizon() % 2 == 1 ? MonitorVerdict::violated_at(p.horizon())
                                                          : MonitorVerdict::pending();
                          }};
    CHECK_FALSE(monitor_is_prefix_stable(flaky, entries));
}

TEST_CASE("liveness extension search")
{
    const Inputs in{Bit::One, std::nullopt};
    const auto solver = sync_sdd_solver();
    const auto start = run(solver, in, std::vector{s_step()}, {});
    const auto found = liveness_extendable(termination_monitor(), start, solver, ModelParams::async(), 3);
    CHECK(found.found);
    REQUIRE(found.suffix.size() == 1);
    CHECK(found.suffix[0] == d_step({make_tag(0, 0)}));

    const FailureContext down{FailurePattern::crash(ProcessId::Source, 0), std::nullopt};
    const auto silent = run(wait_for_source(), in, {}, down);
    const auto none = liveness_extendable(termination_monitor(), silent, wait_for_source(), ModelParams::async(), 5);
    CHECK_FALSE(none.found);
    CHECK(none.explored == 5);
}
