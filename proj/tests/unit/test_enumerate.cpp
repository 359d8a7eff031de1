#include "../support.hpp"

#include "sddsim/algorithms.hpp"
#include "sddsim/enumerate.hpp"

#include <doctest.h>

#include <functional>

using namespace sddsim;
using namespace sddsim::testing;

namespace
{

// Brute force: expand every directive at every node with no pruning and
// judge admissibility only on complete schedules.
std::size_t brute_force_count(const EnumerationConfig &c)
{
    std::size_t count = 0;
    std::function<void(const ExecutionPrefix &)> grow = [&](const ExecutionPrefix &node) {
        const auto choices = candidate_directives(node.last(), node.context);
        if (node.horizon() == c.horizon || choices.empty())
        {
            count += check_admissible(node, c.params).violated() ? 0 : 1;
            return;
        }
        for (const auto &d : choices)
            grow(extend(node, d, c.algorithm));
    };
    for (auto input : c.inputs)
        for (const auto &pattern : c.patterns)
            grow(run(c.algorithm, Inputs{input, std::nullopt}, {}, FailureContext{pattern, std::nullopt}));
    return count;
}

EnumerationConfig config(AlgorithmSpec alg, ModelParams params, std::size_t horizon, const char *patterns)
{
    EnumerationConfig c;
    c.algorithm = std::move(alg);
    c.params = params;
    c.horizon = horizon;
    c.patterns = crash_patterns(patterns, horizon);
    return c;
}

} // namespace

TEST_CASE("crash pattern sets")
{
    CHECK(crash_patterns("none", 5).size() == 1);
    const auto all = crash_patterns("all", 3);
    REQUIRE(all.size() == 16);
    CHECK(all.front() == FailurePattern::none());
    CHECK(all[1] == FailurePattern::crash(ProcessId::Destination, 0));
    CHECK(all[4] == FailurePattern::crash(ProcessId::Source, 0));
    CHECK_THROWS_AS(crash_patterns("some", 3), Error);
}

TEST_CASE("horizon 1, synchronous, no crashes: hand count")
{
    // either process may take the single step; both buffers are empty
    auto c = config(sync_sdd_solver(), ModelParams::synchronous(), 1, "none");
    CHECK(enumerate_schedules(c).schedules_explored == 2 * 2);
}

TEST_CASE("horizon 2, synchronous, no crashes: hand count")
{
    // both must step in [0, 1]: s d or d s; s's message is sent at 0 and due at 1
    auto c = config(sync_sdd_solver(), ModelParams::synchronous(), 2, "none");
    c.inputs = {Bit::One};
    const auto s = enumerate_schedules(c);
    // s,d: d must receive at 1 (1 way); d,s: s sends at 1, due at 2 (beyond the horizon)
    CHECK(s.schedules_explored == 2);
}

TEST_CASE("pruned enumeration matches brute force")
{
    const std::vector<EnumerationConfig> configs{
        config(sync_sdd_solver(), ModelParams::async(), 4, "none"),
        config(chatty_algorithm(), ModelParams::async(), 4, "none"),
        config(sync_sdd_solver(), ModelParams::synchronous(), 6, "all"),
        config(timeout_decider(3), ModelParams::gst_model(2), 6, "all"),
        config(double_decider(), ModelParams::synchronous(2, 3), 5, "all"),
    };
    for (const auto &c : configs)
    {
        CAPTURE(c.algorithm.name);
        const auto expected = brute_force_count(c);
        CHECK(count_schedules(c) == expected);
        CHECK(enumerate_schedules(c).schedules_explored == expected);
    }
}

TEST_CASE("solver at horizon 6 has no counterexamples")
{
    auto c = config(sync_sdd_solver(), ModelParams::synchronous(), 6, "all");
    c.interpretation = InitialCrashInterpretation::ByStepActivity;
    const auto s = enumerate_schedules(c);
    CHECK(s.schedules_explored > 0);
    CHECK(s.violations == 0);
    CHECK(s.counterexamples.empty());
}

TEST_CASE("timeout decider under GST has counterexamples")
{
    auto c = config(timeout_decider(3), ModelParams::gst_model(4), 7, "none");
    const auto s = enumerate_schedules(c);
    CHECK(s.violations > 0);
    REQUIRE_FALSE(s.counterexamples.empty());
    for (const auto &ce : s.counterexamples)
    {
        CHECK(ce.verdict.validity.violated());
        CHECK_FALSE(check_admissible(ce.trace, c.params).violated());
    }
    std::size_t total = 0;
    for (const auto &[k, v] : s.verdict_histogram)
        total += v;
    CHECK(total == s.schedules_explored);

    // canonical order: numbering is stable
    const auto again = enumerate_schedules(c);
    REQUIRE(again.counterexamples.size() == s.counterexamples.size());
    for (std::size_t i = 0; i < s.counterexamples.size(); ++i)
        CHECK(again.counterexamples[i].ordinal == s.counterexamples[i].ordinal);
}

TEST_CASE("budget is a hard cap")
{
    auto c = config(chatty_algorithm(), ModelParams::async(), 5, "none");
    const auto n = count_schedules(c);
    c.budget = n;
    CHECK(enumerate_schedules(c).schedules_explored == n);
    c.budget = n - 1;
    try
    {
        enumerate_schedules(c);
        FAIL("expected BudgetExceeded");
    }
    catch (const Error &e)
    {
        CHECK(e.code() == ErrorCode::BudgetExceeded);
    }
}

TEST_CASE("visitor sees nodes before their subtrees")
{
    auto c = config(sync_sdd_solver(), ModelParams::async(), 3, "none");
    c.inputs = {Bit::Zero};
    std::vector<std::size_t> lengths;
    std::size_t leaves = 0;
    visit_schedules(c, [&](const ExecutionPrefix &p, bool leaf) {
        lengths.push_back(p.horizon());
        leaves += leaf;
    });
    REQUIRE_FALSE(lengths.empty());
    CHECK(lengths.front() == 0);
    CHECK(leaves == count_schedules(c));
}
