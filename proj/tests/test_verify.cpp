#include <gtest/gtest.h>

#include "qv/verify.hpp"

using namespace qv;

namespace {

CheckConfig small()
{
    CheckConfig cfg;
    cfg.trials = 40;
    cfg.seed = 17;
    return cfg;
}

void expect_pass(const CheckReport& r)
{
    EXPECT_TRUE(r.passed()) << r.name << " failed " << r.failures << " of " << r.trials
                            << (r.witnesses.empty() ? std::string() : ": " + r.witnesses.front());
    EXPECT_GT(r.trials, 0u);
    // Equality cases sit at ratio 1 up to rounding.
    EXPECT_LE(r.worst_ratio, 1.0 + 1e-6);
}

} // namespace

TEST(Verify, MetricEquivalence) { expect_pass(check_metric_equivalence(small())); }
TEST(Verify, SplittingLemma)
{
    const auto r = check_splitting_lemma(small());
    expect_pass(r);
    EXPECT_GT(r.measured.at("boundary_cases"), 0.0);
}
TEST(Verify, Xi)
{
    const auto r = check_xi(small(), build_frame(2, 3));
    expect_pass(r);
    EXPECT_GT(r.measured.at("alpha"), 0.0);
}
TEST(Verify, SqrtQBound) { expect_pass(check_sqrt_Q_bound(small())); }
TEST(Verify, Poincare) { expect_pass(check_poincare(small())); }
TEST(Verify, ZetaBounds)
{
    const auto r = check_zeta_bounds(small());
    expect_pass(r);
    EXPECT_GT(r.measured.at("min_ratio"), 0.0);
    EXPECT_LE(r.measured.at("min_ratio"), 1.0 + 1e-12);
}
TEST(Verify, TruncationMonotonicity) { expect_pass(check_truncation_monotonicity(small())); }
TEST(Verify, ConeSupBound) { expect_pass(check_cone_sup_bound(small())); }

TEST(Verify, WrongMetricIsCaught)
{
    // Off by a factor on G1 only: consistent in shape, wrong in value.
    const DistanceFn bad = [](const QTuple& v, const QTuple& w, MetricKind k) {
        const double d = distance(v, w, k);
        return k == MetricKind::G1 ? 2.0 * d + 1e-3 : d;
    };
    const auto r = check_metric_equivalence(small(), bad);
    EXPECT_FALSE(r.passed());
    EXPECT_GT(r.worst_ratio, 1.0);
    EXPECT_FALSE(r.witnesses.empty());
    EXPECT_LE(r.witnesses.size(), 5u);
    EXPECT_EQ(r.witnesses.front().front(), '{');
}

TEST(Verify, Deterministic)
{
    const auto a = check_splitting_lemma(small()), b = check_splitting_lemma(small());
    EXPECT_EQ(a.worst_ratio, b.worst_ratio);
    EXPECT_EQ(a.measured, b.measured);
    CheckConfig other = small();
    other.seed = 18;
    EXPECT_NE(check_zeta_bounds(other).measured, check_zeta_bounds(small()).measured);
}

TEST(Verify, RunAllCoversEveryCheck)
{
    CheckConfig cfg = small();
    cfg.trials = 5;
    cfg.Q_range = {1, 2};
    cfg.n_range = {1, 2};
    const auto all = run_all(cfg);
    std::vector<std::string> names;
    for (const auto& r : all) {
        names.push_back(r.name);
        EXPECT_TRUE(r.passed()) << r.name;
    }
    for (const char* want : {"metric_equivalence", "splitting_lemma", "xi_n1_Q1", "xi_n2_Q2", "sqrt_Q_bound", "poincare",
                             "zeta_bounds", "truncation_monotonicity", "cone_sup_bound"})
        EXPECT_NE(std::find(names.begin(), names.end(), want), names.end()) << want;
}

TEST(Verify, ConfigValidation)
{
    CheckConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.trials = 0;
    EXPECT_THROW(cfg.validate(), InvalidInput);
    cfg = {};
    cfg.Q_range = {3, 2};
    EXPECT_THROW(cfg.validate(), InvalidInput);
    cfg = {};
    cfg.n_range = {0, 2};
    EXPECT_THROW(cfg.validate(), InvalidInput);
    cfg = {};
    cfg.m_range = {1, 4};
    EXPECT_THROW(cfg.validate(), InvalidInput);
    cfg = {};
    cfg.tolerances["xi"] = -1.0;
    EXPECT_THROW(cfg.validate(), InvalidInput);
    EXPECT_THROW(check_poincare(cfg), InvalidInput);
}

TEST(Verify, ToleranceOverride)
{
    CheckConfig cfg = small();
    cfg.tolerances["metric_equivalence"] = 0.1;
    const DistanceFn off = [](const QTuple& v, const QTuple& w, MetricKind k) {
        return distance(v, w, k) + (k == MetricKind::G2 ? 0.05 : 0.0);
    };
    EXPECT_TRUE(check_metric_equivalence(cfg, off).passed());
    cfg.tolerances["metric_equivalence"] = 0.01;
    EXPECT_FALSE(check_metric_equivalence(cfg, off).passed());
}
