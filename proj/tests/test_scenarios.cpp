#include <ppsim/scenarios.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

namespace {

using namespace ppsim;

using Scen = Scenario<double>;

void expect_all_pass(const Scen& scenario) {
    const auto report = run_scenario(scenario);
    EXPECT_TRUE(report.overall);
    ASSERT_EQ(report.entries.size(), scenario.expected.size());
    for (const auto& entry : report.entries) {
        EXPECT_TRUE(entry.pass) << scenario.name << ": " << entry.target << " expected "
                                << entry.expected << " computed " << entry.computed.real()
                                << "+" << entry.computed.imag() << "i";
    }
}

TEST(Scenarios, ThreeBoxAllChecksPass) { expect_all_pass(three_box<double>()); }

TEST(Scenarios, MerminNonetVariantAPasses) { expect_all_pass(mermin_nonet<double>('a')); }

TEST(Scenarios, MerminNonetVariantBPasses) { expect_all_pass(mermin_nonet<double>('b')); }

TEST(Scenarios, EprAncillaPasses) { expect_all_pass(epr_ancilla<double>()); }

TEST(Scenarios, GhzPasses) { expect_all_pass(ghz<double>()); }

TEST(Scenarios, OverlapsMatchTheClosedForms) {
    EXPECT_NEAR(std::abs(three_box<double>().pps.overlap()), 1.0 / 3.0, 1e-12);
    const auto nonet_a = mermin_nonet<double>('a');
    EXPECT_NEAR(std::abs(nonet_a.pps.overlap()), 0.5, 1e-12);
    EXPECT_NEAR(nonet_a.pps.overlap().imag(), -0.5, 1e-12);
    const auto nonet_b = mermin_nonet<double>('b');
    EXPECT_NEAR(nonet_b.pps.overlap().real(), 0.5, 1e-12);
    EXPECT_NEAR(epr_ancilla<double>().pps.overlap().real(), -0.5, 1e-12);
    EXPECT_NEAR(ghz<double>().pps.overlap().real(), 0.5, 1e-12);
    for (const auto& name : scenario_names()) {
        EXPECT_GT(std::abs(make_scenario<double>(name).pps.overlap()), 0.1) << name;
    }
}

TEST(Scenarios, CorruptedExpectedValueFailsWithErrorMagnitude) {
    auto scenario = three_box<double>();
    scenario.expected[2].expected += 0.5;  // (P_A)_w is 1, claim 1.5
    const auto report = run_scenario(scenario);
    EXPECT_FALSE(report.overall);
    EXPECT_FALSE(report.entries[2].pass);
    EXPECT_NEAR(report.entries[2].error, 0.5, 1e-12);
    // The untouched entries still pass.
    EXPECT_TRUE(report.entries[0].pass);
    EXPECT_TRUE(report.entries[1].pass);
}

TEST(Scenarios, DefiniteChecksAgreeWithWeakValues) {
    for (const auto& name : scenario_names()) {
        const auto scenario = make_scenario<double>(name);
        for (const auto& check : scenario.expected) {
            if (check.kind != CheckKind::definite) {
                continue;
            }
            const auto& obs = scenario.observable(check.observables[0]);
            const auto certain = is_definite(scenario.pps, obs);
            ASSERT_TRUE(certain.has_value()) << name << ": " << check.target;
            const auto wv = weak_value(scenario.pps, obs);
            EXPECT_NEAR(wv.real(), *certain, 1e-12) << name << ": " << check.target;
            EXPECT_NEAR(wv.imag(), 0.0, 1e-12) << name << ": " << check.target;
        }
    }
}

TEST(Scenarios, NonetOccupationsAtTightTolerance) {
    const auto scenario = mermin_nonet<double>('a');
    const std::vector<std::pair<std::string, double>> occupations = {
        {"N++", 0.5}, {"N+-", 0.5}, {"N-+", 0.5}, {"N--", -0.5}};
    std::complex<double> sum(0, 0);
    for (const auto& [name, value] : occupations) {
        const auto wv = weak_value(scenario.pps, scenario.observable(name));
        EXPECT_NEAR(wv.real(), value, 1e-12) << name;
        EXPECT_NEAR(wv.imag(), 0.0, 1e-12) << name;
        sum += wv;
    }
    EXPECT_NEAR(sum.real(), 1.0, 1e-12);
    EXPECT_NEAR(sum.imag(), 0.0, 1e-12);
}

TEST(Scenarios, EprWeakValuesAtTightTolerance) {
    const auto scenario = epr_ancilla<double>();
    const std::vector<std::pair<std::string, double>> values = {
        {"Z1", -1.0}, {"F1", -1.0}, {"F1Z1", -1.0}, {"X1F0", 1.0}, {"N++", -0.5}};
    for (const auto& [name, value] : values) {
        const auto wv = weak_value(scenario.pps, scenario.observable(name));
        EXPECT_NEAR(wv.real(), value, 1e-12) << name;
        EXPECT_NEAR(wv.imag(), 0.0, 1e-12) << name;
    }
}

TEST(Scenarios, EprProductRuleAuditFlagsViolation) {
    const auto scenario = epr_ancilla<double>();
    const auto audit = product_rule_audit(scenario.pps, scenario.observable("Z1"),
                                          scenario.observable("F1"));
    EXPECT_TRUE(audit.violation);
    // (Z1)_w (F1)_w = +1 but (F1 Z1)_w = -1.
    EXPECT_NEAR((audit.a_w * audit.b_w).real(), 1.0, 1e-12);
    EXPECT_NEAR(audit.ab_w.real(), -1.0, 1e-12);
}

TEST(Scenarios, GhzValuesAtTightTolerance) {
    const auto scenario = ghz<double>();
    for (const char* name : {"Y1Y2", "Y2Y3", "Y1Y3"}) {
        const auto wv = weak_value(scenario.pps, scenario.observable(name));
        EXPECT_NEAR(wv.real(), -1.0, 1e-12) << name;
        EXPECT_NEAR(wv.imag(), 0.0, 1e-12) << name;
    }
    std::complex<double> sum(0, 0);
    for (const char* name :
         {"N+++", "N++-", "N+-+", "N+--", "N-++", "N-+-", "N--+", "N---"}) {
        const auto wv = weak_value(scenario.pps, scenario.observable(name));
        const bool uniform = std::string(name) == "N+++" || std::string(name) == "N---";
        EXPECT_NEAR(wv.real(), uniform ? -0.25 : 0.25, 1e-12) << name;
        EXPECT_NEAR(wv.imag(), 0.0, 1e-12) << name;
        sum += wv;
    }
    EXPECT_NEAR(sum.real(), 1.0, 1e-12);
}

TEST(Scenarios, ThreeBoxValuesAtTightTolerance) {
    const auto scenario = three_box<double>();
    const auto dist_a = abl(scenario.pps, scenario.observable("P_A"));
    const auto dist_b = abl(scenario.pps, scenario.observable("P_B"));
    EXPECT_NEAR(dist_a.probability_of({1.0}), 1.0, 1e-12);
    EXPECT_NEAR(dist_b.probability_of({1.0}), 1.0, 1e-12);
    const std::vector<std::pair<std::string, double>> weaks = {
        {"P_A", 1.0}, {"P_B", 1.0}, {"P_C", -1.0}};
    for (const auto& [name, value] : weaks) {
        const auto wv = weak_value(scenario.pps, scenario.observable(name));
        EXPECT_NEAR(wv.real(), value, 1e-12) << name;
        EXPECT_NEAR(wv.imag(), 0.0, 1e-12) << name;
    }
}

TEST(Scenarios, RegistryRoundTrip) {
    const auto names = scenario_names();
    ASSERT_EQ(names.size(), 5u);
    for (const auto& name : names) {
        EXPECT_EQ(make_scenario<double>(name).name, name);
    }
    EXPECT_THROW(make_scenario<double>("nope"), std::invalid_argument);
    EXPECT_THROW(mermin_nonet<double>('c'), std::invalid_argument);
    EXPECT_THROW(three_box<double>().observable("missing"), std::invalid_argument);
    EXPECT_THROW(builtin_table<double>("missing"), std::invalid_argument);
}

TEST(Scenarios, ReportSerializesToJson) {
    const auto report = run_scenario(three_box<double>());
    const auto j = to_json(report);
    EXPECT_EQ(j.at("scenario"), "three_box");
    EXPECT_TRUE(j.at("overall").get<bool>());
    const auto& entries = j.at("entries");
    ASSERT_TRUE(entries.is_array());
    ASSERT_EQ(entries.size(), report.entries.size());
    for (const auto& e : entries) {
        EXPECT_TRUE(e.contains("kind"));
        EXPECT_TRUE(e.contains("target"));
        EXPECT_TRUE(e.contains("expected"));
        EXPECT_TRUE(e.contains("computed"));
        EXPECT_TRUE(e.contains("error"));
        EXPECT_TRUE(e.contains("pass"));
        if (e.at("kind") == "weak") {
            EXPECT_TRUE(e.at("computed").contains("re"));
            EXPECT_TRUE(e.at("computed").contains("im"));
        }
    }
    // Round trip: dump, reparse, compare.
    const auto reparsed = nlohmann::json::parse(j.dump());
    EXPECT_EQ(reparsed, j);
}

}  // namespace
