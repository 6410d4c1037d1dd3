#pragma once

// Canonical scenario registry: each scenario binds a named pre/post-selected
// experiment to its states, observable dictionary, and expected results, so
// the same golden data drives the test suite, the CLI, and the reports.
//
//   * three_box        one particle in three boxes; both P_A and P_B certain,
//                      weak values (1, 1, -1)
//   * mermin_nonet     two spins, the nine square observables; eight certain
//                      +1 outcomes, the ninth product forced opposite
//   * epr_ancilla      EPR pair as system + measuring-device ancilla; weak
//                      values -1 with a product-rule violation
//   * ghz              three spins; pairwise y-products -1, negative triplet
//                      occupations, and the unsatisfiable assignment table
//   * run_scenario     evaluates every expected entry via the generic
//                      operations and reports computed-vs-expected per entry
//
// ScenarioReport serializes to JSON as
// {scenario, entries: [{kind, target, expected, computed, error, pass}],
//  overall}.

#include <ppsim/contextuality.hpp>
#include <ppsim/pps.hpp>

#include <json.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ppsim {

enum class CheckKind { abl, weak, definite, sequential, search };

inline const char* check_kind_name(CheckKind kind) {
    switch (kind) {
        case CheckKind::abl: return "abl";
        case CheckKind::weak: return "weak";
        case CheckKind::definite: return "definite";
        case CheckKind::sequential: return "sequential";
        case CheckKind::search: return "search";
    }
    return "unknown";
}

// One expected result. The payload depends on the kind:
//   abl         observables = {name}, outcomes = {a}: Prob(a) should equal
//               `expected`
//   weak        observables = one or more names; the sum of their weak values
//               should equal `expected` (sums exercise weak-value linearity)
//   definite    observables = {name}: the outcome is certain and equals
//               `expected`
//   sequential  observables = ordered chain; outcomes are per-measurement
//               labels, or a single product value when `product_outcome` is
//               set; the probability should equal `expected`
//   search      target names a built-in context table; the number of
//               noncontextual assignments should equal `expected`
template <typename T = double>
struct Check {
    CheckKind kind;
    std::string target;
    std::vector<std::string> observables;
    std::vector<T> outcomes;
    bool product_outcome = false;
    T expected = T(0);
};

template <typename T = double>
struct Scenario {
    std::string name;
    PPSEnsemble<T> pps;
    std::vector<SpectralObservable<T>> observables;
    std::vector<Check<T>> expected;

    const SpectralObservable<T>& observable(const std::string& obs_name) const {
        for (const auto& obs : observables) {
            if (obs.name() == obs_name) {
                return obs;
            }
        }
        throw std::invalid_argument("scenario '" + name + "': unknown observable '" + obs_name +
                                    "'");
    }
};

template <typename T = double>
struct ReportEntry {
    std::string kind;
    std::string target;
    T expected = T(0);
    complex_t<T> computed{};
    T error = T(0);
    bool pass = false;
};

template <typename T = double>
struct ScenarioReport {
    std::string scenario;
    std::vector<ReportEntry<T>> entries;
    bool overall = false;
};

// Built-in context tables addressable from scenario search checks and the
// command line.
template <typename T = double>
ContextTable<T> builtin_table(const std::string& name) {
    if (name == "mermin_square") {
        return mermin_square_table<T>();
    }
    if (name == "ghz") {
        return ghz_table<T>();
    }
    throw std::invalid_argument("unknown built-in table '" + name + "'");
}

inline std::vector<std::string> builtin_table_names() { return {"mermin_square", "ghz"}; }

namespace detail {

template <typename T>
Check<T> abl_check(const std::string& obs, T outcome, T expected) {
    Check<T> c;
    c.kind = CheckKind::abl;
    c.target = "Prob(" + obs + "=" + (outcome < T(0) ? "-1" : std::to_string(int(outcome))) + ")";
    c.observables = {obs};
    c.outcomes = {outcome};
    c.expected = expected;
    return c;
}

template <typename T>
Check<T> weak_check(std::vector<std::string> obs, T expected) {
    Check<T> c;
    c.kind = CheckKind::weak;
    std::string label = "(";
    for (std::size_t i = 0; i < obs.size(); ++i) {
        label += obs[i];
        if (i + 1 < obs.size()) {
            label += "+";
        }
    }
    c.target = label + ")_w";
    c.observables = std::move(obs);
    c.expected = expected;
    return c;
}

template <typename T>
Check<T> definite_check(const std::string& obs, T expected) {
    Check<T> c;
    c.kind = CheckKind::definite;
    c.target = "definite(" + obs + ")";
    c.observables = {obs};
    c.expected = expected;
    return c;
}

template <typename T>
Check<T> sequential_check(std::vector<std::string> chain, std::vector<T> outcomes,
                          bool product_outcome, T expected) {
    Check<T> c;
    c.kind = CheckKind::sequential;
    std::string label = product_outcome ? "Prob(product[" : "Prob(joint[";
    for (std::size_t i = 0; i < chain.size(); ++i) {
        label += chain[i];
        if (i + 1 < chain.size()) {
            label += ",";
        }
    }
    label += "]=";
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        label += outcomes[i] < T(0) ? "-1" : "+1";
        if (i + 1 < outcomes.size()) {
            label += ",";
        }
    }
    c.target = label + ")";
    c.observables = std::move(chain);
    c.outcomes = std::move(outcomes);
    c.product_outcome = product_outcome;
    c.expected = expected;
    return c;
}

template <typename T>
Check<T> search_check(const std::string& table, T expected_count) {
    Check<T> c;
    c.kind = CheckKind::search;
    c.target = "assignments(" + table + ")";
    c.observables = {table};
    c.expected = expected_count;
    return c;
}

// Joint-eigenspace projector observable Pi_a(first) * Pi_b(second) for two
// commuting +/-1 observables.
template <typename T>
SpectralObservable<T> occupation(const std::string& name, const SpectralObservable<T>& first,
                                 T a, const SpectralObservable<T>& second, T b) {
    const Matrix<T> proj = (first.projector(a) * second.projector(b)).eval();
    return projector_observable<T>(name, proj);
}

}  // namespace detail

// One particle in three boxes: pre (|A>+|B>+|C>)/sqrt(3), post
// (|A>+|B>-|C>)/sqrt(3). Opening box A (or B) alone finds the particle with
// certainty; the weak values are (1, 1, -1); measuring both P_A and P_B in
// sequence never finds (1,1) even though the projectors commute.
template <typename T = double>
Scenario<T> three_box() {
    Vector<T> pre(3), post(3);
    pre << complex_t<T>(1), complex_t<T>(1), complex_t<T>(1);
    post << complex_t<T>(1), complex_t<T>(1), complex_t<T>(-1);
    std::vector<SpectralObservable<T>> obs;
    for (int box = 0; box < 3; ++box) {
        Matrix<T> p = Matrix<T>::Zero(3, 3);
        p(box, box) = T(1);
        obs.push_back(projector_observable<T>(std::string("P_") + char('A' + box), p));
    }
    std::vector<Check<T>> expected = {
        detail::abl_check<T>("P_A", T(1), T(1)),
        detail::abl_check<T>("P_B", T(1), T(1)),
        detail::weak_check<T>({"P_A"}, T(1)),
        detail::weak_check<T>({"P_B"}, T(1)),
        detail::weak_check<T>({"P_C"}, T(-1)),
        detail::weak_check<T>({"P_A", "P_B", "P_C"}, T(1)),
        detail::sequential_check<T>({"P_A", "P_B"}, {T(1), T(1)}, false, T(0)),
    };
    return Scenario<T>{"three_box",
                       PPSEnsemble<T>(StateVector<T>(pre), StateVector<T>(post)),
                       std::move(obs), std::move(expected)};
}

// Two spins with the nine square observables. Variant a: pre x-up on both
// spins, post y-up on both. Variant b: pre x-up(1), y-up(2); post y-up(1),
// x-up(2). Eight of the nine observables have certain outcome +1; the ninth,
// z1 z2 — operator product of the two certain crossing pairs — is forced to
// the opposite eigenvalue -1 in variant a (+1 in variant b). Ascertaining it
// as one ideal measurement of the product observable gives -1 with
// probability 1; the four crossing single-spin measurements in sequence
// interfere instead (their middle outcomes are uniform), which is why the
// certainty belongs to the product operator and not the outcome-by-outcome
// chain.
template <typename T = double>
Scenario<T> mermin_nonet(char variant) {
    if (variant != 'a' && variant != 'b') {
        throw std::invalid_argument("mermin_nonet: variant must be 'a' or 'b'");
    }
    const StateVector<T> up_x = qubit_up_x<T>();
    const StateVector<T> up_y = qubit_up_y<T>();
    const StateVector<T> pre = variant == 'a' ? kron(up_x, up_x) : kron(up_x, up_y);
    const StateVector<T> post = variant == 'a' ? kron(up_y, up_y) : kron(up_y, up_x);

    std::vector<SpectralObservable<T>> obs;
    obs.push_back(pauli_string<T>({{0, Axis::x}}, 2, "X1"));
    obs.push_back(pauli_string<T>({{1, Axis::x}}, 2, "X2"));
    obs.push_back(pauli_string<T>({{0, Axis::y}}, 2, "Y1"));
    obs.push_back(pauli_string<T>({{1, Axis::y}}, 2, "Y2"));
    obs.push_back(pauli_string<T>({{0, Axis::x}, {1, Axis::x}}, 2, "X1X2"));
    obs.push_back(pauli_string<T>({{0, Axis::y}, {1, Axis::y}}, 2, "Y1Y2"));
    obs.push_back(pauli_string<T>({{0, Axis::x}, {1, Axis::y}}, 2, "X1Y2"));
    obs.push_back(pauli_string<T>({{0, Axis::y}, {1, Axis::x}}, 2, "Y1X2"));
    obs.push_back(pauli_string<T>({{0, Axis::z}, {1, Axis::z}}, 2, "Z1Z2"));

    // The crossing pair S13 = x1 y2, S23 = y1 x2 and their operator product
    // (equal to z1 z2), measured as a single observable.
    const auto& s13 = obs[6];
    const auto& s23 = obs[7];
    const Matrix<T> product_op = (s13.op() * s23.op()).eval();
    const Matrix<T> eye = identity<T>(4);
    obs.push_back(SpectralObservable<T>(
        "S13*S23", product_op,
        {{T(1), ((eye + product_op) / T(2)).eval()},
         {T(-1), ((eye - product_op) / T(2)).eval()}}));
    obs.push_back(detail::occupation<T>("N++", s13, T(1), s23, T(1)));
    obs.push_back(detail::occupation<T>("N+-", s13, T(1), s23, T(-1)));
    obs.push_back(detail::occupation<T>("N-+", s13, T(-1), s23, T(1)));
    obs.push_back(detail::occupation<T>("N--", s13, T(-1), s23, T(-1)));

    std::vector<Check<T>> expected;
    for (const char* name :
         {"X1", "X2", "Y1", "Y2", "X1X2", "Y1Y2", "X1Y2", "Y1X2"}) {
        expected.push_back(detail::definite_check<T>(name, T(1)));
    }
    if (variant == 'a') {
        expected.push_back(detail::definite_check<T>("Z1Z2", T(-1)));
        expected.push_back(detail::weak_check<T>({"Z1Z2"}, T(-1)));
        expected.push_back(
            detail::sequential_check<T>({"S13*S23"}, {T(-1)}, true, T(1)));
        expected.push_back(detail::weak_check<T>({"N++"}, T(0.5)));
        expected.push_back(detail::weak_check<T>({"N+-"}, T(0.5)));
        expected.push_back(detail::weak_check<T>({"N-+"}, T(0.5)));
        expected.push_back(detail::weak_check<T>({"N--"}, T(-0.5)));
        expected.push_back(
            detail::weak_check<T>({"N++", "N+-", "N-+", "N--"}, T(1)));
    } else {
        expected.push_back(detail::definite_check<T>("Z1Z2", T(1)));
        expected.push_back(detail::weak_check<T>({"Z1Z2"}, T(1)));
    }
    return Scenario<T>{variant == 'a' ? "mermin_nonet_a" : "mermin_nonet_b",
                       PPSEnsemble<T>(pre, post), std::move(obs), std::move(expected)};
}

// EPR pair recast as system spin (site 0) plus measuring-device ancilla
// (site 1, pointer observables f0 = z, f1 = x). Pre is the singlet in the
// z (x) f0 basis; post selects x-up on the system and f0 = +1. Weak values of
// z1, f1, and their product are all -1 — the product rule fails — and the
// (z1, f1) box occupations are (-1/2, 1/2, 1/2, 1/2).
template <typename T = double>
Scenario<T> epr_ancilla() {
    Vector<T> pre = Vector<T>::Zero(4);
    pre[1] = complex_t<T>(1);
    pre[2] = complex_t<T>(-1);
    Vector<T> post = Vector<T>::Zero(4);
    post[0] = complex_t<T>(1);
    post[2] = complex_t<T>(1);

    std::vector<SpectralObservable<T>> obs;
    obs.push_back(pauli_string<T>({{0, Axis::z}}, 2, "Z1"));
    obs.push_back(pauli_string<T>({{1, Axis::z}}, 2, "F0"));
    obs.push_back(pauli_string<T>({{1, Axis::x}}, 2, "F1"));
    obs.push_back(pauli_string<T>({{0, Axis::z}, {1, Axis::x}}, 2, "F1Z1"));
    obs.push_back(pauli_string<T>({{0, Axis::x}, {1, Axis::z}}, 2, "X1F0"));
    const auto& z1 = obs[0];
    const auto& f1 = obs[2];
    obs.push_back(detail::occupation<T>("N++", z1, T(1), f1, T(1)));
    obs.push_back(detail::occupation<T>("N+-", z1, T(1), f1, T(-1)));
    obs.push_back(detail::occupation<T>("N-+", z1, T(-1), f1, T(1)));
    obs.push_back(detail::occupation<T>("N--", z1, T(-1), f1, T(-1)));

    std::vector<Check<T>> expected = {
        detail::weak_check<T>({"Z1"}, T(-1)),
        detail::weak_check<T>({"F1"}, T(-1)),
        detail::weak_check<T>({"F1Z1"}, T(-1)),
        detail::weak_check<T>({"X1F0"}, T(1)),
        detail::weak_check<T>({"N++"}, T(-0.5)),
        detail::weak_check<T>({"N+-"}, T(0.5)),
        detail::weak_check<T>({"N-+"}, T(0.5)),
        detail::weak_check<T>({"N--"}, T(0.5)),
        detail::weak_check<T>({"N++", "N+-", "N-+", "N--"}, T(1)),
    };
    return Scenario<T>{"epr_ancilla",
                       PPSEnsemble<T>(StateVector<T>(pre, {2, 2}), StateVector<T>(post, {2, 2})),
                       std::move(obs), std::move(expected)};
}

// Three spins in (|up up up> - |down down down>)/sqrt(2), all post-selected
// x-down. Every pairwise y-product has weak value -1, so no two spins'
// y-boxes can be jointly occupied; the all-plus and all-minus triplet
// occupations are -1/4 and the six mixed ones +1/4. No noncontextual
// assignment reproduces the four definite x/y products (search count 0).
template <typename T = double>
Scenario<T> ghz() {
    Vector<T> pre = Vector<T>::Zero(8);
    pre[0] = complex_t<T>(1);
    pre[7] = complex_t<T>(-1);
    const StateVector<T> down_x = qubit_down_x<T>();
    const StateVector<T> post = kron(kron(down_x, down_x), down_x);

    std::vector<SpectralObservable<T>> obs;
    obs.push_back(pauli_string<T>({{0, Axis::y}}, 3, "Y1"));
    obs.push_back(pauli_string<T>({{1, Axis::y}}, 3, "Y2"));
    obs.push_back(pauli_string<T>({{2, Axis::y}}, 3, "Y3"));
    obs.push_back(pauli_string<T>({{0, Axis::y}, {1, Axis::y}}, 3, "Y1Y2"));
    obs.push_back(pauli_string<T>({{1, Axis::y}, {2, Axis::y}}, 3, "Y2Y3"));
    obs.push_back(pauli_string<T>({{0, Axis::y}, {2, Axis::y}}, 3, "Y1Y3"));
    const auto& y1 = obs[0];
    const auto& y2 = obs[1];
    const auto& y3 = obs[2];
    const auto sign_name = [](T s) { return s > T(0) ? "+" : "-"; };
    std::vector<std::string> occupation_names;
    for (T s1 : {T(1), T(-1)}) {
        for (T s2 : {T(1), T(-1)}) {
            for (T s3 : {T(1), T(-1)}) {
                const std::string name =
                    std::string("N") + sign_name(s1) + sign_name(s2) + sign_name(s3);
                const Matrix<T> proj =
                    (y1.projector(s1) * y2.projector(s2) * y3.projector(s3)).eval();
                obs.push_back(projector_observable<T>(name, proj));
                occupation_names.push_back(name);
            }
        }
    }

    std::vector<Check<T>> expected = {
        detail::weak_check<T>({"Y2Y3"}, T(-1)),
        detail::weak_check<T>({"Y1Y2"}, T(-1)),
        detail::weak_check<T>({"Y1Y3"}, T(-1)),
    };
    for (const auto& name : occupation_names) {
        const bool uniform = name == "N+++" || name == "N---";
        expected.push_back(detail::weak_check<T>({name}, uniform ? T(-0.25) : T(0.25)));
    }
    std::vector<std::string> all_occupations = occupation_names;
    expected.push_back(detail::weak_check<T>(std::move(all_occupations), T(1)));
    expected.push_back(detail::search_check<T>("ghz", T(0)));
    return Scenario<T>{"ghz",
                       PPSEnsemble<T>(StateVector<T>(pre, {2, 2, 2}), post),
                       std::move(obs), std::move(expected)};
}

inline std::vector<std::string> scenario_names() {
    return {"three_box", "mermin_nonet_a", "mermin_nonet_b", "epr_ancilla", "ghz"};
}

template <typename T = double>
Scenario<T> make_scenario(const std::string& name) {
    if (name == "three_box") {
        return three_box<T>();
    }
    if (name == "mermin_nonet_a") {
        return mermin_nonet<T>('a');
    }
    if (name == "mermin_nonet_b") {
        return mermin_nonet<T>('b');
    }
    if (name == "epr_ancilla") {
        return epr_ancilla<T>();
    }
    if (name == "ghz") {
        return ghz<T>();
    }
    throw std::invalid_argument("unknown scenario '" + name + "'");
}

// Evaluates every expected entry through the generic operations. An entry
// passes when |computed - expected| <= tol.
template <typename T>
ScenarioReport<T> run_scenario(const Scenario<T>& scenario, T tol = T(1e-9)) {
    ScenarioReport<T> report;
    report.scenario = scenario.name;
    report.overall = true;
    for (const auto& check : scenario.expected) {
        ReportEntry<T> entry;
        entry.kind = check_kind_name(check.kind);
        entry.target = check.target;
        entry.expected = check.expected;
        switch (check.kind) {
            case CheckKind::abl: {
                const auto dist = abl(scenario.pps, scenario.observable(check.observables[0]));
                entry.computed = dist.probability_of({check.outcomes[0]});
                break;
            }
            case CheckKind::weak: {
                complex_t<T> sum(0, 0);
                for (const auto& name : check.observables) {
                    sum += weak_value(scenario.pps, scenario.observable(name));
                }
                entry.computed = sum;
                break;
            }
            case CheckKind::definite: {
                const auto value =
                    is_definite(scenario.pps, scenario.observable(check.observables[0]));
                entry.computed = value ? complex_t<T>(*value)
                                       : complex_t<T>(std::numeric_limits<T>::quiet_NaN());
                break;
            }
            case CheckKind::sequential: {
                std::vector<SpectralObservable<T>> chain;
                for (const auto& name : check.observables) {
                    chain.push_back(scenario.observable(name));
                }
                const auto dist = sequential_distribution(scenario.pps, chain);
                entry.computed = check.product_outcome
                                     ? dist.product_marginal().probability_of(check.outcomes)
                                     : dist.probability_of(check.outcomes);
                break;
            }
            case CheckKind::search: {
                const auto table = builtin_table<T>(check.observables[0]);
                entry.computed =
                    complex_t<T>(static_cast<T>(search_assignments(table).size()));
                break;
            }
        }
        entry.error = std::abs(entry.computed - complex_t<T>(check.expected));
        entry.pass = std::isfinite(entry.error) && entry.error <= tol;
        report.overall = report.overall && entry.pass;
        report.entries.push_back(std::move(entry));
    }
    return report;
}

template <typename T>
nlohmann::json to_json(const ScenarioReport<T>& report) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : report.entries) {
        nlohmann::json computed;
        if (e.kind == "weak") {
            computed = {{"re", e.computed.real()}, {"im", e.computed.imag()}};
        } else if (std::isfinite(e.computed.real())) {
            computed = e.computed.real();
        } else {
            computed = nullptr;
        }
        entries.push_back({{"kind", e.kind},
                           {"target", e.target},
                           {"expected", e.expected},
                           {"computed", computed},
                           {"error", std::isfinite(e.error) ? nlohmann::json(e.error)
                                                            : nlohmann::json()},
                           {"pass", e.pass}});
    }
    return {{"scenario", report.scenario}, {"entries", entries}, {"overall", report.overall}};
}

}  // namespace ppsim
