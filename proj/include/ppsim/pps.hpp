#pragma once

// Pre/post-selection core. A PPSEnsemble pairs a pre-selected state with a
// post-selected state (intermediate evolution is the identity; callers who
// need a Hamiltonian can pre-evolve the states). On top of it:
//
//   * abl                        conditional probabilities of an ideal
//                                intermediate measurement,
//                                Prob(a) = |<post|P_a|pre>|^2 / sum_a' |...|^2
//   * weak_value                 <post|A|pre> / <post|pre>
//   * is_definite                detects outcomes that are certain given the
//                                pre- and post-selection; for those the weak
//                                value equals the certain eigenvalue
//   * sequential_distribution    joint outcome statistics of an ordered chain
//                                of ideal measurements,
//                                Prob(b1..bn) ~ |<post|P_bn...P_b1|pre>|^2
//   * product_rule_audit         checks (AB)_w against (A)_w (B)_w for
//                                commuting A, B
//   * expectation_decomposition  rebuilds <pre|A|pre> from post-selected weak
//                                values over a complete orthonormal basis

#include <ppsim/hilbert.hpp>

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ppsim {

// Pairs with |<post|pre>| below this are rejected at construction: weak
// values diverge as the overlap vanishes, so near-orthogonal selections are
// an input error rather than a silent source of huge numbers.
template <typename T>
inline constexpr T eps_overlap = T(1e-8);

template <typename T = double>
class PPSEnsemble {
  public:
    PPSEnsemble(StateVector<T> pre, StateVector<T> post, T min_overlap = eps_overlap<T>)
        : pre_(std::move(pre)), post_(std::move(post)), overlap_(inner(post_, pre_)) {
        if (pre_.dim() != post_.dim()) {
            throw std::invalid_argument("PPSEnsemble: pre/post dimension mismatch");
        }
        if (!(std::abs(overlap_) > min_overlap)) {
            throw std::invalid_argument("PPSEnsemble: pre and post states are (nearly) orthogonal");
        }
    }

    const StateVector<T>& pre() const { return pre_; }
    const StateVector<T>& post() const { return post_; }
    complex_t<T> overlap() const { return overlap_; }
    int dim() const { return pre_.dim(); }

  private:
    StateVector<T> pre_;
    StateVector<T> post_;
    complex_t<T> overlap_;
};

// One outcome (a tuple of eigenvalues, one per measured observable) and its
// conditional probability.
template <typename T = double>
struct OutcomeEntry {
    std::vector<T> labels;
    T probability;
};

// A normalized distribution over measurement outcomes. Probabilities may
// carry tiny negative rounding (>= -1e-12) and must sum to 1 within 1e-10.
template <typename T = double>
class OutcomeDistribution {
  public:
    explicit OutcomeDistribution(std::vector<OutcomeEntry<T>> entries)
        : entries_(std::move(entries)) {
        if (entries_.empty()) {
            throw std::invalid_argument("OutcomeDistribution: no entries");
        }
        T sum = T(0);
        for (const auto& e : entries_) {
            if (!std::isfinite(e.probability) || e.probability < T(-1e-12)) {
                throw std::invalid_argument("OutcomeDistribution: invalid probability");
            }
            sum += e.probability;
        }
        if (std::abs(sum - T(1)) > T(1e-10)) {
            throw std::invalid_argument("OutcomeDistribution: probabilities do not sum to 1");
        }
    }

    const std::vector<OutcomeEntry<T>>& entries() const { return entries_; }

    // Probability of the exact outcome tuple `labels` (0 if absent).
    T probability_of(const std::vector<T>& labels, T tol = T(1e-9)) const {
        for (const auto& e : entries_) {
            if (e.labels.size() != labels.size()) {
                continue;
            }
            bool match = true;
            for (std::size_t i = 0; i < labels.size(); ++i) {
                if (std::abs(e.labels[i] - labels[i]) > tol) {
                    match = false;
                    break;
                }
            }
            if (match) {
                return e.probability;
            }
        }
        return T(0);
    }

    // Derived statistic: the distribution of the product of the outcomes in
    // each tuple (the quantity the sequential-measurement arguments reason
    // about).
    OutcomeDistribution<T> product_marginal(T tol = T(1e-9)) const {
        std::vector<OutcomeEntry<T>> merged;
        for (const auto& e : entries_) {
            T prod = T(1);
            for (T v : e.labels) {
                prod *= v;
            }
            bool found = false;
            for (auto& m : merged) {
                if (std::abs(m.labels[0] - prod) <= tol) {
                    m.probability += e.probability;
                    found = true;
                    break;
                }
            }
            if (!found) {
                merged.push_back({{prod}, e.probability});
            }
        }
        return OutcomeDistribution<T>(std::move(merged));
    }

  private:
    std::vector<OutcomeEntry<T>> entries_;
};

// Conditional probability of each outcome of one ideal intermediate
// measurement, given the pre- and post-selection.
template <typename T>
OutcomeDistribution<T> abl(const PPSEnsemble<T>& pps, const SpectralObservable<T>& obs) {
    if (obs.dim() != pps.dim()) {
        throw std::invalid_argument("abl: observable dimension mismatch");
    }
    std::vector<OutcomeEntry<T>> entries;
    T total = T(0);
    for (const auto& [eig, proj] : obs.spectrum()) {
        const complex_t<T> amp = pps.post().amps().dot((proj * pps.pre().amps()).eval());
        const T w = std::norm(amp);
        entries.push_back({{eig}, w});
        total += w;
    }
    if (!(total > T(0))) {
        // Unreachable for a valid ensemble (the amplitudes sum to the nonzero
        // overlap); kept as a defensive guard.
        throw std::runtime_error("abl: inconsistent PPS/observable");
    }
    for (auto& e : entries) {
        e.probability /= total;
    }
    return OutcomeDistribution<T>(std::move(entries));
}

// <post|A|pre> / <post|pre>. Complex in general; every definite outcome makes
// it equal to the certain eigenvalue (see is_definite).
template <typename T>
complex_t<T> weak_value(const PPSEnsemble<T>& pps, const Matrix<T>& op) {
    if (op.rows() != pps.dim() || op.cols() != pps.dim()) {
        throw std::invalid_argument("weak_value: operator dimension mismatch");
    }
    if (!(std::abs(pps.overlap()) > T(0))) {
        throw std::invalid_argument("weak_value: vanishing pre/post overlap");
    }
    const complex_t<T> num = pps.post().amps().dot((op * pps.pre().amps()).eval());
    return num / pps.overlap();
}

template <typename T>
complex_t<T> weak_value(const PPSEnsemble<T>& pps, const SpectralObservable<T>& obs) {
    return weak_value(pps, obs.op());
}

// If some outcome of `obs` is certain (ABL probability > 1 - tol), returns
// its eigenvalue; otherwise empty. Whenever this returns a value, the weak
// value of `obs` equals it.
template <typename T>
std::optional<T> is_definite(const PPSEnsemble<T>& pps, const SpectralObservable<T>& obs,
                             T tol = T(1e-9)) {
    const OutcomeDistribution<T> dist = abl(pps, obs);
    for (const auto& e : dist.entries()) {
        if (e.probability > T(1) - tol) {
            return e.labels[0];
        }
    }
    return std::nullopt;
}

// Joint statistics of an ordered chain of ideal measurements between the
// selections: Prob(b1,..,bn) ~ |<post| P_bn ... P_b1 |pre>|^2, normalized
// over all outcome tuples. Labels are listed in measurement order. A chain of
// one observable reduces exactly to abl.
template <typename T>
OutcomeDistribution<T> sequential_distribution(const PPSEnsemble<T>& pps,
                                               const std::vector<SpectralObservable<T>>& chain) {
    if (chain.empty()) {
        throw std::invalid_argument("sequential_distribution: empty chain");
    }
    for (const auto& obs : chain) {
        if (obs.dim() != pps.dim()) {
            throw std::invalid_argument("sequential_distribution: observable dimension mismatch");
        }
    }
    std::vector<OutcomeEntry<T>> entries;
    T total = T(0);
    std::vector<std::size_t> index(chain.size(), 0);
    for (;;) {
        Vector<T> v = pps.pre().amps();
        std::vector<T> labels;
        labels.reserve(chain.size());
        for (std::size_t k = 0; k < chain.size(); ++k) {
            const auto& [eig, proj] = chain[k].spectrum()[index[k]];
            labels.push_back(eig);
            v = proj * v;
        }
        const complex_t<T> amp = pps.post().amps().dot(v);
        const T w = std::norm(amp);
        entries.push_back({std::move(labels), w});
        total += w;
        // Odometer over spectrum indices, last observable fastest.
        std::size_t k = chain.size();
        bool done = false;
        for (;;) {
            if (k == 0) {
                done = true;  // every position wrapped: enumeration finished
                break;
            }
            --k;
            if (++index[k] < chain[k].spectrum().size()) {
                break;
            }
            index[k] = 0;
        }
        if (done) {
            break;
        }
    }
    if (!(total > T(0))) {
        // Unreachable for a valid ensemble; see abl.
        throw std::runtime_error("sequential_distribution: inconsistent PPS/chain");
    }
    for (auto& e : entries) {
        e.probability /= total;
    }
    return OutcomeDistribution<T>(std::move(entries));
}

// Result of checking the product rule (AB)_w = (A)_w (B)_w for a commuting
// pair, together with the joint sequential statistics of measuring A then B.
template <typename T = double>
struct ProductRuleReport {
    complex_t<T> a_w;
    complex_t<T> b_w;
    complex_t<T> ab_w;
    bool violation;
    OutcomeDistribution<T> joint;
};

template <typename T>
ProductRuleReport<T> product_rule_audit(const PPSEnsemble<T>& pps, const SpectralObservable<T>& a,
                                        const SpectralObservable<T>& b,
                                        T commute_tol = structural_tol<T>, T tol = T(1e-9)) {
    if (a.dim() != pps.dim() || b.dim() != pps.dim()) {
        throw std::invalid_argument("product_rule_audit: observable dimension mismatch");
    }
    const Matrix<T> comm = a.op() * b.op() - b.op() * a.op();
    if (detail::max_abs<T>(comm) > commute_tol) {
        throw std::invalid_argument("product_rule_audit: observables do not commute");
    }
    const complex_t<T> a_w = weak_value(pps, a.op());
    const complex_t<T> b_w = weak_value(pps, b.op());
    const complex_t<T> ab_w = weak_value(pps, (a.op() * b.op()).eval());
    const bool violation = std::abs(ab_w - a_w * b_w) > tol;
    return ProductRuleReport<T>{a_w, b_w, ab_w, violation,
                                sequential_distribution(pps, {a, b})};
}

// Decomposes the ordinary expectation value <pre|A|pre> into post-selected
// contributions over a complete orthonormal basis {|f_j>}:
//
//     <pre|A|pre> = sum_j |<f_j|pre>|^2 Re( <f_j|A|pre> / <f_j|pre> ).
//
// Each term is evaluated as Re( conj(<f_j|pre>) <f_j|A|pre> ), which is the
// same quantity but stays finite when a basis state is orthogonal to `pre`
// (the weight then vanishes).
template <typename T>
T expectation_decomposition(const StateVector<T>& pre, const Matrix<T>& op,
                            const std::vector<StateVector<T>>& basis,
                            T tol = structural_tol<T>) {
    const int d = pre.dim();
    if (op.rows() != d || op.cols() != d) {
        throw std::invalid_argument("expectation_decomposition: operator dimension mismatch");
    }
    Matrix<T> completeness = Matrix<T>::Zero(d, d);
    for (const auto& f : basis) {
        if (f.dim() != d) {
            throw std::invalid_argument("expectation_decomposition: basis dimension mismatch");
        }
        completeness += (f.amps() * f.amps().adjoint()).eval();
    }
    if (detail::max_abs<T>(completeness - identity<T>(d)) > tol) {
        throw std::invalid_argument("expectation_decomposition: basis not orthonormal/complete");
    }
    const Vector<T> a_pre = op * pre.amps();
    T sum = T(0);
    for (const auto& f : basis) {
        const complex_t<T> overlap = f.amps().dot(pre.amps());
        const complex_t<T> matrix_elem = f.amps().dot(a_pre);
        sum += (std::conj(overlap) * matrix_elem).real();
    }
    return sum;
}

}  // namespace ppsim
