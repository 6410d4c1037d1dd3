#pragma once

// Von Neumann pointer model for post-selected measurements at arbitrary
// coupling strength, in the momentum representation of the measuring device.
//
// The device starts in a Gaussian momentum wavefunction g of spread Delta and
// is coupled to an observable A through H_int = -lambda Q A, which rigidly
// shifts the pointer by lambda*a on the eigenvalue-a branch. Conditioning on
// the post-selected system state leaves the (unnormalized) pointer amplitude
//
//     phi(P) = sum_a <post|Pi_a|pre> * g(P - lambda a).
//
// For weak coupling the density |phi|^2 is a single Gaussian shifted by
// lambda * Re(A_w); for strong coupling it splits into peaks at lambda*a
// weighted by the ideal-measurement (ABL) branch weights. Everything here is
// computed on a uniform momentum grid:
//
//   * exact_pointer_distribution   |phi|^2 normalized on the grid, plus the
//                                  post-selection probability  integral |phi|^2
//   * pointer_mean                 trapezoidal first moment
//   * window_mass                  trapezoidal mass of a sub-interval
//   * sample_pointer               deterministic Monte Carlo draws via
//                                  inverse-CDF with linear interpolation
//   * weak_value_estimate          mean(samples)/lambda with standard error
//   * write_density_csv /          "P,density" and "P,count" histogram export
//     write_counts_csv

#include <ppsim/pps.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ppsim {

// Grid and coupling parameters of the pointer model. The grid spans
// [-half_width, half_width] with `points` equally spaced samples; `spread` is
// the momentum uncertainty Delta of the initial Gaussian; `lambda` is the
// coupling strength.
template <typename T = double>
struct PointerConfig {
    T half_width = T(10);
    int points = 4096;
    T spread = T(1);
    T lambda = T(0);
};

template <typename T>
void validate_config(const PointerConfig<T>& cfg) {
    if (!(cfg.points >= 16)) {
        throw std::invalid_argument("PointerConfig: points must be at least 16");
    }
    if (!(cfg.half_width > T(0)) || !std::isfinite(cfg.half_width)) {
        throw std::invalid_argument("PointerConfig: half_width must be positive");
    }
    if (!(cfg.spread > T(0)) || !std::isfinite(cfg.spread)) {
        throw std::invalid_argument("PointerConfig: spread must be positive");
    }
    if (!std::isfinite(cfg.lambda)) {
        throw std::invalid_argument("PointerConfig: lambda must be finite");
    }
    // The grid step must resolve the Gaussian, otherwise densities alias.
    if (!(cfg.half_width / static_cast<T>(cfg.points) < cfg.spread / T(4))) {
        throw std::invalid_argument(
            "PointerConfig: grid too coarse for the Gaussian spread "
            "(need half_width/points < spread/4)");
    }
}

namespace detail {

// Trapezoidal integral of samples on a uniform grid with step h.
template <typename T>
T trapezoid(const std::vector<T>& values, T h) {
    if (values.size() < 2) {
        return T(0);
    }
    T sum = (values.front() + values.back()) / T(2);
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        sum += values[i];
    }
    return sum * h;
}

}  // namespace detail

// Discretized pointer-momentum density after post-selection. `density`
// integrates to 1 (trapezoidal rule); `post_selection_probability` is the
// total weight integral |phi|^2 that survived the post-selection.
template <typename T = double>
class PointerDistribution {
  public:
    PointerDistribution(std::vector<T> grid, std::vector<T> density, T post_selection_probability)
        : grid_(std::move(grid)),
          density_(std::move(density)),
          post_selection_probability_(post_selection_probability) {
        if (grid_.size() < 2 || grid_.size() != density_.size()) {
            throw std::invalid_argument("PointerDistribution: grid/density size mismatch");
        }
        for (std::size_t i = 1; i < grid_.size(); ++i) {
            if (!(grid_[i] > grid_[i - 1])) {
                throw std::invalid_argument("PointerDistribution: grid must be increasing");
            }
        }
        for (T d : density_) {
            if (!(d >= T(0)) || !std::isfinite(d)) {
                throw std::invalid_argument("PointerDistribution: density must be non-negative");
            }
        }
        const T integral = detail::trapezoid(density_, step());
        if (std::abs(integral - T(1)) > T(1e-8)) {
            throw std::invalid_argument("PointerDistribution: density must integrate to 1");
        }
        if (!(post_selection_probability_ >= T(0)) || !(post_selection_probability_ <= T(1))) {
            throw std::invalid_argument(
                "PointerDistribution: post-selection probability must lie in [0, 1]");
        }
    }

    const std::vector<T>& grid() const { return grid_; }
    const std::vector<T>& density() const { return density_; }
    T post_selection_probability() const { return post_selection_probability_; }
    T step() const { return (grid_.back() - grid_.front()) / static_cast<T>(grid_.size() - 1); }

  private:
    std::vector<T> grid_;
    std::vector<T> density_;
    T post_selection_probability_;
};

// Exact post-selected pointer density on the configured grid. Rejects grids
// that cannot hold the shifted wavepacket: every branch peak lambda*a must sit
// at least six spreads away from the grid edge, otherwise truncation would
// silently bias the statistics.
template <typename T>
PointerDistribution<T> exact_pointer_distribution(const PPSEnsemble<T>& pps,
                                                  const SpectralObservable<T>& obs,
                                                  const PointerConfig<T>& cfg) {
    validate_config(cfg);
    if (obs.dim() != pps.dim()) {
        throw std::invalid_argument("exact_pointer_distribution: dimension mismatch");
    }
    T max_abs_eig = T(0);
    for (const auto& [eigenvalue, projector] : obs.spectrum()) {
        max_abs_eig = std::max(max_abs_eig, std::abs(eigenvalue));
    }
    if (std::abs(cfg.lambda) * max_abs_eig + T(6) * cfg.spread > cfg.half_width) {
        throw std::invalid_argument(
            "exact_pointer_distribution: grid does not cover the shifted wavepacket "
            "(need |lambda|*max|a| + 6*spread <= half_width)");
    }

    std::vector<std::pair<T, complex_t<T>>> branches;  // (eigenvalue, <post|Pi_a|pre>)
    branches.reserve(obs.spectrum().size());
    for (const auto& [eigenvalue, projector] : obs.spectrum()) {
        const complex_t<T> amp = pps.post().amps().dot((projector * pps.pre().amps()).eval());
        branches.emplace_back(eigenvalue, amp);
    }

    const int n = cfg.points;
    const T h = T(2) * cfg.half_width / static_cast<T>(n - 1);
    // Initial Gaussian momentum wavefunction, unit L2 norm: |g|^2 is a normal
    // density with standard deviation `spread`.
    const T norm = std::pow(T(2) * std::numbers::pi_v<T> * cfg.spread * cfg.spread, T(-0.25));
    const T inv_four_var = T(1) / (T(4) * cfg.spread * cfg.spread);

    std::vector<T> grid(static_cast<std::size_t>(n));
    std::vector<T> weight(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const T p = -cfg.half_width + h * static_cast<T>(i);
        grid[static_cast<std::size_t>(i)] = p;
        complex_t<T> phi(0, 0);
        for (const auto& [eigenvalue, amp] : branches) {
            const T x = p - cfg.lambda * eigenvalue;
            phi += amp * (norm * std::exp(-x * x * inv_four_var));
        }
        weight[static_cast<std::size_t>(i)] = std::norm(phi);
    }

    const T total = detail::trapezoid(weight, h);
    if (!(total > T(0)) || !std::isfinite(total)) {
        throw std::invalid_argument(
            "exact_pointer_distribution: post-selected pointer state has no weight");
    }
    std::vector<T> density(weight.size());
    for (std::size_t i = 0; i < weight.size(); ++i) {
        density[i] = weight[i] / total;
    }
    const T ps_prob = std::min(T(1), std::max(T(0), total));
    return PointerDistribution<T>(std::move(grid), std::move(density), ps_prob);
}

// Trapezoidal first moment of the density.
template <typename T>
T pointer_mean(const PointerDistribution<T>& dist) {
    std::vector<T> integrand(dist.grid().size());
    for (std::size_t i = 0; i < integrand.size(); ++i) {
        integrand[i] = dist.grid()[i] * dist.density()[i];
    }
    return detail::trapezoid(integrand, dist.step());
}

// Mass of the density inside [center - half, center + half]. The density is
// treated as piecewise linear between grid points, so partially covered end
// segments contribute their exact linear-interpolation integral.
template <typename T>
T window_mass(const PointerDistribution<T>& dist, T center, T half) {
    if (!(half > T(0))) {
        throw std::invalid_argument("window_mass: window half-width must be positive");
    }
    const auto& grid = dist.grid();
    const auto& density = dist.density();
    const T lo = std::max(center - half, grid.front());
    const T hi = std::min(center + half, grid.back());
    if (!(lo < hi)) {
        return T(0);
    }
    auto value_at = [&](T x) {
        const std::size_t idx = std::min(
            grid.size() - 2,
            static_cast<std::size_t>(std::max(T(0), (x - grid.front()) / dist.step())));
        const T t = (x - grid[idx]) / (grid[idx + 1] - grid[idx]);
        return density[idx] + t * (density[idx + 1] - density[idx]);
    };
    T mass = T(0);
    T x = lo;
    T fx = value_at(lo);
    // Walk the grid points strictly inside the window, then close at hi.
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] <= lo) {
            continue;
        }
        if (grid[i] >= hi) {
            break;
        }
        mass += (fx + density[i]) / T(2) * (grid[i] - x);
        x = grid[i];
        fx = density[i];
    }
    mass += (fx + value_at(hi)) / T(2) * (hi - x);
    return mass;
}

// Deterministic draws from the exact distribution: the grid CDF is inverted
// with linear interpolation (equivalently, the density is sampled as if
// piecewise constant on each grid segment). The generator is a mt19937_64
// seeded directly with `seed`; uniforms take the top 53 bits of each output.
template <typename T>
std::vector<T> sample_pointer(const PPSEnsemble<T>& pps, const SpectralObservable<T>& obs,
                              const PointerConfig<T>& cfg, std::int64_t n, std::uint64_t seed) {
    if (n < 1) {
        throw std::invalid_argument("sample_pointer: need at least one sample");
    }
    const PointerDistribution<T> dist = exact_pointer_distribution(pps, obs, cfg);
    const auto& grid = dist.grid();
    const auto& density = dist.density();
    const T h = dist.step();

    // Piecewise-linear CDF at the grid points, normalized to end exactly at 1.
    std::vector<T> cdf(grid.size());
    cdf[0] = T(0);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        cdf[i] = cdf[i - 1] + (density[i - 1] + density[i]) / T(2) * h;
    }
    const T total = cdf.back();
    for (auto& c : cdf) {
        c /= total;
    }

    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() { return static_cast<T>((rng() >> 11) * 0x1.0p-53); };

    std::vector<T> samples(static_cast<std::size_t>(n));
    for (auto& s : samples) {
        const T u = uniform();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const std::size_t j = std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
        const std::size_t i = j - 1;
        const T span = cdf[j] - cdf[i];
        const T t = span > T(0) ? (u - cdf[i]) / span : T(0);
        s = grid[i] + t * (grid[j] - grid[i]);
    }
    return samples;
}

// Point estimate of Re(A_w) from pointer samples: mean/lambda, with the
// standard error of that ratio (sample standard deviation estimates the
// pointer spread).
template <typename T = double>
struct WeakValueEstimate {
    T value = T(0);
    T standard_error = T(0);
    std::int64_t n = 0;
};

template <typename T>
WeakValueEstimate<T> weak_value_estimate(const std::vector<T>& samples, T lambda) {
    if (samples.empty()) {
        throw std::invalid_argument("weak_value_estimate: no samples");
    }
    if (!(std::abs(lambda) > T(0))) {
        throw std::invalid_argument("weak_value_estimate: lambda must be nonzero");
    }
    const auto n = static_cast<std::int64_t>(samples.size());
    T mean = T(0);
    for (T s : samples) {
        mean += s;
    }
    mean /= static_cast<T>(n);
    T var = T(0);
    for (T s : samples) {
        var += (s - mean) * (s - mean);
    }
    var /= static_cast<T>(std::max<std::int64_t>(n - 1, 1));
    const T se = std::sqrt(var / static_cast<T>(n)) / std::abs(lambda);
    return WeakValueEstimate<T>{mean / lambda, se, n};
}

namespace detail {

// Locale-independent shortest-exact float formatting for CSV output.
template <typename T>
std::string csv_number(T value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", static_cast<double>(value));
    return buf;
}

}  // namespace detail

// CSV export of the exact density, one "P,density" row per grid point.
template <typename T>
void write_density_csv(std::ostream& out, const PointerDistribution<T>& dist) {
    out << "P,density\n";
    for (std::size_t i = 0; i < dist.grid().size(); ++i) {
        out << detail::csv_number(dist.grid()[i]) << ',' << detail::csv_number(dist.density()[i])
            << '\n';
    }
}

// Histogram of samples over the grid (each sample counts toward its nearest
// grid point), exported as "P,count" rows.
template <typename T>
std::vector<std::uint64_t> sample_histogram(const PointerDistribution<T>& dist,
                                            const std::vector<T>& samples) {
    std::vector<std::uint64_t> counts(dist.grid().size(), 0);
    const T h = dist.step();
    const T origin = dist.grid().front();
    for (T s : samples) {
        const auto raw = static_cast<std::ptrdiff_t>(std::llround((s - origin) / h));
        const auto idx = static_cast<std::size_t>(
            std::clamp<std::ptrdiff_t>(raw, 0, static_cast<std::ptrdiff_t>(counts.size() - 1)));
        ++counts[idx];
    }
    return counts;
}

template <typename T>
void write_counts_csv(std::ostream& out, const std::vector<T>& grid,
                      const std::vector<std::uint64_t>& counts) {
    if (grid.size() != counts.size()) {
        throw std::invalid_argument("write_counts_csv: grid/count size mismatch");
    }
    out << "P,count\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out << detail::csv_number(grid[i]) << ',' << counts[i] << '\n';
    }
}

}  // namespace ppsim
