#include "smkl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "smkl/error.hpp"
#include "smkl/parallel.hpp"

namespace smkl::diagnostics {

std::optional<double> gamma_bound(std::size_t d, double delta, double sigma_plus_min) {
    require(d >= 1, ErrorKind::domain, "gamma_bound needs d >= 1");
    require(sigma_plus_min > 0.0, ErrorKind::domain, "gamma_bound needs sigma_plus_min > 0");
    const double radicand = 1.0 - static_cast<double>(d - 1) * delta;
    if (!(radicand > 0.0)) return std::nullopt;
    return std::sqrt(static_cast<double>(d)) / (std::sqrt(radicand) * sigma_plus_min);
}

namespace {

DependencyReport report_from(const KernelBank& bank, std::size_t d, double delta) {
    DependencyReport r;
    r.d = d;
    r.delta = delta;
    const double scale = 1.0 / static_cast<double>(bank.n_samples());
    r.sigma_plus_min = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < bank.size(); ++j) {
        r.sigma_plus_min = std::min(r.sigma_plus_min, numlin::min_positive_eigenvalue(bank.cache(j), scale));
    }
    r.gamma_bound = gamma_bound(d, delta, r.sigma_plus_min);
    r.gamma_bound_valid = r.gamma_bound.has_value();
    return r;
}

void check_ranks(const KernelBank& bank, std::size_t d) {
    require(!bank.empty(), ErrorKind::validation, "kernel bank is empty");
    require(d >= 1, ErrorKind::validation, "d must be >= 1");
    for (std::size_t j = 0; j < bank.size(); ++j) {
        require(bank.cache(j).rank() >= 1, ErrorKind::degenerate_kernel, "kernel '" + bank.id(j) + "' has rank 0");
    }
}

}  // namespace

DependencyReport dependency_report(const KernelBank& bank, std::size_t d) {
    check_ranks(bank, d);
    return report_from(bank, d, numlin::max_pairwise_correlation(bank.caches()));
}

DependencyReport dependency_report_serial(const KernelBank& bank, std::size_t d) {
    check_ranks(bank, d);
    return report_from(bank, d, numlin::max_pairwise_correlation_serial(bank.caches()));
}

namespace {

// Ratio for one sample; NaN when the denominator is below 1e-12.
double probe_sample(const KernelBank& bank, const std::vector<std::size_t>& support, std::uint64_t seed,
                    std::uint64_t sample) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(sample), static_cast<std::uint32_t>(sample >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> g;
    const double inv_n = 1.0 / static_cast<double>(bank.n_samples());
    double numerator = 0.0;
    Vector image = Vector::Zero(bank.n_samples());
    for (auto j : support) {
        const auto& c = bank.cache(j);
        Vector coef(c.rank());
        for (Index i = 0; i < coef.size(); ++i) coef(i) = g(rng);
        // |a_j| = |c| for orthonormal U_j, and (K_j/N) U_j c = U_j (L_j c) / N.
        numerator += coef.norm();
        image.noalias() += c.basis * (c.eigenvalues.cwiseProduct(coef) * inv_n);
    }
    const double denominator = image.norm();
    return denominator < 1e-12 ? std::numeric_limits<double>::quiet_NaN() : numerator / denominator;
}

void check_probe(const KernelBank& bank, const std::vector<std::size_t>& support, std::size_t samples) {
    require(!support.empty(), ErrorKind::validation, "gamma_probe: empty support");
    require(samples >= 1, ErrorKind::validation, "gamma_probe: samples must be >= 1");
    for (auto j : support) require(j < bank.size(), ErrorKind::validation, "gamma_probe: index outside the bank");
}

double reduce_probe(const std::vector<double>& ratios) {
    double best = -1.0;
    for (double r : ratios) {
        if (!std::isnan(r)) best = std::max(best, r);
    }
    require(best >= 0.0, ErrorKind::probe_failed, "gamma_probe: every sample had a vanishing denominator");
    return best;
}

}  // namespace

double gamma_probe(const KernelBank& bank, const std::vector<std::size_t>& support, std::size_t samples,
                   std::uint64_t seed) {
    check_probe(bank, support, samples);
    std::vector<double> ratios(samples);
    parallel_for(static_cast<std::ptrdiff_t>(samples),
                 [&](std::ptrdiff_t s) { ratios[s] = probe_sample(bank, support, seed, static_cast<std::uint64_t>(s)); });
    return reduce_probe(ratios);
}

double gamma_probe_serial(const KernelBank& bank, const std::vector<std::size_t>& support, std::size_t samples,
                          std::uint64_t seed) {
    check_probe(bank, support, samples);
    std::vector<double> ratios(samples);
    for (std::size_t s = 0; s < samples; ++s) ratios[s] = probe_sample(bank, support, seed, s);
    return reduce_probe(ratios);
}

double tau(double mu, double gamma) {
    require(mu >= 1.0 && std::isfinite(mu), ErrorKind::domain, "tau needs mu >= 1");
    require(gamma > 0.0 && std::isfinite(gamma), ErrorKind::domain, "tau needs gamma > 0");
    return (mu - 1.0) * (mu - 1.0) / (8.0 * mu * (mu + 1.0) * gamma);
}

RequiredD required_d(double gamma_2d, double epsilon_star) {
    require(gamma_2d > 0.0 && std::isfinite(gamma_2d), ErrorKind::domain, "required_d needs gamma > 0");
    require(epsilon_star > 0.0, ErrorKind::domain, "required_d needs epsilon_star > 0");
    if (12.0 * epsilon_star >= 1.0) return {0.0, true};
    return {16.0 * gamma_2d * std::log(1.0 / (12.0 * epsilon_star)), false};
}

double gen_bound(double r, std::size_t d, std::size_t m, std::size_t n, double a, double epsilon_star) {
    require(a > 1.0, ErrorKind::precondition, "gen_bound: requires A > 1");
    require(m >= 3, ErrorKind::precondition, "gen_bound: requires m >= 3");
    const double log_m1 = std::log(static_cast<double>(m) + 1.0);
    const double nd = static_cast<double>(n);
    require(a * log_m1 <= nd, ErrorKind::precondition, "gen_bound: requires A ln(m+1) <= N");
    // N <= 2^(m+1), compared in log space so large m cannot overflow.
    require(std::log2(nd) <= static_cast<double>(m) + 1.0, ErrorKind::precondition,
            "gen_bound: requires N <= 2^(m+1)");
    require(r >= 0.0 && d >= 1 && epsilon_star >= 0.0, ErrorKind::precondition,
            "gen_bound: requires R >= 0, d >= 1, epsilon_star >= 0");
    return gen_bound_unchecked(r, d, m, n, a, epsilon_star);
}

double gen_bound_unchecked(double r, std::size_t d, std::size_t m, std::size_t n, double a, double epsilon_star) {
    const double spread = r + std::sqrt(static_cast<double>(d));
    return 6.0 * epsilon_star +
           196.0 * spread * spread * std::sqrt(a * std::log(static_cast<double>(m) + 1.0) / static_cast<double>(n));
}

RateFit fit_rate_excess(const std::vector<double>& excess, double floor) {
    require(!excess.empty(), ErrorKind::insufficient_data, "fit_rate: empty sequence");
    require(floor >= 0.0, ErrorKind::domain, "fit_rate: floor must be >= 0");
    RateFit fit;
    fit.plateau_index = excess.size();
    for (std::size_t k = 0; k < excess.size(); ++k) {
        if (excess[k] <= floor) {
            fit.plateau_index = k;
            break;
        }
    }
    fit.plateau_level = fit.plateau_index < excess.size() ? excess[fit.plateau_index] : excess.back();
    const std::size_t count = fit.plateau_index;
    require(count >= 3, ErrorKind::insufficient_data,
            "fit_rate: " + std::to_string(count) + " pre-plateau points, need at least 3");

    double mean_x = 0.0;
    double mean_y = 0.0;
    std::vector<double> ly(count);
    for (std::size_t k = 0; k < count; ++k) {
        ly[k] = std::log(excess[k]);
        mean_x += static_cast<double>(k);
        mean_y += ly[k];
    }
    mean_x /= static_cast<double>(count);
    mean_y /= static_cast<double>(count);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        const double dx = static_cast<double>(k) - mean_x;
        sxx += dx * dx;
        sxy += dx * (ly[k] - mean_y);
    }
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;
    fit.rate = std::exp(fit.slope);
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        const double pred = fit.intercept + fit.slope * static_cast<double>(k);
        ss_res += (ly[k] - pred) * (ly[k] - pred);
        ss_tot += (ly[k] - mean_y) * (ly[k] - mean_y);
    }
    // A perfect fit (including a flat sequence) counts as r^2 = 1.
    const double scale = std::max(1.0, std::abs(mean_y));
    fit.r_squared = ss_res <= 1e-24 * scale * scale * static_cast<double>(count) ? 1.0 : 1.0 - ss_res / ss_tot;
    return fit;
}

RateFit fit_rate(const SolverTrace& trace, double f_star_loss, double floor) {
    std::vector<double> excess;
    excess.reserve(trace.iterations.size());
    for (const auto& it : trace.iterations) excess.push_back(it.loss_after - f_star_loss);
    return fit_rate_excess(excess, floor);
}

}  // namespace smkl::diagnostics
