#include "fieldest/allocation.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "fieldest/error.hpp"

namespace fieldest {

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::NonlocalQuantum: return "nonlocal_quantum";
        case Strategy::LocalQuantum: return "local_quantum";
        case Strategy::LocalClassical: return "local_classical";
        case Strategy::General: return "general";
    }
    return "general";
}

Strategy strategy_from_string(const std::string& s) {
    if (s == "nonlocal" || s == "nonlocal_quantum") return Strategy::NonlocalQuantum;
    if (s == "local" || s == "local_quantum") return Strategy::LocalQuantum;
    if (s == "classical" || s == "local_classical") return Strategy::LocalClassical;
    fail(ErrorKind::InvalidArgument, "unknown strategy '" + s + "'");
}

double pnorm(std::span<const double> v, double p) {
    if (!(p > 0.0)) fail(ErrorKind::InvalidArgument, "p-norm exponent must be positive");
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (double x : v) s += std::pow(std::abs(x) / scale, p);
    return scale * std::pow(s, 1.0 / p);
}

namespace {

void check_coefficients(std::span<const double> a) {
    bool nonzero = false;
    for (double x : a) {
        if (!std::isfinite(x)) fail(ErrorKind::InvalidArgument, "non-finite coefficient");
        nonzero = nonzero || x != 0.0;
    }
    if (!nonzero) fail(ErrorKind::InvalidArgument, "coefficient vector is zero");
}

void check_total(double total) {
    if (!(total > 0.0) || !std::isfinite(total)) fail(ErrorKind::InvalidArgument, "total resources must be positive");
}

}  // namespace

AllocationResult allocate_general(std::span<const double> a, double total, double p, double q) {
    check_coefficients(a);
    check_total(total);
    if (!(p > 0.0) || !(q > 0.0)) fail(ErrorKind::InvalidArgument, "exponents p and q must be positive");

    const double r = q / (p + 1.0);
    std::vector<double> w(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) w[j] = a[j] == 0.0 ? 0.0 : std::pow(std::abs(a[j]), r);
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);

    AllocationResult out;
    out.strategy = Strategy::General;
    out.p = p;
    out.q = q;
    out.total = total;
    out.n.resize(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) out.n[j] = total * w[j] / sum;
    out.variance = std::pow(pnorm(a, r), q) / std::pow(total, p);
    return out;
}

AllocationResult nonlocal_allocation(std::span<const double> c, double total, int repetitions) {
    check_coefficients(c);
    check_total(total);
    if (repetitions < 1) fail(ErrorKind::InvalidArgument, "repetitions must be at least 1");
    const double l1 = pnorm(c, 1.0);
    AllocationResult out;
    out.strategy = Strategy::NonlocalQuantum;
    out.repetitions = repetitions;
    out.total = total;
    out.n.resize(c.size());
    for (std::size_t j = 0; j < c.size(); ++j) out.n[j] = total * std::abs(c[j]) / l1;
    out.variance = l1 * l1 / (repetitions * total * total);
    return out;
}

AllocationResult local_allocation(std::span<const double> c, double total, int repetitions) {
    if (repetitions < 1) fail(ErrorKind::InvalidArgument, "repetitions must be at least 1");
    AllocationResult out = allocate_general(c, total, 2.0, 2.0);
    out.strategy = Strategy::LocalQuantum;
    out.repetitions = repetitions;
    out.variance /= repetitions;
    return out;
}

AllocationResult local_classical_allocation(std::span<const double> c, double total, int repetitions) {
    if (repetitions < 1) fail(ErrorKind::InvalidArgument, "repetitions must be at least 1");
    AllocationResult out = allocate_general(c, total, 1.0, 2.0);
    out.strategy = Strategy::LocalClassical;
    out.repetitions = repetitions;
    out.variance /= repetitions;
    return out;
}

AllocationResult allocate(Strategy s, std::span<const double> c, double total, int repetitions) {
    switch (s) {
        case Strategy::NonlocalQuantum: return nonlocal_allocation(c, total, repetitions);
        case Strategy::LocalQuantum: return local_allocation(c, total, repetitions);
        case Strategy::LocalClassical: return local_classical_allocation(c, total, repetitions);
        case Strategy::General: break;
    }
    fail(ErrorKind::InvalidArgument, "general strategy needs explicit exponents; use allocate_general");
}

double allocation_objective(std::span<const double> a, std::span<const double> n, double p, double q) {
    if (a.size() != n.size()) fail(ErrorKind::InvalidArgument, "allocation length mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j] == 0.0) continue;
        if (n[j] <= 0.0) return std::numeric_limits<double>::infinity();
        s += std::pow(std::abs(a[j]), q) / std::pow(n[j], p);
    }
    return s;
}

double precision_gain(std::span<const double> c) {
    check_coefficients(c);
    const double l23 = pnorm(c, 2.0 / 3.0);
    const double l1 = pnorm(c, 1.0);
    return (l23 * l23) / (l1 * l1);
}

RoundedAllocation round_allocation(const AllocationResult& alloc, std::span<const double> c) {
    if (c.size() != alloc.n.size()) fail(ErrorKind::InvalidArgument, "allocation length mismatch");
    const long long target = std::llround(alloc.total);
    RoundedAllocation out;
    out.n.resize(alloc.n.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    long long assigned = 0;
    for (std::size_t j = 0; j < alloc.n.size(); ++j) {
        const double fl = std::floor(alloc.n[j]);
        out.n[j] = static_cast<long long>(fl);
        assigned += out.n[j];
        remainders.emplace_back(alloc.n[j] - fl, j);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; assigned < target && k < remainders.size(); ++k, ++assigned) ++out.n[remainders[k].second];

    std::vector<double> nd(out.n.begin(), out.n.end());
    double p = 2.0, q = 2.0;
    double norm = static_cast<double>(alloc.repetitions);
    switch (alloc.strategy) {
        case Strategy::NonlocalQuantum: {
            // entangled probe: variance ||c||_1^2 / (m N^2) whenever n is proportional to |c|
            const double l1 = pnorm(c, 1.0);
            double ratio = 0.0;
            bool proportional = true;
            for (std::size_t j = 0; j < c.size(); ++j) {
                if (c[j] == 0.0) continue;
                const double r = nd[j] / std::abs(c[j]);
                if (ratio == 0.0) ratio = r;
                proportional = proportional && std::abs(r - ratio) <= 1e-12 * ratio;
            }
            // otherwise the probe measures sum_j n_j F_j, not c . F; report the local bound
            out.variance = proportional ? l1 * l1 / (norm * static_cast<double>(target) * target)
                                        : allocation_objective(c, nd, 2.0, 2.0) / norm;
            out.penalty = out.variance - alloc.variance;
            return out;
        }
        case Strategy::LocalQuantum: break;
        case Strategy::LocalClassical: p = 1.0; break;
        case Strategy::General:
            p = alloc.p;
            q = alloc.q;
            norm = 1.0;
            break;
    }
    out.variance = allocation_objective(c, nd, p, q) / norm;
    out.penalty = out.variance - alloc.variance;
    return out;
}

double analytic_variance(std::span<const double> c, std::span<const double> n, NoiseScaling scaling) {
    return allocation_objective(c, n, scaling == NoiseScaling::Quantum ? 2.0 : 1.0, 2.0);
}

namespace {

constexpr std::uint64_t kBlocks = 64;

struct BlockMoments {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;  // sum of squared deviations
};

std::vector<double> noise_scales(std::span<const double> c, std::span<const double> n, NoiseScaling scaling) {
    if (c.size() != n.size()) fail(ErrorKind::InvalidArgument, "allocation length does not match coefficients");
    std::vector<double> sigma(c.size(), 0.0);
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (c[j] == 0.0) continue;
        if (!(n[j] > 0.0))
            fail(ErrorKind::InvalidArgument, "sensor " + std::to_string(j) + " has a nonzero coefficient but no resources");
        sigma[j] = scaling == NoiseScaling::Quantum ? 1.0 / n[j] : 1.0 / std::sqrt(n[j]);
    }
    return sigma;
}

BlockMoments run_block(std::span<const double> c, const std::vector<double>& sigma, std::uint64_t seed,
                       std::uint64_t block, std::uint64_t count) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(block)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    BlockMoments mo;
    for (std::uint64_t t = 0; t < count; ++t) {
        double s = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) {
            if (sigma[j] == 0.0) continue;
            s += c[j] * sigma[j] * normal(rng);
        }
        ++mo.count;
        const double delta = s - mo.mean;
        mo.mean += delta / static_cast<double>(mo.count);
        mo.m2 += delta * (s - mo.mean);
    }
    return mo;
}

// Chan et al. pairwise merge, applied in block order.
MonteCarloResult reduce(const std::vector<BlockMoments>& blocks, double analytic, std::uint64_t trials) {
    BlockMoments total;
    for (const auto& b : blocks) {
        if (b.count == 0) continue;
        const double n = static_cast<double>(total.count + b.count);
        const double delta = b.mean - total.mean;
        total.m2 += b.m2 + delta * delta * static_cast<double>(total.count) * static_cast<double>(b.count) / n;
        total.mean += delta * static_cast<double>(b.count) / n;
        total.count += b.count;
    }
    MonteCarloResult out;
    out.trials = trials;
    out.analytic_variance = analytic;
    out.empirical_variance = total.m2 / static_cast<double>(total.count - 1);
    // Gaussian sums: Var(s^2) = 2 sigma^4 / (n - 1)
    out.standard_error = analytic * std::sqrt(2.0 / static_cast<double>(total.count - 1));
    out.relative_deviation = std::abs(out.empirical_variance - analytic) / analytic;
    return out;
}

std::uint64_t block_count(std::uint64_t trials, std::uint64_t block) {
    return trials / kBlocks + (block < trials % kBlocks ? 1 : 0);
}

void check_trials(std::uint64_t trials) {
    if (trials < kMinMonteCarloTrials)
        fail(ErrorKind::InvalidArgument, "Monte Carlo needs at least " + std::to_string(kMinMonteCarloTrials) + " trials");
}

}  // namespace

MonteCarloResult monte_carlo_variance(std::span<const double> c, std::span<const double> n, std::uint64_t trials,
                                      std::uint64_t seed, NoiseScaling scaling) {
    check_coefficients(c);
    check_trials(trials);
    const auto sigma = noise_scales(c, n, scaling);
    std::vector<BlockMoments> blocks(kBlocks);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(kBlocks); ++b) {
        const auto ub = static_cast<std::uint64_t>(b);
        blocks[ub] = run_block(c, sigma, seed, ub, block_count(trials, ub));
    }
    return reduce(blocks, analytic_variance(c, n, scaling), trials);
}

MonteCarloResult monte_carlo_variance_serial(std::span<const double> c, std::span<const double> n,
                                             std::uint64_t trials, std::uint64_t seed, NoiseScaling scaling) {
    check_coefficients(c);
    check_trials(trials);
    const auto sigma = noise_scales(c, n, scaling);
    std::vector<BlockMoments> blocks(kBlocks);
    for (std::uint64_t b = 0; b < kBlocks; ++b) blocks[b] = run_block(c, sigma, seed, b, block_count(trials, b));
    return reduce(blocks, analytic_variance(c, n, scaling), trials);
}

}  // namespace fieldest
