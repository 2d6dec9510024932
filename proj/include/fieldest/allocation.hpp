/**
 * @file allocation.hpp
 * @brief Resource allocation across sensors for a linear estimator c . F.
 *
 * Minimizing sum_j |a_j|^q / b_j^p subject to sum_j b_j = N gives
 * b_j proportional to |a_j|^(q/(p+1)) and the minimum ||a||_{q/(p+1)}^q / N^p.
 * With a = c this covers the entangled (non-local) strategy, per-sensor
 * Heisenberg-limited (local quantum) sensing with p = q = 2, and shot-noise
 * limited (local classical) sensing with p = 1, q = 2.
 */
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fieldest {

enum class Strategy { NonlocalQuantum, LocalQuantum, LocalClassical, General };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

struct AllocationResult {
    std::vector<double> n;  ///< resources per sensor, sums to N
    double variance = 0.0;
    Strategy strategy = Strategy::General;
    double p = 0.0;  ///< General only
    double q = 0.0;
    int repetitions = 1;
    double total = 0.0;
};

/// (sum |v_i|^p)^(1/p); a quasi-norm for p < 1. Throws for p <= 0.
double pnorm(std::span<const double> v, double p);

/// Closed-form minimizer of sum |a_j|^q / b_j^p with sum b_j = N. Zero
/// coefficients receive zero resources.
AllocationResult allocate_general(std::span<const double> a, double total, double p, double q);

AllocationResult nonlocal_allocation(std::span<const double> c, double total, int repetitions = 1);
AllocationResult local_allocation(std::span<const double> c, double total, int repetitions = 1);
AllocationResult local_classical_allocation(std::span<const double> c, double total, int repetitions = 1);

AllocationResult allocate(Strategy s, std::span<const double> c, double total, int repetitions = 1);

/// sum_j |a_j|^q / n_j^p over the support of a; infinity if a supported n_j is 0.
double allocation_objective(std::span<const double> a, std::span<const double> n, double p, double q);

/// Variance Var_L / Var_NL = ||c||_{2/3}^2 / ||c||_1^2, in [1, support size].
double precision_gain(std::span<const double> c);

struct RoundedAllocation {
    std::vector<long long> n;
    double variance = 0.0;
    double penalty = 0.0;  ///< rounded minus continuous variance
};

/// Largest-remainder rounding to integers summing to round(N); ties go to
/// the lower sensor index.
RoundedAllocation round_allocation(const AllocationResult& alloc, std::span<const double> c);

enum class NoiseScaling { Quantum, Classical };

struct MonteCarloResult {
    double empirical_variance = 0.0;
    double analytic_variance = 0.0;
    double standard_error = 0.0;  ///< of the empirical variance
    double relative_deviation = 0.0;
    std::uint64_t trials = 0;
};

inline constexpr std::uint64_t kMinMonteCarloTrials = 10'000;

/// sum_j c_j^2 / n_j^2 (quantum) or sum_j c_j^2 / n_j (classical).
double analytic_variance(std::span<const double> c, std::span<const double> n, NoiseScaling scaling);

/// Empirical variance of sum_j c_j (F_j + eps_j), eps_j ~ N(0, sigma_j^2) with
/// sigma_j = 1/n_j (quantum) or 1/sqrt(n_j) (classical). Trials are split into
/// fixed blocks with their own seeded streams, so the result depends only on
/// the seed, never on the thread count.
MonteCarloResult monte_carlo_variance(std::span<const double> c, std::span<const double> n, std::uint64_t trials,
                                      std::uint64_t seed, NoiseScaling scaling);

/// Single-threaded reference of monte_carlo_variance; bitwise identical output.
MonteCarloResult monte_carlo_variance_serial(std::span<const double> c, std::span<const double> n,
                                             std::uint64_t trials, std::uint64_t seed, NoiseScaling scaling);

}  // namespace fieldest
