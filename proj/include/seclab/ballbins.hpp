#pragma once

// Occupancy statistics for the experiment "place s balls uniformly and
// independently into t bins; count the bins holding at least one ball".
// In the codebook mapping, t = |C_1(m_1)| = 2^{n Rl1} and s = 2^{n R2}.

#include <cstdint>
#include <vector>

namespace seclab {

struct OccupancyParams {
    std::uint64_t t = 1; ///< bins
    std::uint64_t s = 0; ///< placements
};

struct OccupancyStats {
    double mean = 0.0;
    double variance = 0.0;
    double mean_fraction = 0.0;
};

struct SampleStats {
    double mean = 0.0;
    double variance = 0.0; ///< unbiased sample variance (0 for one trial)
    std::uint64_t trials = 0;
};

/// round-half-up of 2^bits, at least 1. Shared by every rate-to-count conversion.
std::uint64_t count_from_rate(double bits);

/// (1 - k/t)^s evaluated as exp(s * log1p(-k/t)); exact 0/1 at the edges.
double occupancy_power(std::uint64_t t, std::uint64_t s, std::uint64_t k);

/// t * (1 - (1 - 1/t)^s)
double expected_distinct(const OccupancyParams& p);

/// t(1-1/t)^s + t^2 (1-1/t)(1-2/t)^s - t^2 (1-1/t)^{2s}, clamped at 0.
double variance_distinct(const OccupancyParams& p);

OccupancyStats occupancy_stats(const OccupancyParams& p);

/// Monte Carlo estimate. Trials are split into fixed blocks with derived
/// seeds, so the result depends only on (p, trials, seed).
SampleStats simulate_distinct(const OccupancyParams& p, std::uint64_t trials, std::uint64_t seed);

/// Exact law of the occupied-bin count, P(K = k) for k = 0..min(t, s).
/// Uses the Stirling-number recurrence in probability space.
std::vector<double> distinct_count_law(const OccupancyParams& p);

/// R1 > Rl2 and R2 > Rl1 (strict).
bool theorem1_condition(double r1, double r2, double rl1, double rl2);

struct TrendPoint {
    int n = 0;
    std::uint64_t t = 0;
    std::uint64_t s = 0;
    double expected_fraction = 0.0;
};

/// Finite-n occupancy fraction with t = round(2^{n rl}), s = round(2^{n r_other}).
/// Throws SizeError when n * max(rl, r_other) exceeds 30 bits.
std::vector<TrendPoint> occupancy_fraction_trend(double rl, double r_other, const std::vector<int>& n_list);

} // namespace seclab
