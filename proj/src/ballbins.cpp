#include "seclab/ballbins.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "seclab/errors.hpp"
#include "seclab/parallel.hpp"
#include "seclab/rng.hpp"

namespace seclab {

namespace {

void validate(const OccupancyParams& p)
{
    if (p.t == 0) throw ValidationError("occupancy: t must be at least 1");
}

constexpr std::uint64_t kTrialBlock = 4096;
constexpr double kMaxTrendBits = 30.0;

} // namespace

std::uint64_t count_from_rate(double bits)
{
    if (!std::isfinite(bits) || bits < 0.0) throw ValidationError("rate must be a finite non-negative number");
    if (bits > 62.0) throw SizeError("rate-to-count conversion overflows 64 bits");
    const double v = std::floor(std::exp2(bits) + 0.5);
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(v));
}

double occupancy_power(std::uint64_t t, std::uint64_t s, std::uint64_t k)
{
    if (s == 0) return 1.0;
    if (k >= t) return 0.0;
    const double td = static_cast<double>(t);
    return std::exp(static_cast<double>(s) * std::log1p(-static_cast<double>(k) / td));
}

double expected_distinct(const OccupancyParams& p)
{
    validate(p);
    if (p.s == 0) return 0.0;
    if (p.t == 1) return 1.0;
    const double t = static_cast<double>(p.t);
    // t (1 - (1 - 1/t)^s) without the subtraction
    return -t * std::expm1(static_cast<double>(p.s) * std::log1p(-1.0 / t));
}

double variance_distinct(const OccupancyParams& p)
{
    validate(p);
    if (p.s <= 1 || p.t == 1) return 0.0;
    const double t = static_cast<double>(p.t);
    const double s = static_cast<double>(p.s);
    const double a = occupancy_power(p.t, p.s, 1);
    // t a + t^2 (1 - 1/t) b - t^2 a^2 regrouped as t (a - b) + t^2 (b - a^2),
    // with b / a = (1 - 1/(t-1))^s and b / a^2 = (1 - 1/(t-1)^2)^s so that
    // neither difference is formed from two nearly equal powers.
    const double a_minus_b = -a * std::expm1(s * std::log1p(-1.0 / (t - 1.0)));
    const double b_minus_a2 = a * a * std::expm1(s * std::log1p(-1.0 / ((t - 1.0) * (t - 1.0))));
    return std::max(0.0, t * a_minus_b + t * t * b_minus_a2);
}

OccupancyStats occupancy_stats(const OccupancyParams& p)
{
    OccupancyStats st;
    st.mean = expected_distinct(p);
    st.variance = variance_distinct(p);
    st.mean_fraction = st.mean / static_cast<double>(p.t);
    return st;
}

SampleStats simulate_distinct(const OccupancyParams& p, std::uint64_t trials, std::uint64_t seed)
{
    validate(p);
    if (trials == 0) throw ValidationError("simulate_distinct: trials must be at least 1");
    if (p.t > (std::uint64_t{1} << 28)) throw SizeError("simulate_distinct: too many bins to simulate");

    const std::uint64_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
    struct Partial {
        std::uint64_t sum = 0;
        std::uint64_t sum_sq = 0;
    };
    std::vector<Partial> partial(blocks);
    const std::uint64_t base = derive_seed(seed, streams::kOccupancy);

    parallel_for(blocks, [&](std::size_t b) {
        Rng rng(derive_seed(base, b));
        std::vector<std::uint32_t> stamp(p.t, 0);
        const std::uint64_t begin = b * kTrialBlock;
        const std::uint64_t end = std::min(trials, begin + kTrialBlock);
        Partial acc;
        for (std::uint64_t trial = begin; trial < end; ++trial) {
            // stamp trick: bin is occupied in this trial iff stamp == trial tag
            const auto tag = static_cast<std::uint32_t>(trial - begin + 1);
            std::uint64_t occupied = 0;
            for (std::uint64_t ball = 0; ball < p.s; ++ball) {
                auto& slot = stamp[rng.below(p.t)];
                if (slot != tag) {
                    slot = tag;
                    ++occupied;
                }
            }
            acc.sum += occupied;
            acc.sum_sq += occupied * occupied;
        }
        partial[b] = acc;
    });

    std::uint64_t sum = 0, sum_sq = 0;
    for (const auto& part : partial) {
        sum += part.sum;
        sum_sq += part.sum_sq;
    }
    SampleStats out;
    out.trials = trials;
    const double n = static_cast<double>(trials);
    out.mean = static_cast<double>(sum) / n;
    if (trials > 1) {
        const double ss = static_cast<double>(sum_sq) - n * out.mean * out.mean;
        out.variance = std::max(0.0, ss / (n - 1.0));
    }
    return out;
}

std::vector<double> distinct_count_law(const OccupancyParams& p)
{
    validate(p);
    if (p.t > 100000 || p.s > 100000) throw SizeError("distinct_count_law: parameters too large");
    const std::uint64_t kmax = std::min(p.t, p.s);
    // law[k] after each placement: a new ball lands in an occupied bin w.p. k/t
    std::vector<double> law(kmax + 1, 0.0);
    law[0] = 1.0;
    const double t = static_cast<double>(p.t);
    for (std::uint64_t ball = 0; ball < p.s; ++ball) {
        const std::uint64_t top = std::min<std::uint64_t>(ball + 1, kmax);
        for (std::uint64_t k = top; k >= 1; --k)
            law[k] = law[k] * (static_cast<double>(k) / t) + law[k - 1] * ((t - static_cast<double>(k - 1)) / t);
        law[0] = 0.0;
    }
    return law;
}

bool theorem1_condition(double r1, double r2, double rl1, double rl2)
{
    for (double r : {r1, r2, rl1, rl2})
        if (!std::isfinite(r) || r < 0.0) throw ValidationError("theorem1_condition: rates must be non-negative");
    return r1 > rl2 && r2 > rl1;
}

std::vector<TrendPoint> occupancy_fraction_trend(double rl, double r_other, const std::vector<int>& n_list)
{
    if (!(rl >= 0.0) || !(r_other >= 0.0)) throw ValidationError("occupancy_fraction_trend: rates must be non-negative");
    std::vector<TrendPoint> out;
    out.reserve(n_list.size());
    for (int n : n_list) {
        if (n < 1) throw ValidationError("occupancy_fraction_trend: n must be positive");
        if (n * std::max(rl, r_other) > kMaxTrendBits)
            throw SizeError("occupancy_fraction_trend: n=" + std::to_string(n) + " exceeds the 30-bit guard");
        TrendPoint pt;
        pt.n = n;
        pt.t = count_from_rate(n * rl);
        pt.s = count_from_rate(n * r_other);
        pt.expected_fraction = expected_distinct({pt.t, pt.s}) / static_cast<double>(pt.t);
        out.push_back(pt);
    }
    return out;
}

} // namespace seclab
