#pragma once

// Small channels and auxiliary structures shared by the test suites.

#include <cmath>
#include <cstdint>
#include <vector>

#include "seclab/channel.hpp"
#include "seclab/rng.hpp"

namespace seclab::testing {

inline ConditionalPmf bsc(double flip)
{
    return ConditionalPmf({Pmf({1.0 - flip, flip}), Pmf({flip, 1.0 - flip})});
}

inline ConditionalPmf identity_channel(std::size_t size)
{
    std::vector<Pmf> rows;
    for (std::size_t k = 0; k < size; ++k) rows.push_back(Pmf::point_mass(size, k));
    return ConditionalPmf(std::move(rows));
}

/// Every input maps to the same output law.
inline ConditionalPmf constant_channel(std::size_t inputs, const Pmf& out)
{
    return ConditionalPmf(std::vector<Pmf>(inputs, out));
}

/// Bit `bit` of a 4-ary input x = 2*u1 + u2 through a BSC.
inline ConditionalPmf bit_of_pair(int bit, double flip)
{
    std::vector<Pmf> rows;
    for (int x = 0; x < 4; ++x) {
        const int b = bit == 0 ? x / 2 : x % 2;
        rows.push_back(b == 0 ? Pmf({1.0 - flip, flip}) : Pmf({flip, 1.0 - flip}));
    }
    return ConditionalPmf(std::move(rows));
}

/// Deterministic map from (u1, u2) pairs to X given as a list of x values.
inline ConditionalPmf deterministic_map(const std::vector<int>& xs, std::size_t x_size)
{
    std::vector<Pmf> rows;
    for (int x : xs) rows.push_back(Pmf::point_mass(x_size, static_cast<std::size_t>(x)));
    return ConditionalPmf(std::move(rows));
}

/// Doubly symmetric binary joint with crossover q.
inline Pmf dsbs(double q) { return Pmf({0.5 * (1 - q), 0.5 * q, 0.5 * q, 0.5 * (1 - q)}); }

inline Pmf independent_uniform_pair() { return Pmf({0.25, 0.25, 0.25, 0.25}); }

/// Binary aux with x = u1 (U2 ignored).
inline AuxiliaryStructure aux_x_is_u1(const Pmf& joint)
{
    return AuxiliaryStructure(2, 2, joint, deterministic_map({0, 0, 1, 1}, 2));
}

/// Binary aux with x = u2 (U1 ignored).
inline AuxiliaryStructure aux_x_is_u2(const Pmf& joint)
{
    return AuxiliaryStructure(2, 2, joint, deterministic_map({0, 1, 0, 1}, 2));
}

/// Binary aux with x = u1 xor u2.
inline AuxiliaryStructure aux_xor(const Pmf& joint)
{
    return AuxiliaryStructure(2, 2, joint, deterministic_map({0, 1, 1, 0}, 2));
}

/// Binary aux with x = 2*u1 + u2 over a 4-ary input.
inline AuxiliaryStructure aux_pair_input(const Pmf& joint)
{
    return AuxiliaryStructure(2, 2, joint, deterministic_map({0, 1, 2, 3}, 4));
}

/// Rate whose count_from_rate at block length n is exactly `count`.
inline double rate_for(std::uint64_t count, int n)
{
    return count <= 1 ? 0.0 : std::log2(static_cast<double>(count)) / n;
}

inline double h2(double p)
{
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

inline Pmf random_pmf(Rng& rng, std::size_t k)
{
    std::vector<double> v(k);
    double total = 0.0;
    for (auto& x : v) total += (x = -std::log(1.0 - rng.uniform01()));
    for (auto& x : v) x /= total;
    return Pmf(std::move(v));
}

} // namespace seclab::testing
