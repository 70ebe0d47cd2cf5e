#pragma once

// Finite-n Marton codebooks: subcodebooks C_i(m_i) of L_i sequences each,
// one jointly typical (l1, l2) pair preselected per product subcodebook
// C_1(m_1) x C_2(m_2), and the encoder that maps (m1, m2) to X^n.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "seclab/channel.hpp"

namespace seclab {

inline constexpr std::uint64_t kCodebookGuard = std::uint64_t{1} << 24;

struct MartonConfig {
    int n = 1;
    double r1 = 0.0;
    double r2 = 0.0;
    double rl1 = 0.0;
    double rl2 = 0.0;
    double eps_pair = 0.1; ///< typicality slack for preselection
    std::uint64_t seed = 0;

    std::uint64_t m1() const;
    std::uint64_t m2() const;
    std::uint64_t l1() const;
    std::uint64_t l2() const;

    /// Throws ValidationError on bad fields and SizeError when M1*M2*L1*L2 > 2^24.
    void validate() const;
};

/// Config for Monte Carlo draw `draw` of an experiment seeded with `seed`.
/// Every multi-draw routine derives its codebooks through this.
MartonConfig draw_config(const MartonConfig& cfg, std::uint64_t seed, std::uint64_t draw);

class MartonCodebook {
public:
    /// Draws every sequence i.i.d. from the marginals of aux.joint().
    static MartonCodebook generate(const MartonConfig& cfg, const AuxiliaryStructure& aux);

    /// Wraps explicit sequences: u1[m][l] and u2[m][l], each of length cfg.n.
    static MartonCodebook from_sequences(const MartonConfig& cfg, const AuxiliaryStructure& aux,
                                         const std::vector<std::vector<std::vector<Symbol>>>& u1,
                                         const std::vector<std::vector<std::vector<Symbol>>>& u2);

    const MartonConfig& config() const noexcept { return cfg_; }
    const AuxiliaryStructure& aux() const noexcept { return aux_; }
    int n() const noexcept { return cfg_.n; }
    std::size_t m1() const noexcept { return m1_; }
    std::size_t m2() const noexcept { return m2_; }
    std::size_t l1() const noexcept { return l1_; }
    std::size_t l2() const noexcept { return l2_; }

    std::span<const Symbol> u1(std::size_t m, std::size_t l) const
    {
        return std::span<const Symbol>(u1_).subspan((m * l1_ + l) * stride(), stride());
    }
    std::span<const Symbol> u2(std::size_t m, std::size_t l) const
    {
        return std::span<const Symbol>(u2_).subspan((m * l2_ + l) * stride(), stride());
    }
    /// receiver 1 or 2
    std::span<const Symbol> sequence(int receiver, std::size_t m, std::size_t l) const
    {
        return receiver == 1 ? u1(m, l) : u2(m, l);
    }
    std::size_t messages(int receiver) const noexcept { return receiver == 1 ? m1_ : m2_; }
    std::size_t randomization(int receiver) const noexcept { return receiver == 1 ? l1_ : l2_; }

    bool operator==(const MartonCodebook& other) const
    {
        return u1_ == other.u1_ && u2_ == other.u2_;
    }

private:
    MartonCodebook(const MartonConfig& cfg, const AuxiliaryStructure& aux);
    std::size_t stride() const noexcept { return static_cast<std::size_t>(cfg_.n); }

    MartonConfig cfg_;
    AuxiliaryStructure aux_;
    std::size_t m1_ = 0, m2_ = 0, l1_ = 0, l2_ = 0;
    std::vector<Symbol> u1_; ///< [m][l][j]
    std::vector<Symbol> u2_;
};

struct PairIndex {
    std::uint32_t l1 = 0;
    std::uint32_t l2 = 0;
    bool operator==(const PairIndex&) const = default;
};

/// Preselected pair per (m1, m2); std::nullopt marks FAILURE (no typical pair).
class PairSelection {
public:
    PairSelection(std::size_t m1, std::size_t m2) : m1_(m1), m2_(m2), table_(m1 * m2) {}

    std::size_t m1() const noexcept { return m1_; }
    std::size_t m2() const noexcept { return m2_; }
    const std::optional<PairIndex>& at(std::size_t a, std::size_t b) const { return table_[a * m2_ + b]; }
    std::optional<PairIndex>& at(std::size_t a, std::size_t b) { return table_[a * m2_ + b]; }
    std::size_t failure_count() const;

private:
    std::size_t m1_, m2_;
    std::vector<std::optional<PairIndex>> table_;
};

enum class SelectionRule {
    Uniform,  ///< uniform among all jointly typical pairs
    FirstHit, ///< smallest (l1, l2) in row-major order; breaks uniformity
};

PairSelection preselect_pairs(const MartonCodebook& cb, std::uint64_t rng_seed,
                              SelectionRule rule = SelectionRule::Uniform);

struct DistinctCountReport {
    std::vector<std::uint64_t> counts1; ///< per m1: distinct l1 used
    std::vector<std::uint64_t> counts2; ///< per m2: distinct l2 used
    std::vector<double> fractions1;
    std::vector<double> fractions2;
    std::uint64_t failure_count = 0;

    double mean_fraction(int receiver) const;
};

DistinctCountReport count_distinct(const PairSelection& sel, const MartonCodebook& cb);

struct UniformityResult {
    std::vector<std::uint64_t> cell_counts; ///< indexed l1 * L2 + l2
    std::uint64_t used_draws = 0;
    std::uint64_t failed_draws = 0;
    double chi_square = 0.0;
    int degrees_of_freedom = 0;
    double p_value = 1.0;
    bool pass = true;
};

inline constexpr double kUniformitySignificance = 0.01;

/// Pearson chi-square test of observed counts against equal cell probabilities.
UniformityResult chi_square_uniform(std::vector<std::uint64_t> counts, double significance);

/// Draws `draws` independent single-product-subcodebook codebooks (M1 = M2 = 1),
/// tallies the preselected (l1, l2) cell and tests it for uniformity.
UniformityResult lemma1_uniformity_test(const MartonConfig& cfg, const AuxiliaryStructure& aux,
                                        std::uint64_t draws, std::uint64_t seed,
                                        SelectionRule rule = SelectionRule::Uniform);

struct RateQuad {
    double r1 = 0.0, r2 = 0.0, rl1 = 0.0, rl2 = 0.0;
};

struct Theorem1Row {
    int n = 0;
    std::uint64_t l1 = 0, m2 = 0, l2 = 0, m1 = 0;
    double mean_fraction1 = 0.0;
    double predicted_fraction1 = 0.0; ///< 1 - (1 - 1/L1)^{M2}
    double mean_fraction2 = 0.0;
    double predicted_fraction2 = 0.0;
    double failure_fraction = 0.0;
};

std::vector<Theorem1Row> theorem1_experiment(const AuxiliaryStructure& aux, const RateQuad& rates, double eps_pair,
                                             const std::vector<int>& n_list, std::uint64_t draws,
                                             std::uint64_t seed);

/// X^n for (m1, m2). Throws EncodingError on a FAILURE entry.
std::vector<Symbol> encode(const MartonCodebook& cb, const PairSelection& sel, std::size_t m1, std::size_t m2,
                           std::uint64_t encoder_seed);

/// X^n from an explicit (u1, u2) pair of sequences through the aux map.
std::vector<Symbol> map_to_input(const AuxiliaryStructure& aux, std::span<const Symbol> u1,
                                 std::span<const Symbol> u2, std::uint64_t encoder_seed);

} // namespace seclab
