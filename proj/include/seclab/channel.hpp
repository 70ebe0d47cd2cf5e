#pragma once

// Finite-alphabet probability machinery: distributions, broadcast channels,
// auxiliary (U1, U2) structures, information measures and strong typicality.
// All quantities are in bits.

#include <cstddef>
#include <span>
#include <vector>

namespace seclab {

using Symbol = int;

inline constexpr double kProbTolerance = 1e-9;
inline constexpr double kInfoTolerance = 1e-8;

/// Probability mass function over {0, ..., size-1}.
class Pmf {
public:
    Pmf() = default;
    explicit Pmf(std::vector<double> probs);

    static Pmf uniform(std::size_t size);
    static Pmf point_mass(std::size_t size, std::size_t at);

    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t k) const { return probs_[k]; }
    std::span<const double> probs() const noexcept { return probs_; }

private:
    std::vector<double> probs_;
};

/// One Pmf per input symbol.
class ConditionalPmf {
public:
    ConditionalPmf() = default;
    explicit ConditionalPmf(std::vector<Pmf> rows);

    std::size_t input_size() const noexcept { return rows_.size(); }
    std::size_t output_size() const noexcept { return rows_.empty() ? 0 : rows_.front().size(); }
    const Pmf& row(std::size_t input) const { return rows_[input]; }
    double operator()(std::size_t input, std::size_t output) const { return rows_[input][output]; }

    /// True when every row is a point mass.
    bool deterministic() const;

private:
    std::vector<Pmf> rows_;
};

/// Memoryless broadcast channel p(y1, y2, z | x); the n-letter law is the
/// per-symbol product.
class BroadcastChannelSpec {
public:
    BroadcastChannelSpec() = default;
    /// `transition` is flattened in [x][y1][y2][z] order.
    BroadcastChannelSpec(std::size_t x, std::size_t y1, std::size_t y2, std::size_t z,
                         std::vector<double> transition);

    std::size_t x_size() const noexcept { return x_; }
    std::size_t y1_size() const noexcept { return y1_; }
    std::size_t y2_size() const noexcept { return y2_; }
    std::size_t z_size() const noexcept { return z_; }

    double operator()(std::size_t x, std::size_t y1, std::size_t y2, std::size_t z) const
    {
        return transition_[((x * y1_ + y1) * y2_ + y2) * z_ + z];
    }
    std::span<const double> transition() const noexcept { return transition_; }

    /// Per-output marginal channels: which = 0 -> Y1, 1 -> Y2, 2 -> Z.
    ConditionalPmf marginal(int which) const;
    ConditionalPmf to_y1() const { return marginal(0); }
    ConditionalPmf to_y2() const { return marginal(1); }
    ConditionalPmf to_z() const { return marginal(2); }

    /// Joint output law for input x over flattened (y1, y2, z).
    std::span<const double> output_law(std::size_t x) const
    {
        const std::size_t block = y1_ * y2_ * z_;
        return std::span<const double>(transition_).subspan(x * block, block);
    }

    /// Builds p(y1,y2,z|x) = p(y1|x) p(y2|x) p(z|x).
    static BroadcastChannelSpec from_components(const ConditionalPmf& y1, const ConditionalPmf& y2,
                                                const ConditionalPmf& z);

private:
    std::size_t x_ = 0, y1_ = 0, y2_ = 0, z_ = 0;
    std::vector<double> transition_;
};

/// Auxiliary pair (U1, U2) with joint law and the channel-input map p(x|u1,u2).
/// Pair symbols are flattened as u1 * |U2| + u2.
class AuxiliaryStructure {
public:
    AuxiliaryStructure() = default;
    AuxiliaryStructure(std::size_t u1, std::size_t u2, Pmf joint, ConditionalPmf channel_input_map);

    std::size_t u1_size() const noexcept { return u1_; }
    std::size_t u2_size() const noexcept { return u2_; }
    const Pmf& joint() const noexcept { return joint_; }
    const ConditionalPmf& channel_input_map() const noexcept { return map_; }
    std::size_t x_size() const noexcept { return map_.output_size(); }

    std::size_t pair_index(Symbol a, Symbol b) const
    {
        return static_cast<std::size_t>(a) * u2_ + static_cast<std::size_t>(b);
    }

    Pmf marginal_u1() const;
    Pmf marginal_u2() const;

private:
    std::size_t u1_ = 0, u2_ = 0;
    Pmf joint_;
    ConditionalPmf map_;
};

struct MutualInfoProfile {
    double i_u1_y1 = 0.0;
    double i_u2_y2 = 0.0;
    double i_u1_z = 0.0;
    double i_u2_z = 0.0;
    double i_u1_u2 = 0.0;
};

double entropy(const Pmf& p);

/// I(A;B) = H(A) + H(B) - H(A,B) for a joint flattened as a * size_b + b.
/// Tiny negative results from rounding are clamped to zero.
double mutual_information(const Pmf& joint, std::size_t size_a, std::size_t size_b);

/// Same quantity through the divergence sum  sum p(a,b) log p(a,b)/(p(a)p(b)).
double mutual_information_divergence(const Pmf& joint, std::size_t size_a, std::size_t size_b);

/// Joint law of (U_i, Y) where Y is the output of `to_output` driven by X.
/// receiver: 1 or 2 selects U1 or U2. Flattened as u * |Y| + y.
Pmf aux_output_joint(const AuxiliaryStructure& aux, const ConditionalPmf& to_output, int receiver);

MutualInfoProfile induced_distributions(const AuxiliaryStructure& aux, const BroadcastChannelSpec& ch);

/// Strong typicality with relative deviation: |freq(a)/n - p(a)| <= eps * p(a)
/// for every symbol a. Symbols with p(a) = 0 must not occur.
bool is_typical(std::span<const Symbol> seq, const Pmf& p, double eps);

/// Strong joint typicality of (seq_a, seq_b) under `joint` (flattened a * size_b + b).
/// Implies is_typical of each component for the same eps.
bool is_jointly_typical(std::span<const Symbol> seq_a, std::span<const Symbol> seq_b, const Pmf& joint,
                        std::size_t size_a, std::size_t size_b, double eps);

/// Precomputed admissible-count table for repeated joint typicality checks of
/// length-n pairs under one joint law. Agrees exactly with is_jointly_typical.
class JointTypicalityTable {
public:
    JointTypicalityTable(const Pmf& joint, std::size_t size_a, std::size_t size_b, int n, double eps);

    /// Every pair of length-n sequences over the support passes (eps so large
    /// that only the support constraint remains, and the support is full).
    bool vacuous() const noexcept { return vacuous_; }
    int n() const noexcept { return static_cast<int>(n_); }

    /// Sequences must have length n and symbols already range-checked.
    bool operator()(std::span<const Symbol> a, std::span<const Symbol> b) const;

private:
    std::size_t size_b_;
    std::size_t cells_;
    std::size_t n_;
    std::vector<unsigned char> allowed_; ///< [cell][count]
    bool vacuous_ = true;
};

} // namespace seclab
