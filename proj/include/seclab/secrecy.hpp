#pragma once

// Exact eavesdropper leakage I(M_i; Z^n)/n and Monte Carlo decoding-error
// estimates for concrete finite-n Marton codes.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seclab/channel.hpp"
#include "seclab/codebook.hpp"

namespace seclab {

/// Guard on |Z|^n * M1 * M2 for exact leakage enumeration.
inline constexpr std::uint64_t kLeakageGuard = std::uint64_t{1} << 22;

struct ExactLeakage {
    double rate1 = 0.0;      ///< I(M1; Z^n) / n
    double rate2 = 0.0;      ///< I(M2; Z^n) / n
    double joint_rate = 0.0; ///< I(M1, M2; Z^n) / n, informational only
    /// Product subcodebooks without a preselected pair; each was replaced by
    /// the all-zeros channel input.
    std::uint64_t substituted_failures = 0;

    double rate(int receiver) const { return receiver == 1 ? rate1 : rate2; }
};

/// Exact leakage under uniform messages. The encoder map is marginalized
/// per position, p(z|u1,u2) = sum_x p(x|u1,u2) p(z|x), so stochastic maps are
/// handled without enumerating X^n. Throws SizeError past kLeakageGuard.
ExactLeakage exact_leakage(const MartonCodebook& cb, const PairSelection& sel, const BroadcastChannelSpec& ch);

/// Convenience: leakage rate for receiver 1 or 2.
double exact_leakage(const MartonCodebook& cb, const PairSelection& sel, const BroadcastChannelSpec& ch,
                     int receiver);

struct LeakageReport {
    double leakage_rate_1 = 0.0; ///< mean over draws
    double leakage_rate_2 = 0.0;
    double spread_1 = 0.0; ///< sample standard deviation over draws
    double spread_2 = 0.0;
    double joint_leakage_rate = 0.0;
    int n = 0;
    std::uint64_t codebook_draws = 0;
    std::uint64_t flagged_draws = 0; ///< draws with substituted FAILURE entries
    std::vector<ExactLeakage> per_draw_values;
};

/// Random-coding average of exact_leakage over independent codebooks; draw d
/// uses draw_config(cfg, seed, d) for generation and preselection.
LeakageReport average_leakage(const MartonConfig& cfg, const AuxiliaryStructure& aux,
                              const BroadcastChannelSpec& ch, std::uint64_t draws, std::uint64_t seed);

enum class DecoderKind { JointTypicality, MaximumLikelihood };

std::string to_string(DecoderKind kind);

/// Decoder for receiver i. The typicality variant returns the unique m_i with
/// some l_i such that (u_i^n(m_i, l_i), y^n) is jointly typical under the
/// induced p(u_i, y_i); the ML variant maximizes prod_j p(y_j | u_ij) over
/// (m_i, l_i). Both report std::nullopt for no/ambiguous decisions.
class MessageDecoder {
public:
    MessageDecoder(const MartonCodebook& cb, const BroadcastChannelSpec& ch, int receiver, double eps_dec,
                   DecoderKind kind = DecoderKind::JointTypicality);

    std::optional<std::size_t> operator()(std::span<const Symbol> y) const;

private:
    std::optional<std::size_t> decode_typical(std::span<const Symbol> y) const;
    std::optional<std::size_t> decode_ml(std::span<const Symbol> y) const;

    const MartonCodebook* cb_;
    int receiver_;
    DecoderKind kind_;
    std::size_t y_size_;
    JointTypicalityTable table_;
    std::vector<double> log_likelihood_; ///< [u][y], -inf where p(y|u) = 0
};

std::optional<std::size_t> decode_typicality(const MartonCodebook& cb, const BroadcastChannelSpec& ch,
                                             std::span<const Symbol> y, int receiver, double eps_dec);

struct ChannelOutputs {
    std::vector<Symbol> y1, y2, z;
};

/// Passes x^n through the memoryless channel.
ChannelOutputs transmit(const BroadcastChannelSpec& ch, std::span<const Symbol> x, std::uint64_t seed);

struct ErrorReport {
    double p_err_1 = 0.0;
    double p_err_2 = 0.0;
    double stderr_1 = 0.0;
    double stderr_2 = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t encoding_failures = 0; ///< FAILURE entries hit; counted as errors for both receivers
    DecoderKind decoder = DecoderKind::JointTypicality;
};

ErrorReport estimate_error_prob(const MartonCodebook& cb, const PairSelection& sel, const BroadcastChannelSpec& ch,
                                std::uint64_t trials, std::uint64_t seed, double eps_dec,
                                DecoderKind decoder = DecoderKind::JointTypicality);

} // namespace seclab
