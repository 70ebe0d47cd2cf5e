#include "seclab/secrecy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "seclab/errors.hpp"
#include "seclab/parallel.hpp"
#include "seclab/rng.hpp"

namespace seclab {

namespace {

double neg_plogp(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

/// Per-position eavesdropper law for every message pair: [pair][j][z].
std::vector<double> eavesdropper_tables(const MartonCodebook& cb, const PairSelection& sel,
                                        const BroadcastChannelSpec& ch, std::uint64_t& substituted)
{
    const auto& aux = cb.aux();
    const auto to_z = ch.to_z();
    const std::size_t zs = ch.z_size();
    const std::size_t xs = ch.x_size();
    const auto n = static_cast<std::size_t>(cb.n());

    // p(z | u1, u2) for every auxiliary pair symbol
    std::vector<double> w(aux.u1_size() * aux.u2_size() * zs, 0.0);
    for (std::size_t pair = 0; pair < aux.u1_size() * aux.u2_size(); ++pair)
        for (std::size_t x = 0; x < xs; ++x) {
            const double px = aux.channel_input_map()(pair, x);
            if (px == 0.0) continue;
            for (std::size_t z = 0; z < zs; ++z) w[pair * zs + z] += px * to_z(x, z);
        }

    substituted = 0;
    std::vector<double> tables(cb.m1() * cb.m2() * n * zs);
    for (std::size_t a = 0; a < cb.m1(); ++a)
        for (std::size_t b = 0; b < cb.m2(); ++b) {
            double* t = &tables[((a * cb.m2() + b) * n) * zs];
            const auto& e = sel.at(a, b);
            if (!e) ++substituted;
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t z = 0; z < zs; ++z) {
                    if (e) {
                        const auto pair = aux.pair_index(cb.u1(a, e->l1)[j], cb.u2(b, e->l2)[j]);
                        t[j * zs + z] = w[pair * zs + z];
                    } else {
                        t[j * zs + z] = to_z(0, z);
                    }
                }
        }
    return tables;
}

struct EntropySums {
    double h_z = 0.0;
    double h_z_given_m1 = 0.0;
    double h_z_given_m2 = 0.0;
    double h_z_given_both = 0.0;

    EntropySums& operator+=(const EntropySums& o)
    {
        h_z += o.h_z;
        h_z_given_m1 += o.h_z_given_m1;
        h_z_given_m2 += o.h_z_given_m2;
        h_z_given_both += o.h_z_given_both;
        return *this;
    }
};

/// Depth-first walk over z^n with prefix products, accumulating the four
/// entropy sums at the leaves.
class ZWalker {
public:
    ZWalker(const std::vector<double>& tables, std::size_t m1, std::size_t m2, std::size_t n, std::size_t zs)
        : tables_(tables), m1_(m1), m2_(m2), n_(n), zs_(zs), prefix_((n + 1) * m1 * m2, 1.0),
          p_m1_(m1), p_m2_(m2)
    {
    }

    EntropySums run_from(std::size_t first_symbol)
    {
        sums_ = {};
        extend(0, first_symbol);
        descend(1);
        return sums_;
    }

private:
    std::size_t msgs() const { return m1_ * m2_; }

    void extend(std::size_t depth, std::size_t z)
    {
        const double* parent = &prefix_[depth * msgs()];
        double* child = &prefix_[(depth + 1) * msgs()];
        for (std::size_t k = 0; k < msgs(); ++k) child[k] = parent[k] * tables_[(k * n_ + depth) * zs_ + z];
    }

    void descend(std::size_t depth)
    {
        if (depth == n_) {
            leaf();
            return;
        }
        for (std::size_t z = 0; z < zs_; ++z) {
            extend(depth, z);
            descend(depth + 1);
        }
    }

    void leaf()
    {
        const double* q = &prefix_[n_ * msgs()];
        std::fill(p_m1_.begin(), p_m1_.end(), 0.0);
        std::fill(p_m2_.begin(), p_m2_.end(), 0.0);
        double pz = 0.0;
        double h_both = 0.0;
        for (std::size_t a = 0; a < m1_; ++a)
            for (std::size_t b = 0; b < m2_; ++b) {
                const double v = q[a * m2_ + b];
                p_m1_[a] += v;
                p_m2_[b] += v;
                pz += v;
                h_both += neg_plogp(v);
            }
        const double inv1 = 1.0 / static_cast<double>(m1_);
        const double inv2 = 1.0 / static_cast<double>(m2_);
        // p(z|m1) = p_m1 / M2, weighted by p(m1) = 1/M1
        double h1 = 0.0, h2 = 0.0;
        for (double v : p_m1_) h1 += neg_plogp(v * inv2);
        for (double v : p_m2_) h2 += neg_plogp(v * inv1);
        sums_.h_z += neg_plogp(pz * inv1 * inv2);
        sums_.h_z_given_m1 += h1 * inv1;
        sums_.h_z_given_m2 += h2 * inv2;
        sums_.h_z_given_both += h_both * inv1 * inv2;
    }

    const std::vector<double>& tables_;
    std::size_t m1_, m2_, n_, zs_;
    std::vector<double> prefix_;
    std::vector<double> p_m1_, p_m2_;
    EntropySums sums_;
};

} // namespace

ExactLeakage exact_leakage(const MartonCodebook& cb, const PairSelection& sel, const BroadcastChannelSpec& ch)
{
    if (cb.aux().x_size() != ch.x_size())
        throw ValidationError("exact_leakage: aux map output size differs from channel input size");
    if (sel.m1() != cb.m1() || sel.m2() != cb.m2())
        throw ValidationError("exact_leakage: selection does not match codebook");
    const auto n = static_cast<std::size_t>(cb.n());
    const std::size_t zs = ch.z_size();
    const double log_size = static_cast<double>(n) * std::log2(static_cast<double>(zs)) +
                            std::log2(static_cast<double>(cb.m1() * cb.m2()));
    if (log_size > 22.0 + 1e-9) throw SizeError("exact_leakage: |Z|^n * M1 * M2 exceeds the 2^22 guard");

    ExactLeakage out;
    const auto tables = eavesdropper_tables(cb, sel, ch, out.substituted_failures);

    EntropySums total;
    for (std::size_t z0 = 0; z0 < zs; ++z0) {
        ZWalker walker(tables, cb.m1(), cb.m2(), n, zs);
        total += walker.run_from(z0);
    }
    const double dn = static_cast<double>(n);
    out.rate1 = std::max(0.0, total.h_z - total.h_z_given_m1) / dn;
    out.rate2 = std::max(0.0, total.h_z - total.h_z_given_m2) / dn;
    out.joint_rate = std::max(0.0, total.h_z - total.h_z_given_both) / dn;
    return out;
}

double exact_leakage(const MartonCodebook& cb, const PairSelection& sel, const BroadcastChannelSpec& ch,
                     int receiver)
{
    if (receiver != 1 && receiver != 2) throw ValidationError("exact_leakage: receiver must be 1 or 2");
    return exact_leakage(cb, sel, ch).rate(receiver);
}

LeakageReport average_leakage(const MartonConfig& cfg, const AuxiliaryStructure& aux,
                              const BroadcastChannelSpec& ch, std::uint64_t draws, std::uint64_t seed)
{
    if (draws == 0) throw ValidationError("average_leakage: draws must be positive");
    cfg.validate();
    LeakageReport rep;
    rep.n = cfg.n;
    rep.codebook_draws = draws;
    rep.per_draw_values.resize(draws);
    parallel_for(draws, [&](std::size_t d) {
        const MartonConfig c = draw_config(cfg, seed, d);
        const auto cb = MartonCodebook::generate(c, aux);
        const auto sel = preselect_pairs(cb, c.seed);
        rep.per_draw_values[d] = exact_leakage(cb, sel, ch);
    });

    const double dn = static_cast<double>(draws);
    for (const auto& v : rep.per_draw_values) {
        rep.leakage_rate_1 += v.rate1;
        rep.leakage_rate_2 += v.rate2;
        rep.joint_leakage_rate += v.joint_rate;
        if (v.substituted_failures > 0) ++rep.flagged_draws;
    }
    rep.leakage_rate_1 /= dn;
    rep.leakage_rate_2 /= dn;
    rep.joint_leakage_rate /= dn;
    if (draws > 1) {
        double s1 = 0.0, s2 = 0.0;
        for (const auto& v : rep.per_draw_values) {
            s1 += (v.rate1 - rep.leakage_rate_1) * (v.rate1 - rep.leakage_rate_1);
            s2 += (v.rate2 - rep.leakage_rate_2) * (v.rate2 - rep.leakage_rate_2);
        }
        rep.spread_1 = std::sqrt(s1 / (dn - 1.0));
        rep.spread_2 = std::sqrt(s2 / (dn - 1.0));
    }
    return rep;
}

std::string to_string(DecoderKind kind)
{
    return kind == DecoderKind::JointTypicality ? "joint-typicality" : "maximum-likelihood";
}

namespace {

Pmf receiver_joint(const MartonCodebook& cb, const BroadcastChannelSpec& ch, int receiver)
{
    if (receiver != 1 && receiver != 2) throw ValidationError("decoder: receiver must be 1 or 2");
    if (cb.aux().x_size() != ch.x_size())
        throw ValidationError("decoder: aux map output size differs from channel input size");
    return aux_output_joint(cb.aux(), receiver == 1 ? ch.to_y1() : ch.to_y2(), receiver);
}

} // namespace

MessageDecoder::MessageDecoder(const MartonCodebook& cb, const BroadcastChannelSpec& ch, int receiver,
                               double eps_dec, DecoderKind kind)
    : cb_(&cb), receiver_(receiver), kind_(kind), y_size_(receiver == 1 ? ch.y1_size() : ch.y2_size()),
      table_(receiver_joint(cb, ch, receiver),
             receiver == 1 ? cb.aux().u1_size() : cb.aux().u2_size(), receiver == 1 ? ch.y1_size() : ch.y2_size(),
             cb.n(), eps_dec)
{
    const Pmf joint = receiver_joint(cb, ch, receiver);
    const std::size_t us = receiver == 1 ? cb.aux().u1_size() : cb.aux().u2_size();
    log_likelihood_.assign(us * y_size_, -std::numeric_limits<double>::infinity());
    for (std::size_t u = 0; u < us; ++u) {
        double pu = 0.0;
        for (std::size_t y = 0; y < y_size_; ++y) pu += joint[u * y_size_ + y];
        if (pu <= 0.0) continue;
        for (std::size_t y = 0; y < y_size_; ++y) {
            const double p = joint[u * y_size_ + y] / pu;
            if (p > 0.0) log_likelihood_[u * y_size_ + y] = std::log(p);
        }
    }
}

std::optional<std::size_t> MessageDecoder::operator()(std::span<const Symbol> y) const
{
    if (y.size() != static_cast<std::size_t>(cb_->n())) throw ValidationError("decoder: wrong output length");
    for (Symbol s : y)
        if (s < 0 || static_cast<std::size_t>(s) >= y_size_) throw ValidationError("decoder: symbol outside alphabet");
    return kind_ == DecoderKind::JointTypicality ? decode_typical(y) : decode_ml(y);
}

std::optional<std::size_t> MessageDecoder::decode_typical(std::span<const Symbol> y) const
{
    std::optional<std::size_t> found;
    for (std::size_t m = 0; m < cb_->messages(receiver_); ++m)
        for (std::size_t l = 0; l < cb_->randomization(receiver_); ++l)
            if (table_(cb_->sequence(receiver_, m, l), y)) {
                if (found && *found != m) return std::nullopt;
                found = m;
                break;
            }
    return found;
}

std::optional<std::size_t> MessageDecoder::decode_ml(std::span<const Symbol> y) const
{
    const double ninf = -std::numeric_limits<double>::infinity();
    double best = ninf;
    std::optional<std::size_t> best_m;
    bool tie = false;
    for (std::size_t m = 0; m < cb_->messages(receiver_); ++m) {
        double best_here = ninf;
        for (std::size_t l = 0; l < cb_->randomization(receiver_); ++l) {
            const auto u = cb_->sequence(receiver_, m, l);
            double score = 0.0;
            for (std::size_t j = 0; j < y.size() && score > ninf; ++j)
                score += log_likelihood_[static_cast<std::size_t>(u[j]) * y_size_ + static_cast<std::size_t>(y[j])];
            best_here = std::max(best_here, score);
        }
        if (best_here == ninf) continue;
        if (!best_m || best_here > best + 1e-12) {
            best = best_here;
            best_m = m;
            tie = false;
        } else if (std::abs(best_here - best) <= 1e-12) {
            tie = true;
        }
    }
    if (tie) return std::nullopt;
    return best_m;
}

std::optional<std::size_t> decode_typicality(const MartonCodebook& cb, const BroadcastChannelSpec& ch,
                                             std::span<const Symbol> y, int receiver, double eps_dec)
{
    return MessageDecoder(cb, ch, receiver, eps_dec)(y);
}

ChannelOutputs transmit(const BroadcastChannelSpec& ch, std::span<const Symbol> x, std::uint64_t seed)
{
    Rng rng(derive_seed(seed, streams::kChannel));
    ChannelOutputs out;
    out.y1.resize(x.size());
    out.y2.resize(x.size());
    out.z.resize(x.size());
    const std::size_t y2z = ch.y2_size() * ch.z_size();
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] < 0 || static_cast<std::size_t>(x[j]) >= ch.x_size())
            throw ValidationError("transmit: input symbol outside alphabet");
        const std::size_t k = rng.categorical(ch.output_law(static_cast<std::size_t>(x[j])));
        out.y1[j] = static_cast<Symbol>(k / y2z);
        out.y2[j] = static_cast<Symbol>((k / ch.z_size()) % ch.y2_size());
        out.z[j] = static_cast<Symbol>(k % ch.z_size());
    }
    return out;
}

ErrorReport estimate_error_prob(const MartonCodebook& cb, const PairSelection& sel, const BroadcastChannelSpec& ch,
                                std::uint64_t trials, std::uint64_t seed, double eps_dec, DecoderKind decoder)
{
    if (trials == 0) throw ValidationError("estimate_error_prob: trials must be positive");
    if (sel.m1() != cb.m1() || sel.m2() != cb.m2())
        throw ValidationError("estimate_error_prob: selection does not match codebook");
    const MessageDecoder dec1(cb, ch, 1, eps_dec, decoder);
    const MessageDecoder dec2(cb, ch, 2, eps_dec, decoder);

    constexpr std::uint64_t kBlock = 256;
    const std::uint64_t blocks = (trials + kBlock - 1) / kBlock;
    struct Partial {
        std::uint64_t e1 = 0, e2 = 0, fail = 0;
    };
    std::vector<Partial> part(blocks);
    parallel_for(blocks, [&](std::size_t blk) {
        Partial acc;
        const std::uint64_t end = std::min(trials, (blk + 1) * kBlock);
        for (std::uint64_t t = blk * kBlock; t < end; ++t) {
            const std::uint64_t trial_seed = derive_seed(seed, t);
            Rng msg(derive_seed(trial_seed, streams::kMessages));
            const std::size_t m1 = msg.below(cb.m1());
            const std::size_t m2 = msg.below(cb.m2());
            if (!sel.at(m1, m2)) {
                ++acc.fail;
                ++acc.e1;
                ++acc.e2;
                continue;
            }
            const auto x = encode(cb, sel, m1, m2, trial_seed);
            const auto out = transmit(ch, x, trial_seed);
            if (dec1(out.y1) != std::optional<std::size_t>(m1)) ++acc.e1;
            if (dec2(out.y2) != std::optional<std::size_t>(m2)) ++acc.e2;
        }
        part[blk] = acc;
    });

    ErrorReport rep;
    rep.trials = trials;
    rep.decoder = decoder;
    std::uint64_t e1 = 0, e2 = 0;
    for (const auto& p : part) {
        e1 += p.e1;
        e2 += p.e2;
        rep.encoding_failures += p.fail;
    }
    const double dn = static_cast<double>(trials);
    rep.p_err_1 = static_cast<double>(e1) / dn;
    rep.p_err_2 = static_cast<double>(e2) / dn;
    rep.stderr_1 = std::sqrt(rep.p_err_1 * (1.0 - rep.p_err_1) / dn);
    rep.stderr_2 = std::sqrt(rep.p_err_2 * (1.0 - rep.p_err_2) / dn);
    return rep;
}

} // namespace seclab
