#include "seclab/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>

#include "seclab/ballbins.hpp"
#include "seclab/errors.hpp"
#include "seclab/parallel.hpp"
#include "seclab/rng.hpp"

namespace seclab {

std::uint64_t MartonConfig::m1() const { return count_from_rate(n * r1); }
std::uint64_t MartonConfig::m2() const { return count_from_rate(n * r2); }
std::uint64_t MartonConfig::l1() const { return count_from_rate(n * rl1); }
std::uint64_t MartonConfig::l2() const { return count_from_rate(n * rl2); }

void MartonConfig::validate() const
{
    if (n < 1) throw ValidationError("MartonConfig: n must be at least 1");
    for (double r : {r1, r2, rl1, rl2})
        if (!std::isfinite(r) || r < 0.0) throw ValidationError("MartonConfig: rates must be non-negative");
    if (!(eps_pair > 0.0)) throw ValidationError("MartonConfig: eps_pair must be positive");
    const double total_bits = n * (r1 + r2 + rl1 + rl2);
    if (total_bits > 60.0) throw SizeError("MartonConfig: codebook exceeds the 2^24 enumeration guard");
    const std::uint64_t total = m1() * m2() * l1() * l2();
    if (total > kCodebookGuard)
        throw SizeError("MartonConfig: M1*M2*L1*L2 = " + std::to_string(total) + " exceeds the 2^24 guard");
}

MartonConfig draw_config(const MartonConfig& cfg, std::uint64_t seed, std::uint64_t draw)
{
    MartonConfig c = cfg;
    c.seed = derive_seed(derive_seed(seed, streams::kDraw), draw);
    return c;
}

MartonCodebook::MartonCodebook(const MartonConfig& cfg, const AuxiliaryStructure& aux) : cfg_(cfg), aux_(aux)
{
    cfg_.validate();
    m1_ = cfg_.m1();
    m2_ = cfg_.m2();
    l1_ = cfg_.l1();
    l2_ = cfg_.l2();
}

MartonCodebook MartonCodebook::generate(const MartonConfig& cfg, const AuxiliaryStructure& aux)
{
    MartonCodebook cb(cfg, aux);
    Rng rng(derive_seed(cfg.seed, streams::kCodebook));
    const auto draw = [&](std::vector<Symbol>& out, std::size_t count, const Pmf& marginal) {
        out.resize(count * cb.stride());
        for (auto& s : out) s = static_cast<Symbol>(rng.categorical(marginal.probs()));
    };
    draw(cb.u1_, cb.m1_ * cb.l1_, aux.marginal_u1());
    draw(cb.u2_, cb.m2_ * cb.l2_, aux.marginal_u2());
    return cb;
}

MartonCodebook MartonCodebook::from_sequences(const MartonConfig& cfg, const AuxiliaryStructure& aux,
                                              const std::vector<std::vector<std::vector<Symbol>>>& u1,
                                              const std::vector<std::vector<std::vector<Symbol>>>& u2)
{
    MartonCodebook cb(cfg, aux);
    const auto load = [&](std::vector<Symbol>& out, const std::vector<std::vector<std::vector<Symbol>>>& in,
                          std::size_t msgs, std::size_t rands, std::size_t alphabet, const char* name) {
        if (in.size() != msgs) throw ValidationError(std::string(name) + ": wrong number of subcodebooks");
        out.clear();
        for (const auto& sub : in) {
            if (sub.size() != rands) throw ValidationError(std::string(name) + ": wrong subcodebook size");
            for (const auto& seq : sub) {
                if (seq.size() != cb.stride()) throw ValidationError(std::string(name) + ": wrong sequence length");
                for (Symbol s : seq)
                    if (s < 0 || static_cast<std::size_t>(s) >= alphabet)
                        throw ValidationError(std::string(name) + ": symbol outside alphabet");
                out.insert(out.end(), seq.begin(), seq.end());
            }
        }
    };
    load(cb.u1_, u1, cb.m1_, cb.l1_, aux.u1_size(), "u1");
    load(cb.u2_, u2, cb.m2_, cb.l2_, aux.u2_size(), "u2");
    return cb;
}

std::size_t PairSelection::failure_count() const
{
    return static_cast<std::size_t>(std::count_if(table_.begin(), table_.end(), [](const auto& e) { return !e; }));
}

PairSelection preselect_pairs(const MartonCodebook& cb, std::uint64_t rng_seed, SelectionRule rule)
{
    PairSelection sel(cb.m1(), cb.m2());
    Rng rng(derive_seed(rng_seed, streams::kPreselect));
    const JointTypicalityTable typical(cb.aux().joint(), cb.aux().u1_size(), cb.aux().u2_size(), cb.n(),
                                       cb.config().eps_pair);
    const std::size_t l1 = cb.l1(), l2 = cb.l2();
    std::vector<PairIndex> hits;
    hits.reserve(l1 * l2);

    for (std::size_t a = 0; a < cb.m1(); ++a)
        for (std::size_t b = 0; b < cb.m2(); ++b) {
            if (typical.vacuous()) {
                const std::uint64_t pick = rule == SelectionRule::FirstHit ? 0 : rng.below(l1 * l2);
                sel.at(a, b) = PairIndex{static_cast<std::uint32_t>(pick / l2), static_cast<std::uint32_t>(pick % l2)};
                continue;
            }
            hits.clear();
            for (std::size_t i = 0; i < l1; ++i)
                for (std::size_t j = 0; j < l2; ++j)
                    if (typical(cb.u1(a, i), cb.u2(b, j))) {
                        hits.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
                        if (rule == SelectionRule::FirstHit) goto chosen;
                    }
        chosen:
            if (hits.empty()) continue;
            sel.at(a, b) = rule == SelectionRule::FirstHit ? hits.front() : hits[rng.below(hits.size())];
        }
    return sel;
}

double DistinctCountReport::mean_fraction(int receiver) const
{
    const auto& f = receiver == 1 ? fractions1 : fractions2;
    if (f.empty()) return 0.0;
    double total = 0.0;
    for (double v : f) total += v;
    return total / static_cast<double>(f.size());
}

DistinctCountReport count_distinct(const PairSelection& sel, const MartonCodebook& cb)
{
    if (sel.m1() != cb.m1() || sel.m2() != cb.m2())
        throw ValidationError("count_distinct: selection does not match codebook");
    DistinctCountReport rep;
    rep.counts1.assign(cb.m1(), 0);
    rep.counts2.assign(cb.m2(), 0);
    std::vector<unsigned char> seen1(cb.l1()), seen2(cb.l2());

    for (std::size_t a = 0; a < cb.m1(); ++a) {
        std::fill(seen1.begin(), seen1.end(), 0);
        for (std::size_t b = 0; b < cb.m2(); ++b) {
            const auto& e = sel.at(a, b);
            if (!e) {
                ++rep.failure_count;
                continue;
            }
            if (!seen1[e->l1]) {
                seen1[e->l1] = 1;
                ++rep.counts1[a];
            }
        }
    }
    for (std::size_t b = 0; b < cb.m2(); ++b) {
        std::fill(seen2.begin(), seen2.end(), 0);
        for (std::size_t a = 0; a < cb.m1(); ++a) {
            const auto& e = sel.at(a, b);
            if (e && !seen2[e->l2]) {
                seen2[e->l2] = 1;
                ++rep.counts2[b];
            }
        }
    }
    for (auto c : rep.counts1) rep.fractions1.push_back(static_cast<double>(c) / static_cast<double>(cb.l1()));
    for (auto c : rep.counts2) rep.fractions2.push_back(static_cast<double>(c) / static_cast<double>(cb.l2()));
    return rep;
}

UniformityResult chi_square_uniform(std::vector<std::uint64_t> counts, double significance)
{
    UniformityResult res;
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    res.cell_counts = std::move(counts);
    res.used_draws = total;
    const std::size_t k = res.cell_counts.size();
    res.degrees_of_freedom = static_cast<int>(k) - 1;
    if (k <= 1 || total == 0) return res;

    const double expected = static_cast<double>(total) / static_cast<double>(k);
    for (auto c : res.cell_counts) {
        const double d = static_cast<double>(c) - expected;
        res.chi_square += d * d / expected;
    }
    boost::math::chi_squared dist(res.degrees_of_freedom);
    res.p_value = boost::math::cdf(boost::math::complement(dist, res.chi_square));
    res.pass = res.p_value >= significance;
    return res;
}

UniformityResult lemma1_uniformity_test(const MartonConfig& cfg, const AuxiliaryStructure& aux,
                                        std::uint64_t draws, std::uint64_t seed, SelectionRule rule)
{
    cfg.validate();
    if (cfg.m1() != 1 || cfg.m2() != 1)
        throw ValidationError("lemma1_uniformity_test: requires a single product subcodebook (M1 = M2 = 1)");
    if (draws == 0) throw ValidationError("lemma1_uniformity_test: draws must be positive");

    const std::size_t cells = cfg.l1() * cfg.l2();
    constexpr std::uint64_t kBlock = 1024;
    const std::uint64_t blocks = (draws + kBlock - 1) / kBlock;
    std::vector<std::vector<std::uint64_t>> block_counts(blocks, std::vector<std::uint64_t>(cells, 0));
    std::vector<std::uint64_t> block_failures(blocks, 0);

    parallel_for(blocks, [&](std::size_t blk) {
        const std::uint64_t end = std::min(draws, (blk + 1) * kBlock);
        for (std::uint64_t d = blk * kBlock; d < end; ++d) {
            const MartonConfig c = draw_config(cfg, seed, d);
            const auto cb = MartonCodebook::generate(c, aux);
            const auto sel = preselect_pairs(cb, c.seed, rule);
            const auto& e = sel.at(0, 0);
            if (!e) {
                ++block_failures[blk];
                continue;
            }
            ++block_counts[blk][e->l1 * cfg.l2() + e->l2];
        }
    });

    std::vector<std::uint64_t> counts(cells, 0);
    std::uint64_t failures = 0;
    for (std::uint64_t b = 0; b < blocks; ++b) {
        for (std::size_t c = 0; c < cells; ++c) counts[c] += block_counts[b][c];
        failures += block_failures[b];
    }
    if (failures == draws) throw DegenerateInputError("lemma1_uniformity_test: every draw failed preselection");

    auto res = chi_square_uniform(std::move(counts), kUniformitySignificance);
    res.failed_draws = failures;
    return res;
}

std::vector<Theorem1Row> theorem1_experiment(const AuxiliaryStructure& aux, const RateQuad& rates, double eps_pair,
                                             const std::vector<int>& n_list, std::uint64_t draws,
                                             std::uint64_t seed)
{
    if (draws == 0) throw ValidationError("theorem1_experiment: draws must be positive");
    auto config_for = [&](int n) {
        MartonConfig c;
        c.n = n;
        c.r1 = rates.r1;
        c.r2 = rates.r2;
        c.rl1 = rates.rl1;
        c.rl2 = rates.rl2;
        c.eps_pair = eps_pair;
        return c;
    };
    for (int n : n_list) {
        try {
            config_for(n).validate();
        } catch (const SizeError&) {
            throw SizeError("theorem1_experiment: n=" + std::to_string(n) + " exceeds the 2^24 codebook guard");
        }
    }

    std::vector<Theorem1Row> rows;
    for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
        const MartonConfig base = config_for(n_list[idx]);
        struct Partial {
            double f1 = 0.0, f2 = 0.0, fail = 0.0;
        };
        std::vector<Partial> part(draws);
        const std::uint64_t n_seed = derive_seed(seed, static_cast<std::uint64_t>(n_list[idx]));
        parallel_for(draws, [&](std::size_t d) {
            const MartonConfig c = draw_config(base, n_seed, d);
            const auto cb = MartonCodebook::generate(c, aux);
            const auto sel = preselect_pairs(cb, c.seed);
            const auto rep = count_distinct(sel, cb);
            part[d] = {rep.mean_fraction(1), rep.mean_fraction(2),
                       static_cast<double>(rep.failure_count) / static_cast<double>(cb.m1() * cb.m2())};
        });

        Theorem1Row row;
        row.n = base.n;
        row.m1 = base.m1();
        row.m2 = base.m2();
        row.l1 = base.l1();
        row.l2 = base.l2();
        for (const auto& p : part) {
            row.mean_fraction1 += p.f1;
            row.mean_fraction2 += p.f2;
            row.failure_fraction += p.fail;
        }
        const double dn = static_cast<double>(draws);
        row.mean_fraction1 /= dn;
        row.mean_fraction2 /= dn;
        row.failure_fraction /= dn;
        row.predicted_fraction1 = expected_distinct({row.l1, row.m2}) / static_cast<double>(row.l1);
        row.predicted_fraction2 = expected_distinct({row.l2, row.m1}) / static_cast<double>(row.l2);
        rows.push_back(row);
    }
    return rows;
}

std::vector<Symbol> map_to_input(const AuxiliaryStructure& aux, std::span<const Symbol> u1,
                                 std::span<const Symbol> u2, std::uint64_t encoder_seed)
{
    if (u1.size() != u2.size()) throw ValidationError("map_to_input: sequence lengths differ");
    Rng rng(derive_seed(encoder_seed, streams::kEncoder));
    const auto& map = aux.channel_input_map();
    std::vector<Symbol> x(u1.size());
    for (std::size_t j = 0; j < u1.size(); ++j)
        x[j] = static_cast<Symbol>(rng.categorical(map.row(aux.pair_index(u1[j], u2[j])).probs()));
    return x;
}

std::vector<Symbol> encode(const MartonCodebook& cb, const PairSelection& sel, std::size_t m1, std::size_t m2,
                           std::uint64_t encoder_seed)
{
    if (m1 >= cb.m1() || m2 >= cb.m2()) throw ValidationError("encode: message index out of range");
    const auto& e = sel.at(m1, m2);
    if (!e)
        throw EncodingError("encode: no jointly typical pair preselected for (" + std::to_string(m1) + ", " +
                            std::to_string(m2) + ")");
    return map_to_input(cb.aux(), cb.u1(m1, e->l1), cb.u2(m2, e->l2), encoder_seed);
}

} // namespace seclab
