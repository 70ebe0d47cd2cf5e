#include "seclab/channel.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <numeric>
#include <string>

#include "seclab/errors.hpp"

namespace seclab {

namespace {

void validate_probs(std::span<const double> probs, const char* what)
{
    if (probs.empty()) throw ValidationError(std::string(what) + ": empty distribution");
    double total = 0.0;
    for (double v : probs) {
        if (!std::isfinite(v) || v < 0.0)
            throw ValidationError(std::string(what) + ": negative or non-finite probability");
        total += v;
    }
    if (std::abs(total - 1.0) > kProbTolerance)
        throw ValidationError(std::string(what) + ": probabilities sum to " + std::to_string(total));
}

double plogp_sum(std::span<const double> probs)
{
    double h = 0.0;
    for (double v : probs)
        if (v > 0.0) h -= v * std::log2(v);
    return h;
}

} // namespace

Pmf::Pmf(std::vector<double> probs) : probs_(std::move(probs))
{
    validate_probs(probs_, "Pmf");
}

Pmf Pmf::uniform(std::size_t size)
{
    if (size == 0) throw ValidationError("Pmf: support size must be positive");
    return Pmf(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

Pmf Pmf::point_mass(std::size_t size, std::size_t at)
{
    if (at >= size) throw ValidationError("Pmf: point mass outside support");
    std::vector<double> v(size, 0.0);
    v[at] = 1.0;
    return Pmf(std::move(v));
}

ConditionalPmf::ConditionalPmf(std::vector<Pmf> rows) : rows_(std::move(rows))
{
    if (rows_.empty()) throw ValidationError("ConditionalPmf: no rows");
    const std::size_t width = rows_.front().size();
    for (const auto& r : rows_)
        if (r.size() != width) throw ValidationError("ConditionalPmf: ragged rows");
}

bool ConditionalPmf::deterministic() const
{
    return std::all_of(rows_.begin(), rows_.end(), [](const Pmf& r) {
        return std::any_of(r.probs().begin(), r.probs().end(), [](double v) { return v == 1.0; });
    });
}

BroadcastChannelSpec::BroadcastChannelSpec(std::size_t x, std::size_t y1, std::size_t y2, std::size_t z,
                                           std::vector<double> transition)
    : x_(x), y1_(y1), y2_(y2), z_(z), transition_(std::move(transition))
{
    if (x == 0 || y1 == 0 || y2 == 0 || z == 0)
        throw ValidationError("BroadcastChannelSpec: alphabet sizes must be positive");
    if (transition_.size() != x * y1 * y2 * z)
        throw ValidationError("BroadcastChannelSpec: transition array has wrong size");
    for (std::size_t xi = 0; xi < x; ++xi) validate_probs(output_law(xi), "BroadcastChannelSpec row");
}

ConditionalPmf BroadcastChannelSpec::marginal(int which) const
{
    const std::size_t out = which == 0 ? y1_ : which == 1 ? y2_ : z_;
    std::vector<Pmf> rows;
    rows.reserve(x_);
    for (std::size_t x = 0; x < x_; ++x) {
        std::vector<double> row(out, 0.0);
        for (std::size_t a = 0; a < y1_; ++a)
            for (std::size_t b = 0; b < y2_; ++b)
                for (std::size_t c = 0; c < z_; ++c) {
                    const std::size_t k = which == 0 ? a : which == 1 ? b : c;
                    row[k] += (*this)(x, a, b, c);
                }
        // renormalize away accumulated rounding so the row validates
        const double total = std::accumulate(row.begin(), row.end(), 0.0);
        for (double& v : row) v /= total;
        rows.emplace_back(std::move(row));
    }
    return ConditionalPmf(std::move(rows));
}

BroadcastChannelSpec BroadcastChannelSpec::from_components(const ConditionalPmf& y1, const ConditionalPmf& y2,
                                                           const ConditionalPmf& z)
{
    const std::size_t xs = y1.input_size();
    if (y2.input_size() != xs || z.input_size() != xs)
        throw ValidationError("from_components: input alphabets differ");
    std::vector<double> t;
    t.reserve(xs * y1.output_size() * y2.output_size() * z.output_size());
    for (std::size_t x = 0; x < xs; ++x)
        for (std::size_t a = 0; a < y1.output_size(); ++a)
            for (std::size_t b = 0; b < y2.output_size(); ++b)
                for (std::size_t c = 0; c < z.output_size(); ++c) t.push_back(y1(x, a) * y2(x, b) * z(x, c));
    return BroadcastChannelSpec(xs, y1.output_size(), y2.output_size(), z.output_size(), std::move(t));
}

AuxiliaryStructure::AuxiliaryStructure(std::size_t u1, std::size_t u2, Pmf joint, ConditionalPmf channel_input_map)
    : u1_(u1), u2_(u2), joint_(std::move(joint)), map_(std::move(channel_input_map))
{
    if (u1 == 0 || u2 == 0) throw ValidationError("AuxiliaryStructure: alphabet sizes must be positive");
    if (joint_.size() != u1 * u2) throw ValidationError("AuxiliaryStructure: joint has wrong support size");
    if (map_.input_size() != u1 * u2)
        throw ValidationError("AuxiliaryStructure: channel input map needs one row per (u1, u2)");
}

Pmf AuxiliaryStructure::marginal_u1() const
{
    std::vector<double> m(u1_, 0.0);
    for (std::size_t a = 0; a < u1_; ++a)
        for (std::size_t b = 0; b < u2_; ++b) m[a] += joint_[a * u2_ + b];
    return Pmf(std::move(m));
}

Pmf AuxiliaryStructure::marginal_u2() const
{
    std::vector<double> m(u2_, 0.0);
    for (std::size_t a = 0; a < u1_; ++a)
        for (std::size_t b = 0; b < u2_; ++b) m[b] += joint_[a * u2_ + b];
    return Pmf(std::move(m));
}

double entropy(const Pmf& p)
{
    if (p.size() == 0) throw ValidationError("entropy: empty Pmf");
    return plogp_sum(p.probs());
}

namespace {

void check_dims(const Pmf& joint, std::size_t size_a, std::size_t size_b)
{
    if (size_a == 0 || size_b == 0 || joint.size() != size_a * size_b)
        throw ValidationError("mutual_information: joint size does not match size_a * size_b");
}

std::vector<double> row_sums(const Pmf& joint, std::size_t size_a, std::size_t size_b)
{
    std::vector<double> m(size_a, 0.0);
    for (std::size_t a = 0; a < size_a; ++a)
        for (std::size_t b = 0; b < size_b; ++b) m[a] += joint[a * size_b + b];
    return m;
}

std::vector<double> col_sums(const Pmf& joint, std::size_t size_a, std::size_t size_b)
{
    std::vector<double> m(size_b, 0.0);
    for (std::size_t a = 0; a < size_a; ++a)
        for (std::size_t b = 0; b < size_b; ++b) m[b] += joint[a * size_b + b];
    return m;
}

} // namespace

double mutual_information(const Pmf& joint, std::size_t size_a, std::size_t size_b)
{
    check_dims(joint, size_a, size_b);
    const double i = plogp_sum(row_sums(joint, size_a, size_b)) + plogp_sum(col_sums(joint, size_a, size_b)) -
                     plogp_sum(joint.probs());
    return std::max(0.0, i);
}

double mutual_information_divergence(const Pmf& joint, std::size_t size_a, std::size_t size_b)
{
    check_dims(joint, size_a, size_b);
    const auto pa = row_sums(joint, size_a, size_b);
    const auto pb = col_sums(joint, size_a, size_b);
    double i = 0.0;
    for (std::size_t a = 0; a < size_a; ++a)
        for (std::size_t b = 0; b < size_b; ++b) {
            const double p = joint[a * size_b + b];
            if (p > 0.0) i += p * std::log2(p / (pa[a] * pb[b]));
        }
    return std::max(0.0, i);
}

Pmf aux_output_joint(const AuxiliaryStructure& aux, const ConditionalPmf& to_output, int receiver)
{
    if (aux.x_size() != to_output.input_size())
        throw ValidationError("aux_output_joint: channel input alphabet differs from aux map output");
    const std::size_t us = receiver == 1 ? aux.u1_size() : aux.u2_size();
    const std::size_t ys = to_output.output_size();
    std::vector<double> j(us * ys, 0.0);
    const auto& map = aux.channel_input_map();
    for (std::size_t a = 0; a < aux.u1_size(); ++a)
        for (std::size_t b = 0; b < aux.u2_size(); ++b) {
            const std::size_t pair = a * aux.u2_size() + b;
            const double pu = aux.joint()[pair];
            if (pu == 0.0) continue;
            const std::size_t u = receiver == 1 ? a : b;
            for (std::size_t x = 0; x < aux.x_size(); ++x) {
                const double px = pu * map(pair, x);
                if (px == 0.0) continue;
                for (std::size_t y = 0; y < ys; ++y) j[u * ys + y] += px * to_output(x, y);
            }
        }
    const double total = std::accumulate(j.begin(), j.end(), 0.0);
    if (std::abs(total - 1.0) > kInfoTolerance)
        throw ValidationError("aux_output_joint: composed law does not normalize");
    for (double& v : j) v /= total;
    return Pmf(std::move(j));
}

MutualInfoProfile induced_distributions(const AuxiliaryStructure& aux, const BroadcastChannelSpec& ch)
{
    if (aux.x_size() != ch.x_size())
        throw ValidationError("induced_distributions: aux map output size differs from channel input size");
    const auto y1 = ch.to_y1();
    const auto y2 = ch.to_y2();
    const auto z = ch.to_z();
    MutualInfoProfile mi;
    mi.i_u1_y1 = mutual_information(aux_output_joint(aux, y1, 1), aux.u1_size(), y1.output_size());
    mi.i_u2_y2 = mutual_information(aux_output_joint(aux, y2, 2), aux.u2_size(), y2.output_size());
    mi.i_u1_z = mutual_information(aux_output_joint(aux, z, 1), aux.u1_size(), z.output_size());
    mi.i_u2_z = mutual_information(aux_output_joint(aux, z, 2), aux.u2_size(), z.output_size());
    mi.i_u1_u2 = mutual_information(aux.joint(), aux.u1_size(), aux.u2_size());
    return mi;
}

namespace {

bool counts_typical(std::span<const std::size_t> counts, std::size_t n, const Pmf& p, double eps)
{
    const double len = static_cast<double>(n);
    for (std::size_t a = 0; a < p.size(); ++a) {
        const double freq = static_cast<double>(counts[a]) / len;
        if (std::abs(freq - p[a]) > eps * p[a]) return false;
    }
    return true;
}

} // namespace

bool is_typical(std::span<const Symbol> seq, const Pmf& p, double eps)
{
    if (seq.empty()) throw ValidationError("is_typical: empty sequence");
    if (!(eps > 0.0)) throw ValidationError("is_typical: eps must be positive");
    std::vector<std::size_t> counts(p.size(), 0);
    for (Symbol s : seq) {
        if (s < 0 || static_cast<std::size_t>(s) >= p.size())
            throw ValidationError("is_typical: symbol outside alphabet");
        ++counts[static_cast<std::size_t>(s)];
    }
    return counts_typical(counts, seq.size(), p, eps);
}

bool is_jointly_typical(std::span<const Symbol> seq_a, std::span<const Symbol> seq_b, const Pmf& joint,
                        std::size_t size_a, std::size_t size_b, double eps)
{
    if (seq_a.size() != seq_b.size()) throw ValidationError("is_jointly_typical: sequence lengths differ");
    if (seq_a.empty()) throw ValidationError("is_jointly_typical: empty sequences");
    if (!(eps > 0.0)) throw ValidationError("is_jointly_typical: eps must be positive");
    if (joint.size() != size_a * size_b) throw ValidationError("is_jointly_typical: joint size mismatch");
    std::vector<std::size_t> counts(joint.size(), 0);
    for (std::size_t j = 0; j < seq_a.size(); ++j) {
        const Symbol a = seq_a[j];
        const Symbol b = seq_b[j];
        if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= size_a || static_cast<std::size_t>(b) >= size_b)
            throw ValidationError("is_jointly_typical: symbol outside alphabet");
        ++counts[static_cast<std::size_t>(a) * size_b + static_cast<std::size_t>(b)];
    }
    return counts_typical(counts, seq_a.size(), joint, eps);
}

JointTypicalityTable::JointTypicalityTable(const Pmf& joint, std::size_t size_a, std::size_t size_b, int n,
                                           double eps)
    : size_b_(size_b), cells_(joint.size()), n_(static_cast<std::size_t>(n))
{
    if (n < 1) throw ValidationError("JointTypicalityTable: n must be positive");
    if (!(eps > 0.0)) throw ValidationError("JointTypicalityTable: eps must be positive");
    if (joint.size() != size_a * size_b) throw ValidationError("JointTypicalityTable: joint size mismatch");
    allowed_.assign(cells_ * (n_ + 1), 0);
    for (std::size_t c = 0; c < cells_; ++c)
        for (std::size_t k = 0; k <= n_; ++k) {
            const double freq = static_cast<double>(k) / static_cast<double>(n_);
            const bool ok = !(std::abs(freq - joint[c]) > eps * joint[c]);
            allowed_[c * (n_ + 1) + k] = ok ? 1 : 0;
            vacuous_ = vacuous_ && ok;
        }
}

bool JointTypicalityTable::operator()(std::span<const Symbol> a, std::span<const Symbol> b) const
{
    // small alphabets: a stack buffer avoids per-call allocation
    constexpr std::size_t kInline = 64;
    std::uint32_t inline_counts[kInline];
    std::vector<std::uint32_t> heap_counts;
    std::uint32_t* counts = inline_counts;
    if (cells_ > kInline) {
        heap_counts.resize(cells_);
        counts = heap_counts.data();
    }
    std::fill(counts, counts + cells_, 0u);
    for (std::size_t j = 0; j < n_; ++j)
        ++counts[static_cast<std::size_t>(a[j]) * size_b_ + static_cast<std::size_t>(b[j])];
    for (std::size_t c = 0; c < cells_; ++c)
        if (!allowed_[c * (n_ + 1) + counts[c]]) return false;
    return true;
}

} // namespace seclab
