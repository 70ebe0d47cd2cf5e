#include "seclab/region.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "seclab/errors.hpp"
#include "seclab/parallel.hpp"
#include "seclab/rng.hpp"

namespace seclab {

namespace {

constexpr double kZeroCoeff = 1e-12;

double scale_of(const std::vector<double>& a)
{
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

bool is_zero(const std::vector<double>& a)
{
    return std::all_of(a.begin(), a.end(), [](double v) { return v == 0.0; });
}

} // namespace

std::string to_string(Sense s)
{
    switch (s) {
    case Sense::Le: return "<=";
    case Sense::Lt: return "<";
    case Sense::Ge: return ">=";
    case Sense::Gt: return ">";
    }
    return "?";
}

Sense parse_sense(const std::string& s)
{
    if (s == "<=") return Sense::Le;
    if (s == "<") return Sense::Lt;
    if (s == ">=") return Sense::Ge;
    if (s == ">") return Sense::Gt;
    throw ValidationError("unknown constraint sense '" + s + "'");
}

bool LinearConstraint::is_feasibility_condition() const
{
    return std::all_of(coeffs.begin(), coeffs.end(), [](const auto& kv) { return kv.second == 0.0; });
}

double LinearConstraint::coeff(const std::string& var) const
{
    const auto it = coeffs.find(var);
    return it == coeffs.end() ? 0.0 : it->second;
}

bool LinearConstraint::holds(const std::map<std::string, double>& point, double tol) const
{
    double lhs = 0.0;
    for (const auto& [v, c] : coeffs) {
        if (c == 0.0) continue;
        const auto it = point.find(v);
        if (it == point.end()) throw ValidationError("constraint references variable '" + v + "' missing from point");
        lhs += c * it->second;
    }
    switch (sense) {
    case Sense::Le: return lhs <= bound + tol;
    case Sense::Lt: return lhs < bound + tol;
    case Sense::Ge: return lhs >= bound - tol;
    case Sense::Gt: return lhs > bound - tol;
    }
    return false;
}

void ConstraintSystem::add(LinearConstraint c)
{
    for (const auto& [v, coef] : c.coeffs)
        if (coef != 0.0 && !has_variable(v))
            throw ValidationError("constraint references unknown variable '" + v + "'");
    constraints_.push_back(std::move(c));
}

bool ConstraintSystem::has_variable(const std::string& v) const
{
    return std::find(variables_.begin(), variables_.end(), v) != variables_.end();
}

std::vector<LinearConstraint> ConstraintSystem::side_conditions() const
{
    std::vector<LinearConstraint> out;
    for (const auto& c : constraints_)
        if (c.is_feasibility_condition()) out.push_back(c);
    return out;
}

bool ConstraintSystem::side_conditions_hold(double tol) const
{
    for (const auto& c : constraints_)
        if (c.is_feasibility_condition() && !c.holds({}, tol)) return false;
    return true;
}

bool ConstraintSystem::contains(const std::map<std::string, double>& point, double tol) const
{
    if (empty_region_) return false;
    return std::all_of(constraints_.begin(), constraints_.end(), [&](const auto& c) { return c.holds(point, tol); });
}

CanonicalConstraint canonicalize(const LinearConstraint& c, const std::vector<std::string>& vars)
{
    CanonicalConstraint out;
    out.a.assign(vars.size(), 0.0);
    for (const auto& [v, coef] : c.coeffs) {
        if (coef == 0.0) continue;
        const auto it = std::find(vars.begin(), vars.end(), v);
        if (it == vars.end()) throw ValidationError("canonicalize: unknown variable '" + v + "'");
        out.a[static_cast<std::size_t>(it - vars.begin())] = coef;
    }
    out.b = c.bound;
    out.strict = c.strict();
    if (c.sense == Sense::Ge || c.sense == Sense::Gt) {
        for (double& v : out.a) v = -v;
        out.b = -out.b;
    }
    const double s = scale_of(out.a);
    if (s > 0.0) {
        for (double& v : out.a) v /= s;
        out.b /= s;
    }
    return out;
}

LinearConstraint from_canonical(const CanonicalConstraint& c, const std::vector<std::string>& vars, std::string label)
{
    LinearConstraint out;
    for (std::size_t k = 0; k < vars.size(); ++k)
        if (c.a[k] != 0.0) out.coeffs[vars[k]] = c.a[k];
    out.sense = c.strict ? Sense::Lt : Sense::Le;
    out.bound = c.b;
    out.label = std::move(label);
    return out;
}

namespace {

bool same_direction(const CanonicalConstraint& x, const CanonicalConstraint& y, double tol)
{
    for (std::size_t k = 0; k < x.a.size(); ++k)
        if (std::abs(x.a[k] - y.a[k]) > tol) return false;
    return true;
}

bool bounds_equal(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(a)); }

/// x makes y redundant.
bool dominates(const CanonicalConstraint& x, const CanonicalConstraint& y, double tol)
{
    if (!same_direction(x, y, tol)) return false;
    if (is_zero(x.a)) return bounds_equal(x.b, y.b, tol) && x.strict == y.strict;
    if (bounds_equal(x.b, y.b, tol)) return x.strict || !y.strict;
    return x.b < y.b;
}

constexpr double kDominanceTol = 1e-9;

} // namespace

ConstraintSystem remove_redundant(const ConstraintSystem& sys)
{
    const auto& vars = sys.variables();
    const auto& cons = sys.constraints();
    std::vector<CanonicalConstraint> canon;
    canon.reserve(cons.size());
    for (const auto& c : cons) canon.push_back(canonicalize(c, vars));

    std::vector<bool> keep(cons.size(), true);
    for (std::size_t i = 0; i < cons.size(); ++i) {
        if (!keep[i]) continue;
        for (std::size_t j = 0; j < cons.size(); ++j) {
            if (i == j || !keep[j]) continue;
            if (dominates(canon[j], canon[i], kDominanceTol)) {
                keep[i] = false;
                break;
            }
        }
    }
    ConstraintSystem out(vars);
    if (sys.empty_region()) out.mark_empty();
    for (std::size_t i = 0; i < cons.size(); ++i)
        if (keep[i]) out.add(cons[i]);
    return out;
}

ConstraintSystem fourier_motzkin_eliminate(const ConstraintSystem& sys, const std::string& var)
{
    if (!sys.has_variable(var)) throw ValidationError("fourier_motzkin_eliminate: unknown variable '" + var + "'");
    const auto& vars = sys.variables();
    const auto k = static_cast<std::size_t>(std::find(vars.begin(), vars.end(), var) - vars.begin());
    std::vector<std::string> rest;
    for (const auto& v : vars)
        if (v != var) rest.push_back(v);

    std::vector<CanonicalConstraint> upper, lower, keep;
    std::vector<std::string> keep_labels;
    for (const auto& c : sys.constraints()) {
        auto cc = canonicalize(c, vars);
        if (cc.a[k] > 0.0)
            upper.push_back(std::move(cc));
        else if (cc.a[k] < 0.0)
            lower.push_back(std::move(cc));
        else {
            keep.push_back(std::move(cc));
            keep_labels.push_back(c.label);
        }
    }

    auto project = [&](const CanonicalConstraint& c) {
        CanonicalConstraint out;
        out.b = c.b;
        out.strict = c.strict;
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (i != k) out.a.push_back(c.a[i]);
        return out;
    };

    ConstraintSystem out(rest);
    if (sys.empty_region()) out.mark_empty();
    for (std::size_t i = 0; i < keep.size(); ++i) out.add(from_canonical(project(keep[i]), rest, keep_labels[i]));

    for (const auto& up : upper)
        for (const auto& lo : lower) {
            // (-lo.a[k]) * up + up.a[k] * lo cancels the eliminated variable
            const double wu = -lo.a[k];
            const double wl = up.a[k];
            CanonicalConstraint comb;
            comb.a.assign(vars.size(), 0.0);
            for (std::size_t i = 0; i < vars.size(); ++i) {
                double v = wu * up.a[i] + wl * lo.a[i];
                const double mag = wu * std::abs(up.a[i]) + wl * std::abs(lo.a[i]);
                if (i == k || std::abs(v) <= kZeroCoeff * std::max(1.0, mag)) v = 0.0;
                comb.a[i] = v;
            }
            comb.b = wu * up.b + wl * lo.b;
            comb.strict = up.strict || lo.strict;
            const double s = scale_of(comb.a);
            if (s > 0.0) {
                for (double& v : comb.a) v /= s;
                comb.b /= s;
            }
            out.add(from_canonical(project(comb), rest));
        }
    return remove_redundant(out);
}

ConstraintSystem fourier_motzkin_eliminate(const ConstraintSystem& sys, const std::vector<std::string>& vars)
{
    ConstraintSystem cur = sys;
    for (const auto& v : vars) cur = fourier_motzkin_eliminate(cur, v);
    return cur;
}

bool equivalent_systems(const ConstraintSystem& a, const ConstraintSystem& b, double tol)
{
    auto sorted = [](std::vector<std::string> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    if (sorted(a.variables()) != sorted(b.variables())) return false;
    if (a.empty_region() != b.empty_region()) return false;
    const auto& vars = a.variables();
    auto canon_list = [&](const ConstraintSystem& s) {
        std::vector<CanonicalConstraint> out;
        const auto pruned = remove_redundant(s);
        for (const auto& c : pruned.constraints()) out.push_back(canonicalize(c, vars));
        return out;
    };
    const auto ca = canon_list(a);
    auto cb = canon_list(b);
    if (ca.size() != cb.size()) return false;
    std::vector<bool> used(cb.size(), false);
    for (const auto& x : ca) {
        bool matched = false;
        for (std::size_t j = 0; j < cb.size() && !matched; ++j) {
            if (used[j]) continue;
            if (x.strict == cb[j].strict && same_direction(x, cb[j], tol) && bounds_equal(x.b, cb[j].b, tol)) {
                used[j] = true;
                matched = true;
            }
        }
        if (!matched) return false;
    }
    return true;
}

namespace {

LinearConstraint make(std::map<std::string, double> coeffs, Sense sense, double bound, std::string label)
{
    return LinearConstraint{std::move(coeffs), sense, bound, std::move(label)};
}

} // namespace

ConstraintSystem theorem2_system(const MutualInfoProfile& mi)
{
    ConstraintSystem sys({"R1", "R2"});
    const double a1 = mi.i_u1_y1, a2 = mi.i_u2_y2, z1 = mi.i_u1_z, z2 = mi.i_u2_z, c = mi.i_u1_u2;
    sys.add(make({{"R1", 1.0}}, Sense::Lt, a1 - z1, "secrecy-decoding-1"));
    sys.add(make({{"R2", 1.0}}, Sense::Lt, a2 - z2, "secrecy-decoding-2"));
    sys.add(make({{"R1", 1.0}, {"R2", 1.0}}, Sense::Lt, a1 + a2 - c, "sum-decoding"));
    sys.add(make({{"R1", 1.0}}, Sense::Gt, z2, "occupancy-1"));
    sys.add(make({{"R2", 1.0}}, Sense::Gt, z1, "occupancy-2"));
    sys.add(make({{"R1", 1.0}, {"R2", 1.0}}, Sense::Gt, c, "sum-covering"));
    sys.add(make({{"R1", 1.0}}, Sense::Ge, 0.0, "nonneg-R1"));
    sys.add(make({{"R2", 1.0}}, Sense::Ge, 0.0, "nonneg-R2"));
    sys.add(make({}, Sense::Lt, a1 - c, "side-condition-1"));
    sys.add(make({}, Sense::Lt, a2 - c, "side-condition-2"));
    if (!(std::min(a1, a2) > c)) sys.mark_empty();
    return sys;
}

ConstraintSystem pre_fm_system(const MutualInfoProfile& mi)
{
    ConstraintSystem sys({"R1", "R2", "Rl1", "Rl2"});
    sys.add(make({{"Rl1", 1.0}, {"Rl2", 1.0}}, Sense::Gt, mi.i_u1_u2, "covering"));
    sys.add(make({{"R1", 1.0}, {"Rl1", 1.0}}, Sense::Lt, mi.i_u1_y1, "decoding-1"));
    sys.add(make({{"R2", 1.0}, {"Rl2", 1.0}}, Sense::Lt, mi.i_u2_y2, "decoding-2"));
    sys.add(make({{"Rl1", 1.0}}, Sense::Ge, mi.i_u1_z, "secrecy-1"));
    sys.add(make({{"Rl2", 1.0}}, Sense::Ge, mi.i_u2_z, "secrecy-2"));
    sys.add(make({{"R1", 1.0}, {"Rl2", -1.0}}, Sense::Gt, 0.0, "occupancy-1"));
    sys.add(make({{"R2", 1.0}, {"Rl1", -1.0}}, Sense::Gt, 0.0, "occupancy-2"));
    for (const char* v : {"R1", "R2", "Rl1", "Rl2"})
        sys.add(make({{v, 1.0}}, Sense::Ge, 0.0, std::string("nonneg-") + v));
    return sys;
}

double RatePolygon::area() const
{
    double s = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const auto& p = vertices[i];
        const auto& q = vertices[(i + 1) % vertices.size()];
        s += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * s;
}

namespace {

using Point = std::array<double, 2>;

double cross(const Point& o, const Point& a, const Point& b)
{
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

} // namespace

bool RatePolygon::is_convex() const
{
    const std::size_t n = vertices.size();
    if (n < 3) return true;
    for (std::size_t i = 0; i < n; ++i)
        if (cross(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]) < -closure_tolerance) return false;
    return true;
}

std::vector<Point> convex_hull(std::vector<Point> pts, double tol)
{
    std::sort(pts.begin(), pts.end());
    std::vector<Point> uniq;
    for (const auto& p : pts)
        if (uniq.empty() || std::hypot(p[0] - uniq.back()[0], p[1] - uniq.back()[1]) > 1e-9) uniq.push_back(p);
    if (uniq.size() <= 2) return uniq;

    std::vector<Point> hull(2 * uniq.size());
    std::size_t k = 0;
    for (const auto& p : uniq) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= tol) --k;
        hull[k++] = p;
    }
    for (std::size_t i = uniq.size() - 1, lower = k + 1; i-- > 0;) {
        const auto& p = uniq[i];
        while (k >= lower && cross(hull[k - 2], hull[k - 1], p) <= tol) --k;
        hull[k++] = p;
    }
    hull.resize(k - 1);
    return hull;
}

RatePolygon polygon_of(const ConstraintSystem& sys, double tol)
{
    if (sys.variables().size() != 2) throw ValidationError("polygon_of: system must have exactly two variables");
    RatePolygon poly;
    poly.closure_tolerance = tol;
    if (sys.empty_region()) return poly;

    std::vector<CanonicalConstraint> lines;
    for (const auto& c : sys.constraints()) {
        auto cc = canonicalize(c, sys.variables());
        if (is_zero(cc.a)) {
            const bool ok = cc.strict ? cc.b > 0.0 : cc.b >= -tol;
            if (!ok) return poly;
            continue;
        }
        lines.push_back(std::move(cc));
    }

    auto feasible = [&](const Point& p) {
        return std::all_of(lines.begin(), lines.end(), [&](const auto& c) {
            return c.a[0] * p[0] + c.a[1] * p[1] <= c.b + tol * std::max(1.0, std::abs(c.b));
        });
    };

    std::vector<Point> candidates;
    for (std::size_t i = 0; i < lines.size(); ++i)
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            const auto& p = lines[i];
            const auto& q = lines[j];
            const double det = p.a[0] * q.a[1] - p.a[1] * q.a[0];
            if (std::abs(det) < 1e-14) continue;
            const Point x{(p.b * q.a[1] - p.a[1] * q.b) / det, (p.a[0] * q.b - p.b * q.a[0]) / det};
            if (feasible(x)) candidates.push_back(x);
        }

    // recession cone {d : a.d <= 0 for all a}; in 2D it is non-trivial iff it
    // contains a direction along some constraint boundary (or there is none)
    std::vector<Point> dirs;
    if (lines.empty()) dirs = {{1.0, 0.0}};
    for (const auto& c : lines) {
        dirs.push_back({-c.a[1], c.a[0]});
        dirs.push_back({c.a[1], -c.a[0]});
    }
    const bool unbounded_cone = std::any_of(dirs.begin(), dirs.end(), [&](const Point& d) {
        return std::all_of(lines.begin(), lines.end(), [&](const auto& c) { return c.a[0] * d[0] + c.a[1] * d[1] <= 1e-12; });
    });
    if (unbounded_cone) {
        bool nonempty = !candidates.empty() || feasible({0.0, 0.0});
        for (const auto& c : lines) {
            if (nonempty) break;
            const double nn = c.a[0] * c.a[0] + c.a[1] * c.a[1];
            nonempty = feasible({c.a[0] * c.b / nn, c.a[1] * c.b / nn});
        }
        if (nonempty) throw ValidationError("polygon_of: region is unbounded");
        return poly;
    }

    poly.vertices = convex_hull(std::move(candidates));
    const std::size_t n = poly.vertices.size();
    poly.open_edges.assign(n, false);
    for (std::size_t e = 0; e < n; ++e) {
        const auto& p = poly.vertices[e];
        const auto& q = poly.vertices[(e + 1) % n];
        for (const auto& c : lines) {
            const double slack = tol * std::max(1.0, std::abs(c.b)) * 10.0;
            const bool tight = std::abs(c.a[0] * p[0] + c.a[1] * p[1] - c.b) <= slack &&
                               std::abs(c.a[0] * q[0] + c.a[1] * q[1] - c.b) <= slack;
            if (tight && c.strict) poly.open_edges[e] = true;
        }
    }
    return poly;
}

namespace {

std::vector<double> dirichlet(Rng& rng, std::size_t k)
{
    std::vector<double> v(k);
    for (auto& x : v) x = -std::log(1.0 - rng.uniform01());
    const double total = std::accumulate(v.begin(), v.end(), 0.0);
    for (auto& x : v) x /= total;
    return v;
}

void compositions(std::size_t parts, int total, std::vector<int>& cur, std::vector<std::vector<int>>& out)
{
    if (cur.size() + 1 == parts) {
        cur.push_back(total);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int k = 0; k <= total; ++k) {
        cur.push_back(k);
        compositions(parts, total - k, cur, out);
        cur.pop_back();
    }
}

std::optional<DistributionSample> evaluate(std::size_t index, AuxiliaryStructure aux, const BroadcastChannelSpec& ch)
{
    DistributionSample s;
    s.index = index;
    s.mi = induced_distributions(aux, ch);
    const auto sys = theorem2_system(s.mi);
    if (sys.empty_region()) return std::nullopt;
    s.polygon = polygon_of(sys);
    s.aux = std::move(aux);
    return s;
}

} // namespace

SearchResult search_distributions(const BroadcastChannelSpec& ch, std::size_t u1_size, std::size_t u2_size,
                                  std::size_t samples, std::uint64_t seed, SearchMode mode)
{
    if (u1_size == 0 || u2_size == 0) throw ValidationError("search_distributions: alphabet sizes must be positive");
    const std::size_t pairs = u1_size * u2_size;
    const std::size_t xs = ch.x_size();

    std::size_t count = samples;
    std::vector<std::vector<int>> grid_joints;
    std::size_t map_count = 0;
    if (mode == SearchMode::Grid) {
        std::vector<int> cur;
        compositions(pairs, 4, cur, grid_joints);
        const double log_maps = static_cast<double>(pairs) * std::log2(static_cast<double>(xs));
        if (log_maps + std::log2(static_cast<double>(grid_joints.size())) > 20.0)
            throw SizeError("search_distributions: grid enumeration exceeds 2^20 samples");
        map_count = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(xs), static_cast<double>(pairs))));
        count = grid_joints.size() * map_count;
    }

    auto build = [&](std::size_t idx) -> AuxiliaryStructure {
        std::vector<double> joint(pairs);
        std::vector<Pmf> rows;
        rows.reserve(pairs);
        if (mode == SearchMode::Grid) {
            const auto& comp = grid_joints[idx / map_count];
            for (std::size_t k = 0; k < pairs; ++k) joint[k] = comp[k] / 4.0;
            std::size_t code = idx % map_count;
            for (std::size_t k = 0; k < pairs; ++k) {
                rows.push_back(Pmf::point_mass(xs, code % xs));
                code /= xs;
            }
        } else {
            Rng rng(derive_seed(derive_seed(seed, streams::kSearch), idx));
            joint = dirichlet(rng, pairs);
            const bool deterministic = rng.below(2) == 0;
            for (std::size_t k = 0; k < pairs; ++k)
                rows.push_back(deterministic ? Pmf::point_mass(xs, rng.below(xs)) : Pmf(dirichlet(rng, xs)));
        }
        return AuxiliaryStructure(u1_size, u2_size, Pmf(std::move(joint)), ConditionalPmf(std::move(rows)));
    };

    std::vector<std::optional<DistributionSample>> slots(count);
    parallel_for(count, [&](std::size_t idx) { slots[idx] = evaluate(idx, build(idx), ch); });

    SearchResult res;
    res.evaluated = count;
    std::vector<Point> cloud;
    for (auto& s : slots) {
        if (!s) continue;
        cloud.insert(cloud.end(), s->polygon.vertices.begin(), s->polygon.vertices.end());
        res.samples.push_back(std::move(*s));
    }
    res.union_hull = convex_hull(std::move(cloud));
    return res;
}

} // namespace seclab
