#pragma once

// Linear constraint systems over named rate variables, Fourier-Motzkin
// projection, and the individual-secrecy rate region of the Marton scheme:
//
//   R1 < I(U1;Y1) - I(U1;Z)          R1 > I(U2;Z)
//   R2 < I(U2;Y2) - I(U2;Z)          R2 > I(U1;Z)
//   R1 + R2 < I(U1;Y1) + I(U2;Y2) - I(U1;U2)
//   R1 + R2 > I(U1;U2)
//   subject to min{I(U1;Y1), I(U2;Y2)} > I(U1;U2).
//
// Strict lower bounds keep the region off the axes; rate points lost that
// way can be recovered by padding each message with extra random bits, so
// callers that want the closure should use the polygon (which is closed).

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seclab/channel.hpp"

namespace seclab {

enum class Sense { Le, Lt, Ge, Gt };

std::string to_string(Sense s);
Sense parse_sense(const std::string& s);

/// sum_v coeffs[v] * v  (sense)  bound. With no nonzero coefficient the
/// constraint is a feasibility condition: 0 (sense) bound.
struct LinearConstraint {
    std::map<std::string, double> coeffs;
    Sense sense = Sense::Le;
    double bound = 0.0;
    std::string label; ///< optional provenance tag, e.g. "covering"

    bool strict() const noexcept { return sense == Sense::Lt || sense == Sense::Gt; }
    bool is_feasibility_condition() const;
    double coeff(const std::string& var) const;
    /// Evaluates at a point given by variable values.
    bool holds(const std::map<std::string, double>& point, double tol = 0.0) const;
};

class ConstraintSystem {
public:
    ConstraintSystem() = default;
    explicit ConstraintSystem(std::vector<std::string> variables) : variables_(std::move(variables)) {}

    const std::vector<std::string>& variables() const noexcept { return variables_; }
    const std::vector<LinearConstraint>& constraints() const noexcept { return constraints_; }

    /// Throws ValidationError if the constraint references an unknown variable.
    void add(LinearConstraint c);
    bool has_variable(const std::string& v) const;

    /// Set when a system is known to describe the empty set, e.g. when the
    /// side condition of the rate region fails.
    bool empty_region() const noexcept { return empty_region_; }
    void mark_empty() { empty_region_ = true; }

    /// Feasibility conditions (zero-coefficient constraints).
    std::vector<LinearConstraint> side_conditions() const;
    /// True if every feasibility condition holds (strictness respected).
    bool side_conditions_hold(double tol = 0.0) const;

    bool contains(const std::map<std::string, double>& point, double tol = 0.0) const;

private:
    std::vector<std::string> variables_;
    std::vector<LinearConstraint> constraints_;
    bool empty_region_ = false;
};

/// Constraint rewritten as a . x (< or <=) b over an ordered variable list,
/// scaled so that max |a_k| = 1 (feasibility conditions are left unscaled).
struct CanonicalConstraint {
    std::vector<double> a;
    double b = 0.0;
    bool strict = false;
};

CanonicalConstraint canonicalize(const LinearConstraint& c, const std::vector<std::string>& vars);
LinearConstraint from_canonical(const CanonicalConstraint& c, const std::vector<std::string>& vars,
                                std::string label = {});

/// Drops constraints implied by a single other one (same normalized
/// coefficients, looser bound; strict beats non-strict at equal bounds) and
/// exact duplicates. Feasibility conditions are only de-duplicated.
ConstraintSystem remove_redundant(const ConstraintSystem& sys);

/// Projects out `var`: every lower bound on var is paired with every upper
/// bound; a combination is strict iff either parent is. Zero-coefficient
/// results are kept as feasibility conditions. Redundancy is pruned after.
ConstraintSystem fourier_motzkin_eliminate(const ConstraintSystem& sys, const std::string& var);

ConstraintSystem fourier_motzkin_eliminate(const ConstraintSystem& sys, const std::vector<std::string>& vars);

/// Order-insensitive comparison after canonicalization and redundancy
/// removal. Both systems must share the same variable set.
bool equivalent_systems(const ConstraintSystem& a, const ConstraintSystem& b, double tol = 1e-9);

/// Region of achievable (R1, R2); empty_region() set when the side condition fails.
ConstraintSystem theorem2_system(const MutualInfoProfile& mi);

/// System over (R1, R2, Rl1, Rl2) before projection:
///   covering   Rl1 + Rl2 > I(U1;U2)
///   decoding   R1 + Rl1 < I(U1;Y1),  R2 + Rl2 < I(U2;Y2)
///   secrecy    Rl1 >= I(U1;Z),       Rl2 >= I(U2;Z)
///   occupancy  R1 > Rl2,             R2 > Rl1
///   plus non-negativity of all four rates.
ConstraintSystem pre_fm_system(const MutualInfoProfile& mi);

struct RatePolygon {
    std::vector<std::array<double, 2>> vertices; ///< counter-clockwise
    /// open_edges[k] is true when edge vertices[k] -> vertices[k+1] lies on a
    /// strict constraint, i.e. belongs to the closure but not the region.
    std::vector<bool> open_edges;
    double closure_tolerance = 1e-9;

    bool empty() const noexcept { return vertices.empty(); }
    double area() const;
    bool is_convex() const;
};

/// Closure of a bounded system over exactly two variables (strict treated as
/// closed). Empty or infeasible systems give an empty polygon; unbounded
/// systems throw ValidationError.
RatePolygon polygon_of(const ConstraintSystem& sys, double tol = 1e-9);

/// Convex hull (counter-clockwise, collinear points dropped).
std::vector<std::array<double, 2>> convex_hull(std::vector<std::array<double, 2>> pts, double tol = 1e-12);

struct DistributionSample {
    std::size_t index = 0;
    AuxiliaryStructure aux;
    MutualInfoProfile mi;
    RatePolygon polygon;
};

enum class SearchMode {
    Random, ///< Dirichlet(1) joints; maps half deterministic, half stochastic rows
    Grid,   ///< every deterministic map x every joint on the 0.25 simplex grid (seed-free)
};

struct SearchResult {
    std::vector<DistributionSample> samples; ///< survivors of the side condition, by index
    std::vector<std::array<double, 2>> union_hull; ///< convex hull of all surviving vertices
    std::size_t evaluated = 0;
};

SearchResult search_distributions(const BroadcastChannelSpec& ch, std::size_t u1_size, std::size_t u2_size,
                                  std::size_t samples, std::uint64_t seed, SearchMode mode = SearchMode::Random);

} // namespace seclab
