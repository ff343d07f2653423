#pragma once

#include <array>
#include <vector>

#include "snowflake/field.hpp"
#include "snowflake/young.hpp"

namespace snowflake::currents {

/// The level-i closed snowflake boundary polygon: 3*4^i segments of length
/// 3^(-i) on the unit initial triangle, traversed counterclockwise with
/// bumps pointing outward. The parametrization is arc-length proportional
/// on [0,1] (uniform speed 3*(4/3)^i), corner-preserving across levels, with
/// vertices[0] == vertices.back() bit-exactly.
struct KochPath {
    int level = 0;
    std::vector<std::array<double, 2>> vertices;  // size 3*4^level + 1

    int segments() const { return static_cast<int>(vertices.size()) - 1; }
    double segment_length() const;
    double speed() const;  // segments * segment_length = 3*(4/3)^level
    void eval(double t, std::span<double> out) const;  // t in [0,1]

    /// Signed shoelace area (positive: counterclockwise).
    double area() const;

    /// Exposes the path as a Hölder map [0,1] -> R^2 with the exact
    /// per-level Lipschitz constant (certified).
    HolderMap as_map() const;
};

KochPath koch_parametrization(int level);

/// Max sampled quotient |phi(s)-phi(t)| / d(s,t)^alpha with the circle
/// metric d(s,t) = min(|s-t|, 1-|s-t|) and alpha = log 3 / log 4. Bounded
/// uniformly in the level; a lower bound on the true constant.
double koch_holder_quotient(const KochPath& path, int samples = 20000,
                            std::uint64_t seed = 0xc0c4);

/// alpha = log 3 / log 4, the reciprocal Hausdorff-dimension exponent.
double koch_exponent();

/// Pushforward evaluation over the closed level-i curve:
///   integral over S^1 of (f ∘ phi) d(g ∘ phi),
/// with the periodic parameter domain [0,1].
young::IntegralResult koch_boundary_evaluate(const ScalarField& f, const ScalarField& g,
                                             int level, double tol,
                                             const young::IntegrateOptions& opts = {});

}  // namespace snowflake::currents
