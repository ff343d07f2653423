#pragma once

#include <optional>
#include <span>
#include <vector>

#include "snowflake/field.hpp"
#include "snowflake/geometry.hpp"
#include "snowflake/young.hpp"

namespace snowflake::oracle {

/// Midpoint tensor quadrature with central-difference Jacobians. The
/// finite-difference step is tied to the quadrature pitch so derivative
/// evaluation stays clear of cell boundaries (pointwise derivative failures
/// on null sets are tolerated by midpoint placement).
struct QuadratureSpec {
    std::vector<int> resolution;     // per axis; broadcast if a single entry
    double fd_step_fraction = 0.125; // h = pitch * fraction
    int workers = 0;

    static QuadratureSpec uniform(int res, int dim);
};

/// Reference value of the Lipschitz-case identity: midpoint quadrature of
/// f(x) det(Dg(x)) with Dg by central differences.
double det_quadrature_integral(const FieldEval& f, const std::vector<FieldEval>& g,
                               const Box& box, const QuadratureSpec& spec);

double det_quadrature_integral(const ScalarField& f, const FieldTuple& g, const Box& box,
                               const QuadratureSpec& spec);

/// Classical 1-D Riemann-Stieltjes sum over an arbitrary sorted partition
/// with arbitrary tags: sum f(xi_i) (g(x_i) - g(x_{i-1})).
double stieltjes_1d_brute(const FieldEval& f, const FieldEval& g,
                          std::span<const double> partition, std::span<const double> tags);

/// Uniform partition of [a,b] into `cells` pieces plus deterministic
/// pseudo-random tags inside each cell.
struct BrutePartition {
    std::vector<double> points;
    std::vector<double> tags;
};
BrutePartition uniform_partition(const Box& interval, int cells, bool random_tags,
                                 std::uint64_t seed = 0x7a65);

/// Three-way consistency report for the identity
///   integral of 1 d(g_1..g_n) over A == boundary integral of A.
struct StokesReport {
    double lhs = 0.0;  // engine value of the full integral with f == 1
    double rhs = 0.0;  // boundary integral at the matched level
    double gap = 0.0;
    int level = 0;
    std::optional<double> quadrature;  // present when every g_i is Lipschitz
};

StokesReport stokes_check(const FieldTuple& g, const Box& box, double tol,
                          const young::IntegrateOptions& opts = {});

}  // namespace snowflake::oracle
