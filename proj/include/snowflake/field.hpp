#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snowflake/geometry.hpp"

namespace snowflake {

using FieldEval = std::function<double(std::span<const double>)>;

/// A real-valued function on a host box together with its declared Hölder
/// data. Evaluators must be pure; everything here is immutable after
/// construction and safe to call concurrently.
struct ScalarField {
    FieldEval eval;
    double exponent = 1.0;                  // alpha in (0,1]
    std::optional<double> holder_bound;     // declared/derived C with |f(x)-f(y)| <= C|x-y|^alpha
    std::optional<double> sup_bound;        // declared/derived bound on ||f||_inf
    bool certified = false;                 // true when the bounds above are certified, not sampled
    std::optional<Box> support;             // zero outside this sub-box, when declared
    std::string label;

    double operator()(std::span<const double> x) const { return eval(x); }
};

/// The integrator tuple (g_1,...,g_n) on a common host box.
struct FieldTuple {
    Box domain;
    std::vector<ScalarField> fields;

    int size() const { return static_cast<int>(fields.size()); }
    std::vector<double> exponents() const;
    double beta_bar() const;  // sum of exponents
    /// Product of declared Hölder bounds; empty if any is missing.
    std::optional<double> holder_product() const;
    bool all_certified() const;
};

/// Result of the Lipschitz inf-convolution approximation. The guarantee
/// numbers are the exact formulas C*eps^(alpha-1), C*eps^alpha and 3C; the
/// grid_error term accounts for the finite inner minimization grid.
struct ApproxField {
    ScalarField approx;
    double eps = 0.0;
    double search_step = 0.0;
    double lip_bound = 0.0;         // C * eps^(alpha-1)
    double sup_error = 0.0;         // C * eps^alpha
    double holder_bound_out = 0.0;  // 3C
    double grid_error = 0.0;        // see inf_convolution
};

// --- constructors -----------------------------------------------------------

ScalarField constant_field(double value, int dim);
ScalarField coordinate_field(int axis, int dim);

/// f + g; exponent is the smaller one, bounds propagated on `domain`.
ScalarField field_sum(const ScalarField& a, const ScalarField& b, const Box& domain);
/// c * f.
ScalarField field_scale(const ScalarField& a, double c);
/// f * g with the Hölder bound propagated through
///   H^a(ff') <= ||f||_inf H^b(f') diam^(b-a) + ||f'||_inf H^a(f),  a <= b,
/// which the bound machinery needs for the product rule.
ScalarField field_product(const ScalarField& a, const ScalarField& b, const Box& domain);

/// A Hölder map between boxes (phi: param box -> R^out_dim) with declared
/// constants in the Euclidean norms.
struct HolderMap {
    int in_dim = 1;
    int out_dim = 1;
    std::function<void(std::span<const double>, std::span<double>)> eval;
    double exponent = 1.0;
    std::optional<double> holder_bound;
    bool certified = false;
    std::string label;
};

/// g ∘ phi; composition multiplies exponents and the bound becomes
/// H(g) * H(phi)^exponent(g).
ScalarField pullback_field(const ScalarField& g, const HolderMap& phi);

// --- lacunary series ---------------------------------------------------------

enum class LacunaryKind {
    cosine_1d,     // sum_{i=1..m} 2^(-i a) cos(2^i x_axis)
    sine_product,  // sum_{i=1..m} 2^(-i a) prod_k sin(2^i x_k)
};

/// Certified alpha-Hölder constant of the cosine/sine lacunary partial sums,
/// uniform in the number of terms:
///   K(a) = 1/(1 - 2^(a-1)) + 2/(1 - 2^(-a)).
/// Derivation: with h = |x-y| < 1 split the sum at the largest I with
/// 2^I <= 1/h; terms i <= I use |cos(2^i x)-cos(2^i y)| <= 2^i h and sum to
/// h^a/(1-2^(a-1)), terms i > I use the bound 2 and sum to 2 h^a/(1-2^(-a)).
/// For h >= 1 the trivial bound 2 sum 2^(-ia) <= 2/(1-2^(-a)) <= K(a) h^a.
double lacunary_holder_constant(double alpha);

/// Builds the partial-sum field with certified constants. `axis` selects the
/// variable for cosine_1d; sine_product multiplies the constant by dim (one
/// factor per coordinate difference).
ScalarField lacunary_series(double alpha, int num_terms, LacunaryKind kind, int axis, int dim);

// --- estimation and approximation -------------------------------------------

/// Max sampled quotient |f(x)-f(x')| / |x-x'|^alpha over `samples` pairs
/// (scale-stratified, deterministic for a fixed seed). This is a LOWER bound
/// on the true Hölder constant; certified bounds must be declared.
double estimate_holder_constant(const FieldEval& f, const Box& box, double alpha, int samples,
                                std::uint64_t seed = 0x5eed);

/// Sampled sup of |f| on a grid (lower bound on the true sup).
double estimate_sup(const FieldEval& f, const Box& box, int samples, std::uint64_t seed = 0x5eed);

/// The Lipschitz approximation
///   f_eps(x) = inf { f(y) + C eps^(alpha-1) |x-y| : y, |x-y| <= eps }
/// with the infimum over a fixed grid of pitch `search_step` anchored to the
/// host box (plus y = x itself, so f_eps <= f pointwise). Requires
/// search_step <= eps/4. The grid evaluator overshoots the exact infimum by
/// at most
///   grid_error = C (s sqrt(n)/2)^alpha + C eps^(alpha-1) (s sqrt(n)/2),
/// obtained by moving the true minimizer to the nearest grid point: the
/// distance term moves by at most s sqrt(n)/2 and f itself by at most
/// C (s sqrt(n)/2)^alpha.
ApproxField inf_convolution(const ScalarField& f, const Box& host, double eps, double search_step);

}  // namespace snowflake
