#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snowflake/field.hpp"
#include "snowflake/geometry.hpp"

namespace snowflake::young {

/// The recursion constants behind the refinement estimates:
///   C'_1 = 1,
///   C'_m(b_1..b_m) = 2m (C'_{m-1}(b_2..b_m) + C_{m-1}(b_1; b_2..b_m)),
///   C_m(a, b) = C'_m(b) / (1 - 2^(m - gamma)),  gamma = a + sum b_i > m.
struct ErrorConstants {
    int dim = 0;
    double alpha = 1.0;
    std::vector<double> betas;
    double cprime = 1.0;  // C'_n(beta)
    double csum = 1.0;    // C_n(alpha, beta)
    double gamma = 0.0;   // alpha + sum beta_i
    double beta_bar = 0.0;
};

/// Throws ExponentError ("exponent sum too small") when gamma <= n.
ErrorConstants error_constants(int n, double alpha, std::span<const double> betas);

/// C'_n alone; requires sum(betas) > n-1.
double cprime_constant(std::span<const double> betas);

enum class TagRule { Barycenter, Random };
enum class Stopping { Certified, Heuristic, Either };
enum class StopReason { Apriori, AposterioriTail, Budget };

struct EngineOptions {
    int workers = 0;  // 0 = hardware
    TagRule tags = TagRule::Barycenter;
    std::uint64_t seed = 0;
};

struct IntegrateOptions {
    double tol = 1e-6;
    int k_max = 12;
    Stopping stopping = Stopping::Either;
    EngineOptions engine;
    bool adaptive = false;  // heuristic depth-adaptive refinement, never certified
    // consecutive sub-tolerance tails required before the a-posteriori stop
    // fires; symmetric integrands can produce a single spurious zero increment
    int tail_hits = 2;
};

struct IntegralResult {
    double value = 0.0;
    int level = 0;
    double apriori = std::numeric_limits<double>::infinity();
    double aposteriori = std::numeric_limits<double>::infinity();  // last |I_k - I_{k-1}|
    std::uint64_t evaluations = 0;
    StopReason reason = StopReason::Budget;
    bool certified = false;     // constants were declared/derived, not sampled
    double gamma = 0.0;
    double tail_factor = 0.0;   // 2^(n-gamma) / (1 - 2^(n-gamma)); blows up as gamma -> n
};

const char* to_string(StopReason r);

/// Level-k Riemannian sum: cells of P_k(box) are evaluated with f at the tag
/// point times the local boundary-integral rule of the cell (faces at the
/// induced lattice, no extra refinement). Deterministic two-stage reduction:
/// fixed-size chunks summed sequentially, then a pairwise tree over chunk
/// sums, so results are identical for any worker count.
double riemann_sum(const ScalarField& f, const FieldTuple& g, const Box& box, int level,
                   const EngineOptions& opts = {});

/// Signed sum over the 2n oriented box faces of the level-k face integrals
/// (g_1 restricted plays the f role). For dim 1 this is g(t) - g(s) exactly.
/// Shares the cell-face rule with riemann_sum, so
///   riemann_sum(1, g, box, k) == boundary_integral(box, g, k)
/// up to floating-point roundoff (interior faces cancel in pairs).
double boundary_integral(const Box& box, const FieldTuple& g, int level,
                         const EngineOptions& opts = {});

/// The refinement bound C_n diam^gamma 2^(k(n-gamma)) H_f prod H_g.
/// Monotone decreasing in k; zero when H_f == 0.
double apriori_bound(const ErrorConstants& c, int level, double diam, double holder_f,
                     std::span<const double> holder_g);

/// Shape-aware bound in terms of the shortest edge eps:
///   2^(n-1) (C'_n (sqrt n)^bb  sup_f eps^(bb-n)
///          + C_n  (sqrt n)^gam H_f  eps^(gam-n)) L^n(A) prod H_g.
/// The constant K_n = 2^(n-1) max(C'_n (sqrt n)^bb, C_n (sqrt n)^gam) comes
/// from covering A by edge-eps cubes: at most prod_{j>=2}(N_j+1) <=
/// 2^(n-1) L^n(A) eps^(-n) of them, each contributing the k=0 refinement
/// bound with diameter sqrt(n) eps.
double thin_box_bound(const Box& box, const ErrorConstants& c, double sup_f, double holder_f,
                      std::span<const double> holder_g);

/// Dyadic refinement until the certified bound or the a-posteriori tail
/// |I_k - I_{k-1}| 2^(n-gamma)/(1 - 2^(n-gamma)) meets tol, or k_max.
IntegralResult integrate(const ScalarField& f, const FieldTuple& g, const Box& box,
                         const IntegrateOptions& opts = {});

/// Pullback integration: integrate(f∘phi, (g_i∘phi), param_box).
IntegralResult parametrized_integrate(const ScalarField& f, const std::vector<ScalarField>& g,
                                      const HolderMap& phi, const Box& param_box,
                                      const IntegrateOptions& opts = {});

}  // namespace snowflake::young
