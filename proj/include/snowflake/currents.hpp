#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "snowflake/field.hpp"
#include "snowflake/geometry.hpp"
#include "snowflake/koch.hpp"
#include "snowflake/oracle.hpp"
#include "snowflake/young.hpp"

namespace snowflake::currents {

/// A weighted formal sum of oriented boxes acting as a locally normal
/// current: T(f, g) = sum_t weight_t * orientation_t * integral over box_t.
struct BoxChain {
    int dim = 1;
    struct Term {
        Box box;
        double weight = 1.0;
        int orientation = 1;
    };
    std::vector<Term> terms;
};

struct ChainNorms {
    double mass = 0.0;           // sum |w| vol(box)
    double boundary_mass = 0.0;  // sum |w| surface(box); 1-D boxes count 2 endpoints
};

ChainNorms chain_norms(const BoxChain& chain);

/// Direct evaluation through the dyadic engine; the per-box tolerance is
/// tol / #terms and the certificates add up.
young::IntegralResult chain_evaluate(const BoxChain& chain, const ScalarField& f,
                                     const FieldTuple& g, double tol,
                                     const young::IntegrateOptions& opts = {});

/// The staircase current: intervals [2 s_m, 2 s_m + a_{m+1}] for the partial
/// sums s_m of a summable positive sequence, truncated to `cutoff` terms.
BoxChain staircase_chain(const std::vector<double>& a, int cutoff);

struct StaircaseReport {
    double alpha = 0.0;
    double sum_a_alpha = 0.0;     // sum of a_m^alpha over the cutoff
    double interval_bound_sum = 0.0;  // per-interval thin bounds:
                                      // sum C1 Hf Hg a^(2 alpha) + sup_f Hg a^alpha
    double c1 = 0.0;              // C_1(alpha, alpha), needs alpha > 1/2
};

StaircaseReport staircase_report(const std::vector<double>& a, int cutoff, double alpha,
                                 double sup_f, double holder_f, double holder_g);

/// One row of the approximation-path trace.
struct ApproxStep {
    double eps = 0.0;
    double value = 0.0;   // T(f_eps, g_eps) via Lipschitz quadrature
    double bound = 0.0;   // gap bound to the previous (2x coarser) step:
                          // 6n M(dT) ||f|| C^beta eps^(bb-(n-1))
                          // + 3(n+1) M(T) C^{a,b} eps^(gamma-n)
    bool bound_valid = false;  // requires C^alpha eps^alpha <= ||f||_inf
};

struct ApproxEvalTrace {
    std::vector<ApproxStep> steps;  // eps = 2^-1 .. 2^-m_max
    double limit = 0.0;             // last step value
    double tail_bound = 0.0;        // geometric tail below eps_min
    std::optional<double> cross_value;     // chain_evaluate value
    std::optional<double> cross_combined;  // tail + engine certificate
    std::optional<double> cross_gap;
    bool heuristic = false;  // constants were estimated, not declared
};

struct ApproxEvalOptions {
    int m_max = 6;
    int quadrature_resolution = 2048;  // per axis; divided by 2^dim-ish for n=2
    double search_step_fraction = 1.0 / 64.0;  // search_step = fraction * eps
    bool cross_check = true;
    double cross_tol = 1e-4;
    int workers = 0;
};

/// Evaluates the chain on inf-convolution approximations over the eps
/// schedule 2^-1..2^-m_max and records the Cauchy bounds. Throws
/// "constants undeclared" when a Hölder bound is missing.
ApproxEvalTrace evaluate_via_approximation(const BoxChain& chain, const ScalarField& f,
                                           const FieldTuple& g,
                                           const ApproxEvalOptions& opts = {});

}  // namespace snowflake::currents
