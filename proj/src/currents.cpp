#include "snowflake/currents.hpp"

#include <cmath>
#include <stdexcept>

#include "snowflake/errors.hpp"
#include "snowflake/parallel.hpp"

namespace snowflake::currents {

ChainNorms chain_norms(const BoxChain& chain) {
    ChainNorms n;
    for (const auto& t : chain.terms) {
        n.mass += std::abs(t.weight) * t.box.volume();
        n.boundary_mass += std::abs(t.weight) * t.box.surface_area();
    }
    return n;
}

young::IntegralResult chain_evaluate(const BoxChain& chain, const ScalarField& f,
                                     const FieldTuple& g, double tol,
                                     const young::IntegrateOptions& opts) {
    young::IntegralResult total;
    total.apriori = 0.0;
    total.aposteriori = 0.0;
    total.certified = true;
    if (chain.terms.empty()) {
        total.reason = young::StopReason::Apriori;
        return total;
    }
    young::IntegrateOptions o = opts;
    o.tol = tol / static_cast<double>(chain.terms.size());
    std::vector<double> values;
    values.reserve(chain.terms.size());
    for (const auto& t : chain.terms) {
        FieldTuple gt = g;
        gt.domain = t.box;
        auto r = young::integrate(f, gt, t.box, o);
        values.push_back(t.weight * t.orientation * r.value);
        total.apriori += std::abs(t.weight) * r.apriori;
        total.aposteriori += std::abs(t.weight) * r.aposteriori;
        total.evaluations += r.evaluations;
        total.level = std::max(total.level, r.level);
        total.certified = total.certified && r.certified;
        total.gamma = r.gamma;
        total.tail_factor = r.tail_factor;
        if (r.reason == young::StopReason::Budget) total.reason = young::StopReason::Budget;
    }
    total.value = pairwise_sum(values);
    return total;
}

BoxChain staircase_chain(const std::vector<double>& a, int cutoff) {
    if (cutoff < 1) throw std::invalid_argument("staircase_chain: cutoff >= 1");
    if (static_cast<int>(a.size()) < cutoff)
        throw std::invalid_argument("staircase_chain: sequence shorter than cutoff");
    BoxChain chain;
    chain.dim = 1;
    double s = 0.0;  // partial sum s_m, s_0 = 0
    for (int m = 0; m < cutoff; ++m) {
        const double am1 = a[static_cast<std::size_t>(m)];  // a_{m+1} in 1-based terms
        if (!(am1 > 0.0)) throw std::invalid_argument("staircase_chain: sequence must be positive");
        chain.terms.push_back({Box::interval(2.0 * s, 2.0 * s + am1), 1.0, 1});
        s += am1;
    }
    return chain;
}

StaircaseReport staircase_report(const std::vector<double>& a, int cutoff, double alpha,
                                 double sup_f, double holder_f, double holder_g) {
    if (!(alpha > 0.5 && alpha <= 1.0))
        throw ExponentError(
            "exponent sum too small: the per-interval bound needs 2*alpha > 1");
    StaircaseReport rep;
    rep.alpha = alpha;
    rep.c1 = 1.0 / (1.0 - std::pow(2.0, 1.0 - 2.0 * alpha));  // C_1(alpha, alpha)
    for (int m = 0; m < cutoff; ++m) {
        const double am = a[static_cast<std::size_t>(m)];
        rep.sum_a_alpha += std::pow(am, alpha);
        rep.interval_bound_sum += rep.c1 * holder_f * holder_g * std::pow(am, 2.0 * alpha) +
                                  sup_f * holder_g * std::pow(am, alpha);
    }
    return rep;
}

namespace {

double quad_value(const BoxChain& chain, const FieldEval& f, const std::vector<FieldEval>& g,
                  int resolution, int workers) {
    std::vector<double> vals;
    vals.reserve(chain.terms.size());
    for (const auto& t : chain.terms) {
        auto spec = oracle::QuadratureSpec::uniform(resolution, t.box.dim());
        spec.workers = workers;
        vals.push_back(t.weight * t.orientation *
                       oracle::det_quadrature_integral(f, g, t.box, spec));
    }
    return pairwise_sum(vals);
}

}  // namespace

ApproxEvalTrace evaluate_via_approximation(const BoxChain& chain, const ScalarField& f,
                                           const FieldTuple& g,
                                           const ApproxEvalOptions& opts) {
    const int n = chain.dim;
    if (!f.holder_bound) throw ConfigError("constants undeclared: f needs a Hölder bound");
    if (!f.sup_bound) throw ConfigError("constants undeclared: f needs a sup bound");
    for (const auto& gi : g.fields)
        if (!gi.holder_bound) throw ConfigError("constants undeclared: g needs Hölder bounds");

    // host box: bounding box of the chain (the approximations search inside it)
    if (chain.terms.empty()) throw std::invalid_argument("evaluate_via_approximation: empty chain");
    std::vector<std::array<double, 2>> bb = chain.terms[0].box.bounds();
    for (const auto& t : chain.terms)
        for (int a = 0; a < n; ++a) {
            bb[a][0] = std::min(bb[a][0], t.box.lower(a));
            bb[a][1] = std::max(bb[a][1], t.box.upper(a));
        }
    const Box host(bb);

    const auto norms = chain_norms(chain);
    const double sup_f = *f.sup_bound;
    const double c_alpha = *f.holder_bound;
    double c_beta = 1.0;
    double beta_bar = 0.0;
    for (const auto& gi : g.fields) {
        c_beta *= *gi.holder_bound;
        beta_bar += gi.exponent;
    }
    const double gamma = f.exponent + beta_bar;
    const double c_ab = c_alpha * c_beta;

    auto gap_bound = [&](double eps) {
        return 6.0 * n * norms.boundary_mass * sup_f * c_beta *
                   std::pow(eps, beta_bar - (n - 1)) +
               3.0 * (n + 1) * norms.mass * c_ab * std::pow(eps, gamma - n);
    };

    ApproxEvalTrace trace;
    trace.heuristic = !(f.certified && g.all_certified());

    for (int m = 1; m <= opts.m_max; ++m) {
        const double eps = std::ldexp(1.0, -m);
        const double step = eps * opts.search_step_fraction;
        auto fa = inf_convolution(f, host, eps, step);
        std::vector<FieldEval> ga;
        ga.reserve(g.fields.size());
        for (const auto& gi : g.fields)
            ga.push_back(inf_convolution(gi, host, eps, step).approx.eval);

        ApproxStep row;
        row.eps = eps;
        row.value = quad_value(chain, fa.approx.eval, ga, opts.quadrature_resolution,
                               opts.workers);
        // gap bound between this step and the previous (eps' = 2 eps <= 2 eps)
        row.bound = gap_bound(eps);
        row.bound_valid = c_alpha * std::pow(eps, f.exponent) <= sup_f;
        trace.steps.push_back(row);
    }
    trace.limit = trace.steps.back().value;

    // geometric tail below eps_min: sum of gap bounds over j > m_max
    double tail = 0.0;
    {
        const double qa = std::pow(2.0, -(beta_bar - (n - 1)));
        const double qb = std::pow(2.0, -(gamma - n));
        const double eps_min = std::ldexp(1.0, -(opts.m_max + 1));
        tail = 6.0 * n * norms.boundary_mass * sup_f * c_beta *
                   std::pow(eps_min, beta_bar - (n - 1)) / (1.0 - qa) +
               3.0 * (n + 1) * norms.mass * c_ab * std::pow(eps_min, gamma - n) / (1.0 - qb);
    }
    trace.tail_bound = tail;

    if (opts.cross_check) {
        young::IntegrateOptions io;
        io.engine.workers = opts.workers;
        auto direct = chain_evaluate(chain, f, g, opts.cross_tol, io);
        trace.cross_value = direct.value;
        trace.cross_combined = tail + direct.apriori;
        trace.cross_gap = std::abs(direct.value - trace.limit);
    }
    return trace;
}

}  // namespace snowflake::currents
