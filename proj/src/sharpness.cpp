#include "snowflake/sharpness.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace snowflake::sharpness {

double CounterexampleSpec::gamma() const {
    double gb = alpha;
    for (double b : betas) gb += b;
    return gb;
}

double closed_form_value(int n, double gamma, int m) {
    double s = 0.0;
    for (int i = 1; i <= m; ++i) s += std::pow(2.0, i * (n - gamma));
    return std::pow(std::numbers::pi, n) * s;
}

Counterexample trig_counterexample(const CounterexampleSpec& spec) {
    if (spec.n < 1) throw std::invalid_argument("trig_counterexample: n >= 1");
    if (static_cast<int>(spec.betas.size()) != spec.n)
        throw std::invalid_argument("trig_counterexample: need one beta per axis");
    if (spec.m < 0) throw std::invalid_argument("trig_counterexample: m >= 0");

    Counterexample out;
    out.domain = Box(std::vector<std::array<double, 2>>(
        static_cast<std::size_t>(spec.n), {0.0, 2.0 * std::numbers::pi}));

    if (spec.m == 0) {
        out.f = constant_field(0.0, spec.n);
        out.g.domain = out.domain;
        for (int k = 0; k < spec.n; ++k) out.g.fields.push_back(constant_field(0.0, spec.n));
        out.closed_form = 0.0;
        return out;
    }

    out.f = lacunary_series(spec.alpha, spec.m, LacunaryKind::sine_product, 0, spec.n);
    out.g.domain = out.domain;
    for (int k = 0; k < spec.n; ++k)
        out.g.fields.push_back(
            lacunary_series(spec.betas[static_cast<std::size_t>(k)], spec.m,
                            LacunaryKind::cosine_1d, k, spec.n));
    out.closed_form = closed_form_value(spec.n, spec.gamma(), spec.m);
    return out;
}

std::vector<SweepRow> divergence_sweep(const CounterexampleSpec& spec, int m_lo, int m_hi,
                                       int max_resolution, int workers) {
    if (m_lo < 0 || m_hi < m_lo) throw std::invalid_argument("divergence_sweep: bad m range");
    std::vector<SweepRow> rows;
    for (int m = m_lo; m <= m_hi; ++m) {
        SweepRow row;
        row.m = m;
        CounterexampleSpec s = spec;
        s.m = m;
        row.closed_form = closed_form_value(spec.n, spec.gamma(), m);
        if (m == 0) {
            rows.push_back(row);
            continue;
        }
        auto ce = trig_counterexample(s);
        int res = 64 << m;  // resolve the 2^m frequency
        if (res > max_resolution) {
            res = max_resolution;
            row.resolution_capped = true;
        }
        row.resolution = res;
        auto qs = oracle::QuadratureSpec::uniform(res, spec.n);
        qs.workers = workers;
        row.numeric = oracle::det_quadrature_integral(ce.f, ce.g, ce.domain, qs);
        row.relative_gap = row.closed_form > 0.0
                               ? std::abs(std::abs(row.numeric) - row.closed_form) /
                                     row.closed_form
                               : std::abs(row.numeric);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace snowflake::sharpness
