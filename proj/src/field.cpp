#include "snowflake/field.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

namespace snowflake {

std::vector<double> FieldTuple::exponents() const {
    std::vector<double> b;
    b.reserve(fields.size());
    for (const auto& f : fields) b.push_back(f.exponent);
    return b;
}

double FieldTuple::beta_bar() const {
    double s = 0.0;
    for (const auto& f : fields) s += f.exponent;
    return s;
}

std::optional<double> FieldTuple::holder_product() const {
    double p = 1.0;
    for (const auto& f : fields) {
        if (!f.holder_bound) return std::nullopt;
        p *= *f.holder_bound;
    }
    return p;
}

bool FieldTuple::all_certified() const {
    for (const auto& f : fields)
        if (!f.certified || !f.holder_bound) return false;
    return true;
}

ScalarField constant_field(double value, int /*dim*/) {
    ScalarField f;
    f.eval = [value](std::span<const double>) { return value; };
    f.exponent = 1.0;
    f.holder_bound = 0.0;
    f.sup_bound = std::abs(value);
    f.certified = true;
    f.label = "const";
    return f;
}

ScalarField coordinate_field(int axis, int /*dim*/) {
    ScalarField f;
    f.eval = [axis](std::span<const double> x) { return x[axis]; };
    f.exponent = 1.0;
    f.holder_bound = 1.0;
    f.certified = true;
    f.label = "x" + std::to_string(axis + 1);
    return f;
}

ScalarField field_sum(const ScalarField& a, const ScalarField& b, const Box& domain) {
    ScalarField f;
    auto ea = a.eval, eb = b.eval;
    f.eval = [ea, eb](std::span<const double> x) { return ea(x) + eb(x); };
    f.exponent = std::min(a.exponent, b.exponent);
    const double diam = domain.diameter();
    if (a.holder_bound && b.holder_bound) {
        // lower the larger exponent to the common one on a bounded box
        f.holder_bound = *a.holder_bound * std::pow(diam, a.exponent - f.exponent) +
                         *b.holder_bound * std::pow(diam, b.exponent - f.exponent);
    }
    if (a.sup_bound && b.sup_bound) f.sup_bound = *a.sup_bound + *b.sup_bound;
    f.certified = a.certified && b.certified;
    f.label = "(" + a.label + "+" + b.label + ")";
    return f;
}

ScalarField field_scale(const ScalarField& a, double c) {
    ScalarField f = a;
    auto ea = a.eval;
    f.eval = [ea, c](std::span<const double> x) { return c * ea(x); };
    if (a.holder_bound) f.holder_bound = std::abs(c) * *a.holder_bound;
    if (a.sup_bound) f.sup_bound = std::abs(c) * *a.sup_bound;
    f.label = "scaled(" + a.label + ")";
    return f;
}

ScalarField field_product(const ScalarField& a, const ScalarField& b, const Box& domain) {
    // order so that lo has the smaller exponent; the product lives in H^lo
    const ScalarField& lo = a.exponent <= b.exponent ? a : b;
    const ScalarField& hi = a.exponent <= b.exponent ? b : a;
    ScalarField f;
    auto ea = a.eval, eb = b.eval;
    f.eval = [ea, eb](std::span<const double> x) { return ea(x) * eb(x); };
    f.exponent = lo.exponent;
    if (lo.holder_bound && hi.holder_bound && lo.sup_bound && hi.sup_bound) {
        const double diam = domain.diameter();
        f.holder_bound = *lo.sup_bound * *hi.holder_bound *
                             std::pow(diam, hi.exponent - lo.exponent) +
                         *hi.sup_bound * *lo.holder_bound;
        f.sup_bound = *lo.sup_bound * *hi.sup_bound;
    }
    f.certified = a.certified && b.certified && f.holder_bound.has_value();
    f.label = "(" + a.label + "*" + b.label + ")";
    return f;
}

ScalarField pullback_field(const ScalarField& g, const HolderMap& phi) {
    ScalarField f;
    auto eg = g.eval;
    auto ephi = phi.eval;
    const int out = phi.out_dim;
    f.eval = [eg, ephi, out](std::span<const double> t) {
        std::vector<double> y(static_cast<std::size_t>(out));
        ephi(t, y);
        return eg(y);
    };
    f.exponent = g.exponent * phi.exponent;
    if (g.holder_bound && phi.holder_bound)
        f.holder_bound = *g.holder_bound * std::pow(*phi.holder_bound, g.exponent);
    f.sup_bound = g.sup_bound;
    f.certified = g.certified && phi.certified && f.holder_bound.has_value();
    f.label = g.label + "∘" + phi.label;
    return f;
}

double lacunary_holder_constant(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("lacunary_holder_constant: alpha must be in (0,1)");
    return 1.0 / (1.0 - std::pow(2.0, alpha - 1.0)) + 2.0 / (1.0 - std::pow(2.0, -alpha));
}

ScalarField lacunary_series(double alpha, int num_terms, LacunaryKind kind, int axis, int dim) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("lacunary_series: alpha must be in (0,1)");
    if (num_terms < 1) throw std::invalid_argument("lacunary_series: need at least one term");
    ScalarField f;
    const int m = num_terms;
    const double a = alpha;
    if (kind == LacunaryKind::cosine_1d) {
        f.eval = [a, m, axis](std::span<const double> x) {
            double s = 0.0;
            for (int i = 1; i <= m; ++i)
                s += std::pow(2.0, -i * a) * std::cos(std::ldexp(x[axis], i));
            return s;
        };
        f.holder_bound = lacunary_holder_constant(alpha);
        f.label = "lacunary_cos(a=" + std::to_string(alpha) + ",m=" + std::to_string(m) + ")";
    } else {
        f.eval = [a, m, dim](std::span<const double> x) {
            double s = 0.0;
            for (int i = 1; i <= m; ++i) {
                double p = std::pow(2.0, -i * a);
                for (int k = 0; k < dim; ++k) p *= std::sin(std::ldexp(x[k], i));
                s += p;
            }
            return s;
        };
        // one coordinate difference per factor: |prod sin - prod sin| splits
        // into dim telescoping terms, each handled like the 1-D case
        f.holder_bound = dim * lacunary_holder_constant(alpha);
        f.label = "lacunary_sin_prod(a=" + std::to_string(alpha) + ",m=" + std::to_string(m) + ")";
    }
    f.exponent = alpha;
    // geometric partial sum of the term sup norms
    double sup = 0.0;
    for (int i = 1; i <= m; ++i) sup += std::pow(2.0, -i * alpha);
    f.sup_bound = sup;
    f.certified = true;
    return f;
}

namespace {

std::vector<double> random_point(const Box& box, std::mt19937_64& rng) {
    std::vector<double> p(static_cast<std::size_t>(box.dim()));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int a = 0; a < box.dim(); ++a) p[a] = box.lower(a) + u(rng) * box.edge(a);
    return p;
}

}  // namespace

double estimate_holder_constant(const FieldEval& f, const Box& box, double alpha, int samples,
                                std::uint64_t seed) {
    if (samples < 2) throw std::invalid_argument("estimate_holder_constant: samples >= 2");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double diam = box.diameter();
    double best = 0.0;
    for (int s = 0; s < samples; ++s) {
        auto x = random_point(box, rng);
        auto y = x;
        // stratify pair distances over dyadic scales so short-range quotients
        // are probed as hard as long-range ones
        const int scale = s % 24;
        const double r = diam * std::ldexp(1.0, -scale);
        double d2 = 0.0;
        for (int a = 0; a < box.dim(); ++a) {
            double step = (2.0 * u(rng) - 1.0) * r;
            y[a] = std::min(box.upper(a), std::max(box.lower(a), y[a] + step));
            d2 += (y[a] - x[a]) * (y[a] - x[a]);
        }
        const double d = std::sqrt(d2);
        if (d <= 0.0) continue;
        const double q = std::abs(f(x) - f(y)) / std::pow(d, alpha);
        best = std::max(best, q);
    }
    return best;
}

double estimate_sup(const FieldEval& f, const Box& box, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double best = 0.0;
    for (int s = 0; s < samples; ++s) {
        auto x = random_point(box, rng);
        best = std::max(best, std::abs(f(x)));
    }
    return best;
}

namespace {

// Recursive product-grid minimization for the inf-convolution. Visits every
// anchored grid point y with |y_a - x_a| <= eps per axis, plus y = x.
struct InfConvGrid {
    FieldEval f;
    Box host;
    double eps;
    double step;
    double slope;  // C eps^(alpha-1)

    double minimize(std::span<const double> x) const {
        std::vector<double> y(x.begin(), x.end());
        double best = f(x);  // y = x candidate keeps f_eps <= f pointwise
        walk(x, y, 0, best);
        return best;
    }

    void walk(std::span<const double> x, std::vector<double>& y, int axis, double& best) const {
        if (axis == host.dim()) {
            double d2 = 0.0;
            for (int a = 0; a < host.dim(); ++a) d2 += (y[a] - x[a]) * (y[a] - x[a]);
            const double d = std::sqrt(d2);
            if (d > eps) return;
            const double v = f(y) + slope * d;
            if (v < best) best = v;
            return;
        }
        const double lo = std::max(host.lower(axis), x[axis] - eps);
        const double hi = std::min(host.upper(axis), x[axis] + eps);
        // anchored grid: y = host_lower + j*step, independent of x
        long j0 = static_cast<long>(std::ceil((lo - host.lower(axis)) / step - 1e-12));
        long j1 = static_cast<long>(std::floor((hi - host.lower(axis)) / step + 1e-12));
        for (long j = j0; j <= j1; ++j) {
            y[axis] = host.lower(axis) + static_cast<double>(j) * step;
            walk(x, y, axis + 1, best);
        }
        y[axis] = x[axis];
    }
};

}  // namespace

ApproxField inf_convolution(const ScalarField& f, const Box& host, double eps,
                            double search_step) {
    if (!(eps > 0.0)) throw std::invalid_argument("inf_convolution: eps must be positive");
    if (!(search_step > 0.0) || search_step > eps / 4.0)
        throw std::invalid_argument("inf_convolution: search_step must be in (0, eps/4]");
    if (!f.holder_bound)
        throw std::invalid_argument("inf_convolution: f needs a declared Hölder bound");
    if (!(f.exponent > 0.0 && f.exponent <= 1.0))
        throw std::invalid_argument("inf_convolution: exponent must be in (0,1]");

    const double C = *f.holder_bound;
    const double alpha = f.exponent;
    const double slope = C * std::pow(eps, alpha - 1.0);

    ApproxField out;
    out.eps = eps;
    out.search_step = search_step;
    out.lip_bound = slope;
    out.sup_error = C * std::pow(eps, alpha);
    out.holder_bound_out = 3.0 * C;
    const double move = 0.5 * search_step * std::sqrt(static_cast<double>(host.dim()));
    out.grid_error = C * std::pow(move, alpha) + slope * move;

    auto base = f.eval;
    auto grid = std::make_shared<InfConvGrid>(InfConvGrid{base, host, eps, search_step, slope});
    out.approx.eval = [grid](std::span<const double> x) { return grid->minimize(x); };
    out.approx.exponent = alpha;
    out.approx.holder_bound = out.holder_bound_out;
    out.approx.sup_bound = f.sup_bound;  // |f_eps| <= ||f||_inf
    out.approx.certified = f.certified;
    if (f.support) {
        // spt(f_eps) lies in the eps-neighborhood of spt(f)
        std::vector<std::array<double, 2>> b = f.support->bounds();
        for (int a = 0; a < f.support->dim(); ++a) {
            b[a][0] = std::max(host.lower(a), b[a][0] - eps);
            b[a][1] = std::min(host.upper(a), b[a][1] + eps);
        }
        out.approx.support = Box(std::move(b));
    }
    out.approx.label = f.label + "_eps";
    return out;
}

}  // namespace snowflake
