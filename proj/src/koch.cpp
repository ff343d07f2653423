#include "snowflake/koch.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

namespace snowflake::currents {

namespace {

using Vec2 = std::array<double, 2>;

Vec2 sub(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
Vec2 add(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
Vec2 scale(const Vec2& a, double c) { return {c * a[0], c * a[1]}; }

// rotate by -60 degrees: outward bump for counterclockwise traversal
Vec2 rot_minus60(const Vec2& v) {
    const double c = 0.5;
    const double s = -std::sqrt(3.0) / 2.0;
    return {c * v[0] - s * v[1], s * v[0] + c * v[1]};
}

}  // namespace

double KochPath::segment_length() const { return std::pow(3.0, -level); }

double KochPath::speed() const { return segments() * segment_length(); }

void KochPath::eval(double t, std::span<double> out) const {
    const int N = segments();
    double u = t * N;
    if (u <= 0.0) u = 0.0;
    if (u >= N) u = static_cast<double>(N);
    int j = static_cast<int>(u);
    if (j >= N) j = N - 1;
    const double local = u - j;
    const Vec2& a = vertices[static_cast<std::size_t>(j)];
    const Vec2& b = vertices[static_cast<std::size_t>(j) + 1];
    out[0] = a[0] + local * (b[0] - a[0]);
    out[1] = a[1] + local * (b[1] - a[1]);
}

double KochPath::area() const {
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < vertices.size(); ++j) {
        s += vertices[j][0] * vertices[j + 1][1] - vertices[j + 1][0] * vertices[j][1];
    }
    return 0.5 * s;
}

HolderMap KochPath::as_map() const {
    HolderMap m;
    m.in_dim = 1;
    m.out_dim = 2;
    auto self = std::make_shared<KochPath>(*this);
    m.eval = [self](std::span<const double> t, std::span<double> out) {
        self->eval(t[0], out);
    };
    m.exponent = 1.0;  // a fixed level is piecewise linear
    m.holder_bound = speed();
    m.certified = true;
    m.label = "koch" + std::to_string(level);
    return m;
}

KochPath koch_parametrization(int level) {
    if (level < 0) throw std::invalid_argument("koch_parametrization: level >= 0");
    if (level > 12) throw std::invalid_argument("koch_parametrization: level too deep");
    std::vector<Vec2> verts = {
        {0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}, {0.0, 0.0}};
    for (int i = 0; i < level; ++i) {
        std::vector<Vec2> next;
        next.reserve((verts.size() - 1) * 4 + 1);
        for (std::size_t j = 0; j + 1 < verts.size(); ++j) {
            const Vec2 p = verts[j];
            const Vec2 q = verts[j + 1];
            const Vec2 d = scale(sub(q, p), 1.0 / 3.0);
            const Vec2 a = add(p, d);
            const Vec2 b = add(a, rot_minus60(d));
            const Vec2 c = add(a, d);
            next.push_back(p);
            next.push_back(a);
            next.push_back(b);
            next.push_back(c);
        }
        next.push_back(verts.back());
        verts = std::move(next);
    }
    verts.back() = verts.front();  // closed bit-exactly
    KochPath path;
    path.level = level;
    path.vertices = std::move(verts);
    return path;
}

double koch_exponent() { return std::log(3.0) / std::log(4.0); }

double koch_holder_quotient(const KochPath& path, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double alpha = koch_exponent();
    double best = 0.0;
    double pa[2], pb[2];
    for (int s = 0; s < samples; ++s) {
        const double t1 = u(rng);
        // stratify separations over dyadic scales down past the segment size
        const int sc = s % 28;
        double t2 = t1 + (2.0 * u(rng) - 1.0) * std::ldexp(1.0, -sc);
        t2 -= std::floor(t2);  // wrap
        double d = std::abs(t1 - t2);
        d = std::min(d, 1.0 - d);  // circle metric
        if (d <= 0.0) continue;
        path.eval(t1, pa);
        path.eval(t2, pb);
        const double dist = std::hypot(pa[0] - pb[0], pa[1] - pb[1]);
        best = std::max(best, dist / std::pow(d, alpha));
    }
    return best;
}

young::IntegralResult koch_boundary_evaluate(const ScalarField& f, const ScalarField& g,
                                             int level, double tol,
                                             const young::IntegrateOptions& opts) {
    KochPath path = koch_parametrization(level);
    HolderMap phi = path.as_map();
    young::IntegrateOptions o = opts;
    o.tol = tol;
    return young::parametrized_integrate(f, {g}, phi, Box::unit(1), o);
}

}  // namespace snowflake::currents
