#include "snowflake/oracle.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "snowflake/parallel.hpp"

namespace snowflake::oracle {

namespace {

// LU determinant with partial pivoting; n stays tiny here.
double det_inplace(std::vector<double>& a, int n) {
    double det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
        if (piv != c) {
            for (int k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
            det = -det;
        }
        const double d = a[c * n + c];
        if (d == 0.0) return 0.0;
        det *= d;
        for (int r = c + 1; r < n; ++r) {
            const double fac = a[r * n + c] / d;
            for (int k = c; k < n; ++k) a[r * n + k] -= fac * a[c * n + k];
        }
    }
    return det;
}

}  // namespace

QuadratureSpec QuadratureSpec::uniform(int res, int dim) {
    QuadratureSpec s;
    s.resolution.assign(static_cast<std::size_t>(dim), res);
    return s;
}

double det_quadrature_integral(const FieldEval& f, const std::vector<FieldEval>& g,
                               const Box& box, const QuadratureSpec& spec) {
    const int n = box.dim();
    if (static_cast<int>(g.size()) != n)
        throw std::invalid_argument("det_quadrature_integral: need one g per axis");
    std::vector<int> res = spec.resolution;
    if (static_cast<int>(res.size()) == 1 && n > 1) res.assign(static_cast<std::size_t>(n), res[0]);
    if (static_cast<int>(res.size()) != n)
        throw std::invalid_argument("det_quadrature_integral: resolution/axis mismatch");
    for (int r : res)
        if (r < 2) throw std::invalid_argument("det_quadrature_integral: resolution >= 2");

    std::vector<double> pitch(n), h(n);
    double cellvol = 1.0;
    std::uint64_t nodes = 1;
    for (int a = 0; a < n; ++a) {
        pitch[a] = box.edge(a) / res[a];
        h[a] = pitch[a] * spec.fd_step_fraction;
        cellvol *= pitch[a];
        nodes *= static_cast<std::uint64_t>(res[a]);
    }

    auto node_term = [&](std::uint64_t rank) {
        std::vector<double> x(n), xp(n), jac(static_cast<std::size_t>(n) * n);
        std::uint64_t r = rank;
        for (int a = n - 1; a >= 0; --a) {
            const std::uint64_t i = r % static_cast<std::uint64_t>(res[a]);
            r /= static_cast<std::uint64_t>(res[a]);
            x[a] = box.lower(a) + (static_cast<double>(i) + 0.5) * pitch[a];
        }
        for (int row = 0; row < n; ++row) {
            for (int col = 0; col < n; ++col) {
                xp = x;
                xp[col] = x[col] + h[col];
                const double gp = g[row](xp);
                xp[col] = x[col] - h[col];
                const double gm = g[row](xp);
                jac[row * n + col] = (gp - gm) / (2.0 * h[col]);
            }
        }
        return f(x) * det_inplace(jac, n) * cellvol;
    };

    return parallel_sum(
        nodes, spec.workers,
        [&](std::size_t b, std::size_t e) {
            double s = 0.0;
            for (std::uint64_t rank = b; rank < e; ++rank) s += node_term(rank);
            return s;
        },
        4096);
}

double det_quadrature_integral(const ScalarField& f, const FieldTuple& g, const Box& box,
                               const QuadratureSpec& spec) {
    std::vector<FieldEval> evals;
    evals.reserve(g.fields.size());
    for (const auto& gi : g.fields) evals.push_back(gi.eval);
    return det_quadrature_integral(f.eval, evals, box, spec);
}

double stieltjes_1d_brute(const FieldEval& f, const FieldEval& g,
                          std::span<const double> partition, std::span<const double> tags) {
    if (partition.size() < 2) throw std::invalid_argument("stieltjes_1d_brute: need >= 2 points");
    if (tags.size() + 1 != partition.size())
        throw std::invalid_argument("stieltjes_1d_brute: need one tag per cell");
    for (std::size_t i = 0; i + 1 < partition.size(); ++i) {
        if (!(partition[i] < partition[i + 1]))
            throw std::invalid_argument("stieltjes_1d_brute: partition must be strictly sorted");
        if (tags[i] < partition[i] || tags[i] > partition[i + 1])
            throw std::invalid_argument("stieltjes_1d_brute: tag outside its cell");
    }
    std::vector<double> terms(tags.size());
    double xi[1], xa[1], xb[1];
    xa[0] = partition[0];
    double gprev = g(std::span<const double>(xa, 1));
    for (std::size_t i = 0; i < tags.size(); ++i) {
        xb[0] = partition[i + 1];
        const double gnext = g(std::span<const double>(xb, 1));
        xi[0] = tags[i];
        terms[i] = f(std::span<const double>(xi, 1)) * (gnext - gprev);
        gprev = gnext;
    }
    return pairwise_sum(terms);
}

BrutePartition uniform_partition(const Box& interval, int cells, bool random_tags,
                                 std::uint64_t seed) {
    if (interval.dim() != 1) throw std::invalid_argument("uniform_partition: 1-D only");
    if (cells < 1) throw std::invalid_argument("uniform_partition: cells >= 1");
    BrutePartition p;
    p.points.resize(static_cast<std::size_t>(cells) + 1);
    p.tags.resize(static_cast<std::size_t>(cells));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i <= cells; ++i)
        p.points[i] = interval.lower(0) + interval.edge(0) * (static_cast<double>(i) / cells);
    p.points[cells] = interval.upper(0);
    for (int i = 0; i < cells; ++i) {
        const double t = random_tags ? u(rng) : 0.5;
        p.tags[i] = p.points[i] + t * (p.points[i + 1] - p.points[i]);
    }
    return p;
}

StokesReport stokes_check(const FieldTuple& g, const Box& box, double tol,
                          const young::IntegrateOptions& opts) {
    StokesReport rep;
    ScalarField one = constant_field(1.0, box.dim());
    young::IntegrateOptions o = opts;
    o.tol = tol;
    // f == 1 has a zero refinement bound, which would stop at level 0; the
    // face integrals still need refining, so drive the stop by the tail.
    o.stopping = young::Stopping::Heuristic;
    auto lhs = young::integrate(one, g, box, o);
    rep.lhs = lhs.value;
    rep.level = lhs.level;
    rep.rhs = young::boundary_integral(box, g, lhs.level, o.engine);
    rep.gap = std::abs(rep.lhs - rep.rhs);
    bool lipschitz = true;
    for (const auto& gi : g.fields) lipschitz = lipschitz && gi.exponent == 1.0;
    if (lipschitz) {
        auto spec = QuadratureSpec::uniform(128, box.dim());
        spec.workers = opts.engine.workers;
        rep.quadrature = det_quadrature_integral(one, g, box, spec);
    }
    return rep;
}

}  // namespace snowflake::oracle
