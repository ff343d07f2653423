#include "snowflake/young.hpp"

#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

#include "snowflake/errors.hpp"
#include "snowflake/parallel.hpp"

namespace snowflake::young {

namespace {

constexpr int kMaxDim = 8;
constexpr std::size_t kChunk1D = 65536;
constexpr std::size_t kChunkCells = 2048;

double csum_of(std::span<const double> betas, double alpha_hat);

double cprime_of(std::span<const double> betas) {
    const int m = static_cast<int>(betas.size());
    if (m == 1) return 1.0;
    auto tail = betas.subspan(1);
    return 2.0 * m * (cprime_of(tail) + csum_of(tail, betas[0]));
}

// C_m with alpha_hat in the Hölder-exponent slot, betas the integrator slots.
double csum_of(std::span<const double> betas, double alpha_hat) {
    const int m = static_cast<int>(betas.size());
    double gamma = alpha_hat;
    for (double b : betas) gamma += b;
    if (!(gamma > m)) throw ExponentError("exponent sum too small: gamma <= dimension");
    return cprime_of(betas) / (1.0 - std::pow(2.0, m - gamma));
}

void validate_exponent(double e, const char* what) {
    if (!(e > 0.0 && e <= 1.0))
        throw std::invalid_argument(std::string(what) + " exponent must lie in (0,1]");
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double unit_uniform(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------
// The dyadic lattice engine.
//
// All evaluation points of a level-k run live on the doubled lattice with
// per-axis indices 0..D, D = 2^(k+1): cell corners are even, barycenter
// components odd. A sub-face of a cell is encoded by which axes are free
// (spanning the cell) and the doubled low coordinate per axis. Face values
//   I(F) = w1(mu_F) * J0(F),
//   J0(F) = signed sum of child face values, base dim 1: difference of the
//           last integrator field at the two endpoints,
// are memoized by that encoding, so faces shared between adjacent cells are
// computed once and cancel bit-exactly in the telescoping identity.
// ---------------------------------------------------------------------------

struct FaceKey {
    std::uint32_t mask = 0;
    std::array<std::int32_t, kMaxDim> lo{};

    bool operator==(const FaceKey& o) const { return mask == o.mask && lo == o.lo; }
};

struct FaceKeyHash {
    std::size_t operator()(const FaceKey& k) const {
        std::uint64_t h = 0xcbf29ce484222325ull ^ k.mask;
        for (std::int32_t v : k.lo) {
            h ^= static_cast<std::uint32_t>(v);
            h *= 0x100000001b3ull;
        }
        return static_cast<std::size_t>(h);
    }
};

template <class K, class V, class Hash>
class ShardedMap {
public:
    template <class F>
    V get_or_compute(const K& key, F&& compute) {
        Shard& s = shards_[FaceKeyIndex(key)];
        {
            std::lock_guard<std::mutex> lk(s.mu);
            auto it = s.map.find(key);
            if (it != s.map.end()) return it->second;
        }
        V v = compute();  // may race; all racers compute the same value
        std::lock_guard<std::mutex> lk(s.mu);
        return s.map.emplace(key, v).first->second;
    }

    std::uint64_t size() const {
        std::uint64_t n = 0;
        for (const Shard& s : shards_) {
            std::lock_guard<std::mutex> lk(s.mu);
            n += s.map.size();
        }
        return n;
    }

private:
    struct Shard {
        mutable std::mutex mu;
        std::unordered_map<K, V, Hash> map;
    };
    static constexpr int kShards = 64;
    std::array<Shard, kShards> shards_;

    static std::size_t FaceKeyIndex(const K& key) { return Hash{}(key)&63u; }
};

class DyadicEngine {
public:
    DyadicEngine(const Box& box, const FieldTuple& g, int level)
        : box_(box), g_(g), n_(box.dim()), level_(level), D_(std::int64_t{1} << (level + 1)) {
        if (n_ > kMaxDim) throw std::invalid_argument("engine: dimension too large");
        if (level < 0 || level > 40) throw std::invalid_argument("engine: level out of range");
        if (n_ * (level + 2) >= 62)
            throw std::invalid_argument("engine: lattice too fine for this dimension");
        coords_.resize(n_);
        for (int a = 0; a < n_; ++a) {
            coords_[a].resize(static_cast<std::size_t>(D_) + 1);
            for (std::int64_t d = 0; d <= D_; ++d)
                coords_[a][static_cast<std::size_t>(d)] = box.lattice_coord(a, d, level + 1);
        }
        for (std::size_t i = 0; i < g.fields.size(); ++i)
            point_memos_.push_back(
                std::make_unique<ShardedMap<std::uint64_t, double, std::hash<std::uint64_t>>>());
        stride_.resize(n_);
        std::uint64_t s = 1;
        for (int a = 0; a < n_; ++a) {
            stride_[a] = s;
            s *= static_cast<std::uint64_t>(D_) + 1;
        }
    }

    // J0 of a top-level cell given its doubled low corner.
    double cell_j0(const std::array<std::int32_t, kMaxDim>& lo) {
        if (n_ == 1) {
            return field_at(0, with_axis(lo, 0, lo[0] + 2)) - field_at(0, lo);
        }
        const std::uint32_t full = (1u << n_) - 1u;
        double j0 = 0.0;
        for (int a = 0; a < n_; ++a) {
            for (int side = 0; side < 2; ++side) {
                const double s = ((a + 1 + side) % 2 == 0) ? 1.0 : -1.0;
                j0 += s * face_value(full & ~(1u << a), with_axis(lo, a, lo[a] + 2 * side));
            }
        }
        return j0;
    }

    // Memoized face value I(F) = w1(mu_F) * J0(F) for a face of dimension
    // popcount(mask) with integrand tuple starting at g[n - m - 1].
    double face_value(std::uint32_t mask, const std::array<std::int32_t, kMaxDim>& lo) {
        FaceKey key{mask, lo};
        return face_memo_.get_or_compute(key, [&] { return compute_face(mask, lo); });
    }

    double field_at(int fi, const std::array<std::int32_t, kMaxDim>& d) {
        std::uint64_t flat = 0;
        for (int a = 0; a < n_; ++a) flat += stride_[a] * static_cast<std::uint64_t>(d[a]);
        return point_memos_[fi]->get_or_compute(flat, [&] {
            std::array<double, kMaxDim> x;
            for (int a = 0; a < n_; ++a) x[a] = coords_[a][static_cast<std::size_t>(d[a])];
            return g_.fields[fi].eval(std::span<const double>(x.data(), n_));
        });
    }

    double coord(int axis, std::int64_t d) const {
        return coords_[axis][static_cast<std::size_t>(d)];
    }

    std::uint64_t memo_evaluations() const {
        std::uint64_t c = 0;
        for (const auto& m : point_memos_) c += m->size();
        return c;
    }

    int dim() const { return n_; }
    std::int64_t doubled_res() const { return D_; }

private:
    static std::array<std::int32_t, kMaxDim> with_axis(std::array<std::int32_t, kMaxDim> lo,
                                                       int axis, std::int32_t v) {
        lo[axis] = v;
        return lo;
    }

    double compute_face(std::uint32_t mask, const std::array<std::int32_t, kMaxDim>& lo) {
        const int m = std::popcount(mask);
        const int fi = n_ - m - 1;
        auto mu = lo;
        for (int a = 0; a < n_; ++a)
            if (mask & (1u << a)) mu[a] = lo[a] + 1;
        const double w1 = field_at(fi, mu);
        double j0;
        if (m == 1) {
            int a = std::countr_zero(mask);
            j0 = field_at(n_ - 1, with_axis(lo, a, lo[a] + 2)) - field_at(n_ - 1, lo);
        } else {
            j0 = 0.0;
            int local = 0;
            for (int a = 0; a < n_; ++a) {
                if (!(mask & (1u << a))) continue;
                ++local;
                for (int side = 0; side < 2; ++side) {
                    const double s = ((local + side) % 2 == 0) ? 1.0 : -1.0;
                    j0 += s * face_value(mask & ~(1u << a), with_axis(lo, a, lo[a] + 2 * side));
                }
            }
        }
        return w1 * j0;
    }

    const Box& box_;
    const FieldTuple& g_;
    int n_;
    int level_;
    std::int64_t D_;
    std::vector<std::vector<double>> coords_;
    std::vector<std::uint64_t> stride_;
    std::vector<std::unique_ptr<ShardedMap<std::uint64_t, double, std::hash<std::uint64_t>>>>
        point_memos_;
    ShardedMap<FaceKey, double, FaceKeyHash> face_memo_;
};

struct SumWithEvals {
    double value = 0.0;
    std::uint64_t evaluations = 0;
};

// 1-D runs go very deep (fractal boundaries), so they stream without memos.
SumWithEvals riemann_1d(const ScalarField& f, const ScalarField& g1, const Box& box, int level,
                        const EngineOptions& opts) {
    const std::uint64_t cells = std::uint64_t{1} << level;
    ChunkGrid grid(cells, kChunk1D);
    std::vector<double> partial(grid.num_chunks(), 0.0);
    parallel_chunks(grid.num_chunks(), opts.workers, [&](std::size_t c) {
        const std::uint64_t b = grid.begin(c), e = grid.end(c);
        double x0[1] = {box.lattice_coord(0, static_cast<std::int64_t>(b), level)};
        double gprev = g1.eval(std::span<const double>(x0, 1));
        double s = 0.0;
        for (std::uint64_t j = b; j < e; ++j) {
            double xm[1], x1[1];
            x1[0] = box.lattice_coord(0, static_cast<std::int64_t>(j) + 1, level);
            if (opts.tags == TagRule::Barycenter) {
                xm[0] = box.lattice_coord(0, 2 * static_cast<std::int64_t>(j) + 1, level + 1);
            } else {
                const double u = unit_uniform(splitmix64(opts.seed ^ (j * 0x9e37ull + 17)));
                const double lo = box.lattice_coord(0, static_cast<std::int64_t>(j), level);
                xm[0] = lo + u * (x1[0] - lo);
            }
            const double gnext = g1.eval(std::span<const double>(x1, 1));
            s += f.eval(std::span<const double>(xm, 1)) * (gnext - gprev);
            gprev = gnext;
        }
        partial[c] = s;
    });
    SumWithEvals out;
    out.value = pairwise_sum(partial);
    out.evaluations = cells /*f*/ + cells + grid.num_chunks() /*g*/;
    return out;
}

void decode_cell(std::uint64_t rank, int n, int level, std::array<std::int32_t, kMaxDim>& lo) {
    const std::uint64_t per_axis = std::uint64_t{1} << level;
    for (int a = n - 1; a >= 0; --a) {
        lo[a] = static_cast<std::int32_t>(2 * (rank % per_axis));
        rank /= per_axis;
    }
}

SumWithEvals riemann_nd(const ScalarField& f, const FieldTuple& g, const Box& box, int level,
                        const EngineOptions& opts) {
    const int n = box.dim();
    DyadicEngine engine(box, g, level);
    const std::uint64_t cells = dyadic_cell_count(n, level);
    ChunkGrid grid(cells, kChunkCells);
    std::vector<double> partial(grid.num_chunks(), 0.0);
    parallel_chunks(grid.num_chunks(), opts.workers, [&](std::size_t c) {
        std::array<std::int32_t, kMaxDim> lo{};
        std::array<double, kMaxDim> tag;
        double s = 0.0;
        for (std::uint64_t rank = grid.begin(c); rank < grid.end(c); ++rank) {
            decode_cell(rank, n, level, lo);
            for (int a = 0; a < n; ++a) {
                if (opts.tags == TagRule::Barycenter) {
                    tag[a] = engine.coord(a, lo[a] + 1);
                } else {
                    const double u =
                        unit_uniform(splitmix64(opts.seed ^ splitmix64(rank * 8 + a)));
                    tag[a] = engine.coord(a, lo[a]) +
                             u * (engine.coord(a, lo[a] + 2) - engine.coord(a, lo[a]));
                }
            }
            s += f.eval(std::span<const double>(tag.data(), n)) * engine.cell_j0(lo);
        }
        partial[c] = s;
    });
    SumWithEvals out;
    out.value = pairwise_sum(partial);
    out.evaluations = engine.memo_evaluations() + cells;
    return out;
}

void validate_tuple(const FieldTuple& g, const Box& box) {
    if (g.size() != box.dim())
        throw std::invalid_argument("field tuple length must equal the box dimension");
    for (const auto& gi : g.fields) validate_exponent(gi.exponent, "integrator");
}

SumWithEvals boundary_nd(const Box& box, const FieldTuple& g, int level,
                         const EngineOptions& opts) {
    const int n = box.dim();
    DyadicEngine engine(box, g, level);
    const std::uint64_t face_cells = dyadic_cell_count(n - 1, level);
    const std::int64_t D = engine.doubled_res();

    double total = 0.0;
    for (int axis = 0; axis < n; ++axis) {
        for (int side = 0; side < 2; ++side) {
            const double sign = ((axis + 1 + side) % 2 == 0) ? 1.0 : -1.0;
            const std::uint32_t mask = ((1u << n) - 1u) & ~(1u << axis);
            const double face_sum = parallel_sum(
                face_cells, opts.workers,
                [&](std::size_t b, std::size_t e) {
                    std::array<std::int32_t, kMaxDim> lo{};
                    double s = 0.0;
                    const std::uint64_t per_axis = std::uint64_t{1} << level;
                    for (std::uint64_t rank = b; rank < e; ++rank) {
                        std::uint64_t r = rank;
                        for (int a = n - 1; a >= 0; --a) {
                            if (a == axis) continue;
                            lo[a] = static_cast<std::int32_t>(2 * (r % per_axis));
                            r /= per_axis;
                        }
                        lo[axis] = side == 0 ? 0 : static_cast<std::int32_t>(D);
                        s += engine.face_value(mask, lo);
                    }
                    return s;
                },
                kChunkCells);
            total += sign * face_sum;
        }
    }
    SumWithEvals out;
    out.value = total;
    out.evaluations = engine.memo_evaluations();
    return out;
}

}  // namespace

const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::Apriori: return "apriori";
        case StopReason::AposterioriTail: return "aposteriori";
        case StopReason::Budget: return "budget";
    }
    return "?";
}

ErrorConstants error_constants(int n, double alpha, std::span<const double> betas) {
    if (n < 1) throw std::invalid_argument("error_constants: dimension must be >= 1");
    if (static_cast<int>(betas.size()) != n)
        throw std::invalid_argument("error_constants: need one beta per dimension");
    validate_exponent(alpha, "alpha");
    for (double b : betas) validate_exponent(b, "beta");
    ErrorConstants c;
    c.dim = n;
    c.alpha = alpha;
    c.betas.assign(betas.begin(), betas.end());
    c.beta_bar = 0.0;
    for (double b : betas) c.beta_bar += b;
    c.gamma = alpha + c.beta_bar;
    if (!(c.gamma > n))
        throw ExponentError("exponent sum too small: gamma = " + std::to_string(c.gamma) +
                            " <= n = " + std::to_string(n));
    c.cprime = cprime_of(betas);
    c.csum = c.cprime / (1.0 - std::pow(2.0, n - c.gamma));
    return c;
}

double cprime_constant(std::span<const double> betas) {
    const int n = static_cast<int>(betas.size());
    double bb = 0.0;
    for (double b : betas) {
        validate_exponent(b, "beta");
        bb += b;
    }
    if (!(bb > n - 1))
        throw ExponentError("exponent sum too small: sum(beta) <= n-1 for the boundary integral");
    return cprime_of(betas);
}

double riemann_sum(const ScalarField& f, const FieldTuple& g, const Box& box, int level,
                   const EngineOptions& opts) {
    validate_tuple(g, box);
    validate_exponent(f.exponent, "f");
    const double gamma = f.exponent + g.beta_bar();
    if (!(gamma > box.dim())) throw ExponentError("exponent sum too small: gamma <= n");
    if (box.dim() == 1) return riemann_1d(f, g.fields[0], box, level, opts).value;
    return riemann_nd(f, g, box, level, opts).value;
}

double boundary_integral(const Box& box, const FieldTuple& g, int level,
                         const EngineOptions& opts) {
    validate_tuple(g, box);
    if (box.dim() < 1) throw std::invalid_argument("boundary_integral: dimension must be >= 1");
    if (!(g.beta_bar() > box.dim() - 1))
        throw ExponentError("exponent sum too small: sum(beta) <= n-1");
    if (box.dim() == 1) {
        double lo[1] = {box.lower(0)}, hi[1] = {box.upper(0)};
        return g.fields[0].eval(std::span<const double>(hi, 1)) -
               g.fields[0].eval(std::span<const double>(lo, 1));
    }
    return boundary_nd(box, g, level, opts).value;
}

double apriori_bound(const ErrorConstants& c, int level, double diam, double holder_f,
                     std::span<const double> holder_g) {
    double h = holder_f;
    for (double v : holder_g) h *= v;
    return c.csum * std::pow(diam, c.gamma) *
           std::pow(2.0, static_cast<double>(level) * (c.dim - c.gamma)) * h;
}

double thin_box_bound(const Box& box, const ErrorConstants& c, double sup_f, double holder_f,
                      std::span<const double> holder_g) {
    const int n = box.dim();
    if (n != c.dim) throw std::invalid_argument("thin_box_bound: dimension mismatch");
    const double eps = box.shortest_edge();
    const double vol = box.volume();
    double hg = 1.0;
    for (double v : holder_g) hg *= v;
    const double sq = std::sqrt(static_cast<double>(n));
    const double term_sup = c.cprime * std::pow(sq, c.beta_bar) * sup_f *
                            std::pow(eps, c.beta_bar - n);
    const double term_hol = c.csum * std::pow(sq, c.gamma) * holder_f *
                            std::pow(eps, c.gamma - n);
    return std::pow(2.0, n - 1) * (term_sup + term_hol) * vol * hg;
}

namespace {

// Heuristic tolerance-driven refinement: split a cell while its level-0 and
// level-1 values disagree. Reuses the lattice engine per cell; never
// certified and excluded from the telescoping/bound guarantees.
struct AdaptiveState {
    const ScalarField& f;
    const FieldTuple& g;
    const EngineOptions& engine;
    int max_depth;
    std::uint64_t evaluations = 0;
    double residual = 0.0;

    SumWithEvals level_sum(const Box& cell, int level) {
        if (cell.dim() == 1) return riemann_1d(f, g.fields[0], cell, level, engine);
        return riemann_nd(f, g, cell, level, engine);
    }

    double refine(const Box& cell, double tol, int depth) {
        auto coarse = level_sum(cell, 0);
        auto fine = level_sum(cell, 1);
        evaluations += coarse.evaluations + fine.evaluations;
        const double gap = std::abs(fine.value - coarse.value);
        if (gap <= tol || depth >= max_depth) {
            residual += gap;
            return fine.value;
        }
        auto children = dyadic_partition(cell, 1);
        double v = 0.0;
        for (const auto& ch : children) v += refine(ch, tol / children.size(), depth + 1);
        return v;
    }
};

IntegralResult integrate_adaptive(const ScalarField& f, const FieldTuple& g, const Box& box,
                                  const IntegrateOptions& opts) {
    AdaptiveState st{f, g, opts.engine, opts.k_max, 0, 0.0};
    IntegralResult r;
    r.value = st.refine(box, opts.tol, 0);
    r.level = opts.k_max;
    r.aposteriori = st.residual;
    r.evaluations = st.evaluations;
    r.reason = StopReason::AposterioriTail;
    r.certified = false;
    return r;
}

}  // namespace

IntegralResult integrate(const ScalarField& f, const FieldTuple& g, const Box& box,
                         const IntegrateOptions& opts) {
    validate_tuple(g, box);
    validate_exponent(f.exponent, "f");
    const int n = box.dim();
    auto betas = g.exponents();
    const ErrorConstants consts = error_constants(n, f.exponent, betas);

    if (opts.adaptive) {
        auto r = integrate_adaptive(f, g, box, opts);
        r.gamma = consts.gamma;
        const double q = std::pow(2.0, n - consts.gamma);
        r.tail_factor = q / (1.0 - q);
        return r;
    }

    const bool have_bounds = f.holder_bound.has_value() && g.holder_product().has_value();
    if (opts.stopping == Stopping::Certified && !have_bounds)
        throw ConfigError("constants undeclared: certified stopping needs Hölder bounds");

    std::vector<double> hg;
    if (have_bounds)
        for (const auto& gi : g.fields) hg.push_back(*gi.holder_bound);
    const double hf = have_bounds ? *f.holder_bound : 0.0;

    const double q = std::pow(2.0, n - consts.gamma);
    IntegralResult r;
    r.gamma = consts.gamma;
    r.tail_factor = q / (1.0 - q);
    r.certified = have_bounds && f.certified && g.all_certified();

    double prev = 0.0;
    int tail_streak = 0;
    for (int k = 0; k <= opts.k_max; ++k) {
        SumWithEvals sk = (n == 1) ? riemann_1d(f, g.fields[0], box, k, opts.engine)
                                   : riemann_nd(f, g, box, k, opts.engine);
        r.evaluations += sk.evaluations;
        r.value = sk.value;
        r.level = k;
        if (have_bounds) r.apriori = apriori_bound(consts, k, box.diameter(), hf, hg);
        if (k >= 1) r.aposteriori = std::abs(sk.value - prev);
        prev = sk.value;

        const bool apriori_ok = have_bounds && opts.stopping != Stopping::Heuristic &&
                                r.apriori <= opts.tol;
        if (apriori_ok) {
            r.reason = StopReason::Apriori;
            return r;
        }
        if (opts.stopping != Stopping::Certified && k >= 1 &&
            r.aposteriori * r.tail_factor <= opts.tol) {
            if (++tail_streak >= std::max(1, opts.tail_hits)) {
                r.reason = StopReason::AposterioriTail;
                return r;
            }
        } else {
            tail_streak = 0;
        }
    }
    r.reason = StopReason::Budget;
    return r;
}

IntegralResult parametrized_integrate(const ScalarField& f, const std::vector<ScalarField>& g,
                                      const HolderMap& phi, const Box& param_box,
                                      const IntegrateOptions& opts) {
    if (phi.in_dim != param_box.dim())
        throw std::invalid_argument("parametrized_integrate: parameter box dimension mismatch");
    FieldTuple pulled;
    pulled.domain = param_box;
    for (const auto& gi : g) pulled.fields.push_back(pullback_field(gi, phi));
    ScalarField fp = pullback_field(f, phi);
    return integrate(fp, pulled, param_box, opts);
}

}  // namespace snowflake::young
