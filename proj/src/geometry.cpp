#include "snowflake/geometry.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace snowflake {

Box::Box(std::vector<std::array<double, 2>> bounds) : bounds_(std::move(bounds)) {
    for (const auto& b : bounds_) {
        if (!(b[0] < b[1]))
            throw std::invalid_argument("Box: lower bound must be strictly below upper bound");
        if (!std::isfinite(b[0]) || !std::isfinite(b[1]))
            throw std::invalid_argument("Box: bounds must be finite");
    }
}

Box Box::unit(int dim) {
    std::vector<std::array<double, 2>> b(static_cast<std::size_t>(dim), {0.0, 1.0});
    return Box(std::move(b));
}

Box Box::interval(double lo, double hi) { return Box({{lo, hi}}); }

double Box::diameter() const {
    double s = 0.0;
    for (const auto& b : bounds_) {
        double e = b[1] - b[0];
        s += e * e;
    }
    return std::sqrt(s);
}

double Box::shortest_edge() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& b : bounds_) m = std::min(m, b[1] - b[0]);
    return bounds_.empty() ? 0.0 : m;
}

double Box::volume() const {
    double v = 1.0;
    for (const auto& b : bounds_) v *= b[1] - b[0];
    return v;
}

double Box::surface_area() const {
    if (dim() == 1) return 2.0;
    double s = 0.0;
    for (int a = 0; a < dim(); ++a) s += 2.0 * without_axis(a).volume();
    return s;
}

std::vector<double> Box::barycenter() const {
    std::vector<double> c(bounds_.size());
    for (std::size_t i = 0; i < bounds_.size(); ++i) c[i] = 0.5 * (bounds_[i][0] + bounds_[i][1]);
    return c;
}

bool Box::contains(std::span<const double> point) const {
    if (static_cast<int>(point.size()) != dim()) return false;
    for (int a = 0; a < dim(); ++a)
        if (point[a] < bounds_[a][0] || point[a] > bounds_[a][1]) return false;
    return true;
}

Box Box::without_axis(int axis) const {
    std::vector<std::array<double, 2>> b;
    b.reserve(bounds_.size() - 1);
    for (int a = 0; a < dim(); ++a)
        if (a != axis) b.push_back(bounds_[a]);
    Box out;
    out.bounds_ = std::move(b);  // may be empty (point), skip validation
    return out;
}

double Box::lattice_coord(int axis, std::int64_t d, int level) const {
    if (d <= 0) return bounds_[axis][0];
    const std::int64_t last = std::int64_t{1} << level;
    if (d >= last) return bounds_[axis][1];
    const double h = std::ldexp(edge(axis), -level);  // exact scaling
    return bounds_[axis][0] + static_cast<double>(d) * h;
}

std::string Box::str() const {
    std::ostringstream os;
    for (int a = 0; a < dim(); ++a) {
        if (a) os << "x";
        os << "[" << bounds_[a][0] << "," << bounds_[a][1] << "]";
    }
    if (dim() == 0) os << "[point]";
    return os.str();
}

std::vector<double> SignedFace::embed(std::span<const double> face_point) const {
    std::vector<double> p(static_cast<std::size_t>(parent.dim()));
    int src = 0;
    for (int a = 0; a < parent.dim(); ++a) {
        if (a == axis)
            p[a] = fixed_coordinate;
        else
            p[a] = face_point[src++];
    }
    return p;
}

std::uint64_t dyadic_cell_count(int dim, int level) {
    if (dim < 0 || level < 0) throw std::invalid_argument("dyadic_cell_count: negative argument");
    const int bits = dim * level;
    if (bits >= 63) throw std::invalid_argument("dyadic_cell_count: 2^(dim*level) overflows");
    return std::uint64_t{1} << bits;
}

std::vector<Box> dyadic_partition(const Box& box, int level) {
    if (level < 0) throw std::invalid_argument("dyadic_partition: level must be >= 0");
    const int n = box.dim();
    const std::uint64_t cells = dyadic_cell_count(n, level);
    const std::int64_t per_axis = std::int64_t{1} << level;

    std::vector<Box> out;
    out.reserve(cells);
    std::vector<std::int64_t> idx(static_cast<std::size_t>(n), 0);
    for (std::uint64_t rank = 0; rank < cells; ++rank) {
        // decode rank lexicographically, axis 0 most significant
        std::uint64_t r = rank;
        for (int a = n - 1; a >= 0; --a) {
            idx[a] = static_cast<std::int64_t>(r % per_axis);
            r /= per_axis;
        }
        std::vector<std::array<double, 2>> b(static_cast<std::size_t>(n));
        for (int a = 0; a < n; ++a) {
            b[a] = {box.lattice_coord(a, idx[a], level), box.lattice_coord(a, idx[a] + 1, level)};
        }
        out.emplace_back(std::move(b));
    }
    return out;
}

std::vector<SignedFace> boundary_faces(const Box& box) {
    if (box.dim() < 1) throw std::invalid_argument("boundary_faces: box must have dimension >= 1");
    std::vector<SignedFace> faces;
    faces.reserve(2 * static_cast<std::size_t>(box.dim()));
    for (int a = 0; a < box.dim(); ++a) {
        for (int side = 0; side < 2; ++side) {
            SignedFace f;
            f.parent = box;
            f.axis = a;
            f.side = side;
            f.sign = ((a + 1 + side) % 2 == 0) ? 1 : -1;  // (-1)^(i+j), i = a+1
            f.fixed_coordinate = side == 0 ? box.lower(a) : box.upper(a);
            f.face_box = box.without_axis(a);
            faces.push_back(std::move(f));
        }
    }
    return faces;
}

BoxMetrics box_metrics(const Box& box) {
    return BoxMetrics{box.barycenter(), box.diameter(), box.shortest_edge()};
}

}  // namespace snowflake
