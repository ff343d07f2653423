#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace snowflake {

/// An axis-aligned box [lo_1,hi_1] x ... x [lo_n,hi_n]. Dimension 0 (the
/// empty bound list) denotes a single point and only occurs as the face of
/// an interval. Immutable after construction; safe for concurrent reads.
class Box {
public:
    Box() = default;
    explicit Box(std::vector<std::array<double, 2>> bounds);

    /// [0,1]^n.
    static Box unit(int dim);
    /// 1-D interval.
    static Box interval(double lo, double hi);

    int dim() const { return static_cast<int>(bounds_.size()); }
    double lower(int axis) const { return bounds_[axis][0]; }
    double upper(int axis) const { return bounds_[axis][1]; }
    double edge(int axis) const { return bounds_[axis][1] - bounds_[axis][0]; }
    const std::vector<std::array<double, 2>>& bounds() const { return bounds_; }

    double diameter() const;       // Euclidean norm of the edge vector
    double shortest_edge() const;
    double volume() const;
    double surface_area() const;   // dim 1: 2 (two endpoints, unit mass each)
    std::vector<double> barycenter() const;
    bool contains(std::span<const double> point) const;

    /// The (dim-1)-dimensional box obtained by deleting `axis`.
    Box without_axis(int axis) const;

    /// Coordinate of the dyadic lattice point with index d in 0..2^level
    /// along `axis`. Endpoints are returned exactly; interior points are
    /// lower + d*(edge/2^level), a single rounding after the exact
    /// power-of-two scaling.
    double lattice_coord(int axis, std::int64_t d, int level) const;

    std::string str() const;

private:
    std::vector<std::array<double, 2>> bounds_;
};

/// One oriented codimension-1 face of a box, sign (-1)^(i+j) with the axis
/// i counted from 1 and side j in {0,1}.
struct SignedFace {
    Box parent;
    int axis = 0;               // 0-based
    int side = 0;               // 0 = lower, 1 = upper
    int sign = 1;               // (-1)^(axis+1+side)
    double fixed_coordinate = 0.0;
    Box face_box;               // parent with `axis` deleted (dim-1, possibly 0-dim)

    /// Embeds a point of the face box back into parent coordinates.
    std::vector<double> embed(std::span<const double> face_point) const;
};

struct BoxMetrics {
    std::vector<double> barycenter;
    double diameter = 0.0;
    double shortest_edge = 0.0;
};

/// All 2^(k*dim) cells of the level-k dyadic partition, ordered
/// lexicographically by multi-index (axis 0 most significant).
std::vector<Box> dyadic_partition(const Box& box, int level);

/// The 2*dim oriented boundary faces, ordered by (axis, side).
std::vector<SignedFace> boundary_faces(const Box& box);

BoxMetrics box_metrics(const Box& box);

/// Number of cells in the level-k partition: 2^(k*dim).
std::uint64_t dyadic_cell_count(int dim, int level);

}  // namespace snowflake
