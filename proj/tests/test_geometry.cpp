#include <doctest.h>

#include <cmath>
#include <set>

#include "snowflake/geometry.hpp"
#include "snowflake/parallel.hpp"

using namespace snowflake;

TEST_CASE("dyadic partition of an interval") {
    auto cells = dyadic_partition(Box::interval(0.0, 1.0), 1);
    REQUIRE(cells.size() == 2);
    CHECK(cells[0].lower(0) == 0.0);
    CHECK(cells[0].upper(0) == 0.5);
    CHECK(cells[1].lower(0) == 0.5);
    CHECK(cells[1].upper(0) == 1.0);
}

TEST_CASE("dyadic partition counts and sizes") {
    auto cells = dyadic_partition(Box::unit(2), 2);
    REQUIRE(cells.size() == 16);
    for (const auto& c : cells) {
        CHECK(c.edge(0) == doctest::Approx(0.25));
        CHECK(c.edge(1) == doctest::Approx(0.25));
    }

    auto rect = dyadic_partition(Box({{0.0, 2.0}, {0.0, 1.0}}), 1);
    REQUIRE(rect.size() == 4);
    for (const auto& c : rect) {
        CHECK(c.edge(0) == doctest::Approx(1.0));
        CHECK(c.edge(1) == doctest::Approx(0.5));
    }
}

TEST_CASE("partition order is lexicographic by cell index") {
    auto cells = dyadic_partition(Box::unit(2), 1);
    // axis 0 most significant: (0,0), (0,1), (1,0), (1,1)
    CHECK(cells[0].lower(0) == 0.0);
    CHECK(cells[0].lower(1) == 0.0);
    CHECK(cells[1].lower(0) == 0.0);
    CHECK(cells[1].lower(1) == 0.5);
    CHECK(cells[2].lower(0) == 0.5);
    CHECK(cells[2].lower(1) == 0.0);
}

TEST_CASE("partition consistency across levels") {
    Box box({{0.25, 1.5}, {-1.0, 0.5}});
    auto fine = dyadic_partition(box, 3);
    std::set<std::pair<double, double>> corners_fine;
    for (const auto& c : fine) corners_fine.insert({c.lower(0), c.lower(1)});

    std::set<std::pair<double, double>> corners_two_step;
    for (const auto& c : dyadic_partition(box, 2))
        for (const auto& cc : dyadic_partition(c, 1))
            corners_two_step.insert({cc.lower(0), cc.lower(1)});
    CHECK(corners_fine == corners_two_step);
}

TEST_CASE("cell volumes sum to the box volume") {
    Box box({{0.1, 0.9}, {0.0, 3.0}, {-2.0, -1.0}});
    for (int k : {1, 2, 3}) {
        auto cells = dyadic_partition(box, k);
        std::vector<double> vols;
        vols.reserve(cells.size());
        for (const auto& c : cells) vols.push_back(c.volume());
        CHECK(pairwise_sum(vols) == doctest::Approx(box.volume()).epsilon(1e-13));
    }
}

TEST_CASE("boundary faces carry the alternating signs") {
    auto faces = boundary_faces(Box::unit(2));
    REQUIRE(faces.size() == 4);
    // ({0} x [0,1], -1), ({1} x [0,1], +1), ([0,1] x {0}, +1), ([0,1] x {1}, -1)
    CHECK(faces[0].sign == -1);
    CHECK(faces[0].fixed_coordinate == 0.0);
    CHECK(faces[1].sign == 1);
    CHECK(faces[1].fixed_coordinate == 1.0);
    CHECK(faces[2].sign == 1);
    CHECK(faces[3].sign == -1);

    auto cube = boundary_faces(Box::unit(3));
    REQUIRE(cube.size() == 6);
    for (const auto& f : cube) {
        const int expect = ((f.axis + 1 + f.side) % 2 == 0) ? 1 : -1;
        CHECK(f.sign == expect);
    }
}

TEST_CASE("interval faces are signed endpoint evaluations") {
    auto faces = boundary_faces(Box::interval(2.0, 5.0));
    REQUIRE(faces.size() == 2);
    CHECK(faces[0].sign == -1);
    CHECK(faces[0].fixed_coordinate == 2.0);
    CHECK(faces[0].face_box.dim() == 0);
    CHECK(faces[1].sign == 1);
    CHECK(faces[1].fixed_coordinate == 5.0);
    CHECK_THROWS_AS(boundary_faces(faces[0].face_box), std::invalid_argument);
}

TEST_CASE("face embedding lands on the parent boundary") {
    Box box({{0.0, 2.0}, {1.0, 3.0}, {4.0, 5.0}});
    for (const auto& f : boundary_faces(box)) {
        auto center = f.face_box.barycenter();
        auto p = f.embed(center);
        REQUIRE(p.size() == 3);
        CHECK(p[f.axis] == f.fixed_coordinate);
        CHECK(box.contains(p));
    }
}

TEST_CASE("box metrics") {
    auto m = box_metrics(Box::unit(2));
    CHECK(m.barycenter[0] == 0.5);
    CHECK(m.barycenter[1] == 0.5);
    CHECK(m.diameter == doctest::Approx(std::sqrt(2.0)));
    CHECK(m.shortest_edge == 1.0);

    auto r = box_metrics(Box({{0.0, 2.0}, {0.0, 1.0}}));
    CHECK(r.barycenter[0] == 1.0);
    CHECK(r.barycenter[1] == 0.5);
    CHECK(r.diameter == doctest::Approx(std::sqrt(5.0)));
    CHECK(r.shortest_edge == 1.0);

    auto i = box_metrics(Box::interval(-1.0, 3.0));
    CHECK(i.barycenter[0] == 1.0);
    CHECK(i.diameter == 4.0);
    CHECK(i.shortest_edge == 4.0);
}

TEST_CASE("degenerate boxes are rejected") {
    CHECK_THROWS_AS(Box::interval(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Box::interval(2.0, 1.0), std::invalid_argument);
}

TEST_CASE("lattice endpoints are exact") {
    Box box({{0.1, 0.7}});
    CHECK(box.lattice_coord(0, 0, 5) == 0.1);
    CHECK(box.lattice_coord(0, 32, 5) == 0.7);
}
