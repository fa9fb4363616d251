#include <doctest.h>

#include <cmath>
#include <set>

#include "tmx/errors.hpp"
#include "tmx/field.hpp"
#include "tmx/mesh.hpp"

using namespace tmx;

namespace {

// inscribed regular n-gon area, the oracle for disk mesh areas
double polygon_area(int n) { return 0.5 * n * std::sin(2.0 * M_PI / n); }

// edge count via direct enumeration, for the Euler-formula refinement oracle
size_t count_edges(const Mesh& m) {
    std::set<std::pair<int, int>> edges;
    for (const auto& tr : m.triangles())
        for (int k = 0; k < 3; ++k) {
            auto e = std::minmax(tr[k], tr[(k + 1) % 3]);
            edges.insert({e.first, e.second});
        }
    return edges.size();
}

}  // namespace

TEST_SUITE("mesh") {

TEST_CASE("disk level 0 approximates the unit disk") {
    Mesh m = build_disk_mesh(0);
    CHECK(m.n_triangles() >= 6);
    CHECK(std::abs(m.area() - M_PI) / M_PI < 0.10);
    CHECK(m.area() == doctest::Approx(polygon_area(12)).epsilon(1e-12));
}

TEST_CASE("disk level 5 area matches the inscribed polygon oracle") {
    Mesh m = build_disk_mesh(5);
    CHECK(std::abs(m.area() - M_PI) / M_PI < 1e-3);
    // the boundary is a regular (12 * 2^5)-gon
    CHECK(m.area() == doctest::Approx(polygon_area(12 << 5)).epsilon(1e-12));
}

TEST_CASE("disk boundary vertices sit on the unit circle") {
    for (int level : {0, 2, 4}) {
        Mesh m = build_disk_mesh(level);
        for (int v : m.boundary_vertices()) CHECK(std::abs(norm(m.vertex(v)) - 1.0) <= 1e-12);
    }
}

TEST_CASE("disk max edge halves per level") {
    // circle projection stretches boundary-adjacent edges by O(h^2), so the
    // halving ratio approaches 1/2 from above
    double prev = build_disk_mesh(0).max_edge_length();
    double prev_ratio = 1.0;
    for (int level = 1; level <= 4; ++level) {
        double cur = build_disk_mesh(level).max_edge_length();
        double ratio = cur / prev;
        CHECK(ratio <= 0.55);
        CHECK(ratio <= prev_ratio + 1e-12);
        prev = cur;
        prev_ratio = ratio;
    }
    CHECK(prev_ratio <= 0.51);
}

TEST_CASE("disk meshes keep the minimum-angle guarantee") {
    CHECK(build_disk_mesh(0).min_angle_deg() >= 20.0);
    CHECK(build_disk_mesh(3).min_angle_deg() >= 20.0);
}

TEST_CASE("disk rejects negative level") {
    CHECK_THROWS_AS(build_disk_mesh(-1), DomainError);
}

TEST_CASE("rect mesh exact tiling") {
    Mesh m = build_rect_mesh(1, 1, 2, 2);
    CHECK(m.n_triangles() == 8);
    CHECK(m.area() == doctest::Approx(1.0).epsilon(1e-15));

    Mesh m2 = build_rect_mesh(2, 1, 4, 2);
    CHECK(m2.area() == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("rect interior vertex count follows the grid oracle") {
    Mesh m = build_rect_mesh(1, 1, 64, 64);
    CHECK((int)m.interior_vertices().size() == 63 * 63);
    CHECK(m.n_vertices() == 65 * 65);
}

TEST_CASE("rect rejects bad dimensions") {
    CHECK_THROWS_AS(build_rect_mesh(0.0, 1.0, 2, 2), DomainError);
    CHECK_THROWS_AS(build_rect_mesh(1.0, -1.0, 2, 2), DomainError);
    CHECK_THROWS_AS(build_rect_mesh(1.0, 1.0, 0, 2), DomainError);
}

TEST_CASE("refine splits four-to-one and projects the disk boundary") {
    Mesh sq = build_rect_mesh(1, 1, 2, 2);
    Mesh rq = refine(sq);
    CHECK(rq.n_triangles() == 32);
    CHECK(rq.area() == doctest::Approx(1.0).epsilon(1e-14));

    Mesh d = build_disk_mesh(1);
    Mesh rd = refine(d);
    CHECK(rd.area() > d.area());  // inscribed polygon monotonicity
}

TEST_CASE("refined vertex count equals V + E (Euler oracle)") {
    for (const Mesh& m : {build_disk_mesh(2), build_rect_mesh(1.5, 1.0, 3, 4)}) {
        size_t expected = (size_t)m.n_vertices() + count_edges(m);
        CHECK((size_t)refine(m).n_vertices() == expected);
    }
}

TEST_CASE("area equals the sum of triangle areas") {
    Mesh m = build_disk_mesh(3);
    double s = 0.0;
    for (int t = 0; t < m.n_triangles(); ++t) s += m.tri_area(t);
    CHECK(std::abs(s - m.area()) <= 1e-12 * m.area());
}

TEST_CASE("boundary mask is exactly the boundary-edge endpoints") {
    Mesh m = build_rect_mesh(1, 1, 3, 3);
    std::set<int> from_edges;
    for (const auto& e : m.boundary_edges()) {
        from_edges.insert(e[0]);
        from_edges.insert(e[1]);
    }
    for (int v = 0; v < m.n_vertices(); ++v)
        CHECK(m.is_boundary(v) == (from_edges.count(v) > 0));
}

TEST_CASE("save/load round-trip is the identity") {
    Mesh m = build_disk_mesh(0);
    std::string text = mesh_to_string(m);
    Mesh back = mesh_from_string(text);
    CHECK(back.vertices() == m.vertices());
    CHECK(back.triangles() == m.triangles());
    CHECK(mesh_to_string(back) == text);
    // circle flag re-inferred from boundary positions
    CHECK(back.boundary_shape() == Mesh::BoundaryShape::unit_circle);
}

TEST_CASE("loader rejects out-of-range vertex indices") {
    std::string bad = "tmmesh 1\n3 1\n0 0\n1 0\n0 1\n0 1 7\n";
    CHECK_THROWS_AS(mesh_from_string(bad), ValidationError);
}

TEST_CASE("loader rejects zero-area triangles") {
    std::string bad = "tmmesh 1\n4 2\n0 0\n1 0\n2 0\n0 1\n0 1 3\n0 1 2\n";
    CHECK_THROWS_AS(mesh_from_string(bad), ValidationError);
}

TEST_CASE("loader reports the line of a malformed file") {
    std::string bad = "tmmesh 1\n3 1\n0 0\nnot-a-number 0\n0 1\n0 1 2\n";
    try {
        mesh_from_string(bad);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 4);
    }
}

TEST_CASE("non-manifold connectivity is rejected") {
    // edge (0,1) shared by three triangles
    std::vector<Vec2> v = {{0, 0}, {1, 0}, {0, 1}, {0, -1}, {1, 1}};
    std::vector<std::array<int, 3>> t = {{0, 1, 2}, {0, 1, 3}, {0, 1, 4}};
    CHECK_THROWS_AS(Mesh::from_data(v, t), ValidationError);
}

TEST_CASE("isolated vertices are rejected") {
    std::vector<Vec2> v = {{0, 0}, {1, 0}, {0, 1}, {5, 5}};
    std::vector<std::array<int, 3>> t = {{0, 1, 2}};
    CHECK_THROWS_AS(Mesh::from_data(v, t), ValidationError);
}

TEST_CASE("point location and interpolation") {
    Mesh m = build_rect_mesh(2, 1, 8, 4);
    Field f(m);
    for (int i = 0; i < m.n_vertices(); ++i) f[i] = 3.0 * m.vertex(i).x - m.vertex(i).y;
    // linear functions are reproduced exactly
    CHECK(f.interpolate({0.73, 0.31}) == doctest::Approx(3 * 0.73 - 0.31).epsilon(1e-14));
    CHECK_THROWS_AS(f.interpolate({5.0, 5.0}), DomainError);
}

}  // TEST_SUITE
