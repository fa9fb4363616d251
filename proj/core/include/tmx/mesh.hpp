#pragma once

#include <array>
#include <string>
#include <vector>

#include "tmx/geometry.hpp"

namespace tmx {

/// Triangulated planar domain. Immutable after construction; safe to share
/// across threads. Boundary vertices are exactly the endpoints of edges that
/// belong to a single triangle.
class Mesh {
public:
    enum class BoundaryShape { polygon, unit_circle };

    /// Validates connectivity, orients triangles counterclockwise, infers the
    /// boundary, and precomputes the point locator. Throws ValidationError on
    /// out-of-range indices, degenerate triangles, non-manifold edges, or
    /// isolated vertices.
    static Mesh from_data(std::vector<Vec2> vertices,
                          std::vector<std::array<int, 3>> triangles,
                          BoundaryShape shape = BoundaryShape::polygon);

    int n_vertices() const { return static_cast<int>(vertices_.size()); }
    int n_triangles() const { return static_cast<int>(triangles_.size()); }
    Vec2 vertex(int i) const { return vertices_[i]; }
    const std::vector<Vec2>& vertices() const { return vertices_; }
    const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }

    bool is_boundary(int v) const { return boundary_mask_[v] != 0; }
    const std::vector<int>& boundary_vertices() const { return boundary_vertices_; }
    const std::vector<int>& interior_vertices() const { return interior_vertices_; }
    const std::vector<std::array<int, 2>>& boundary_edges() const { return boundary_edges_; }

    double area() const { return area_; }
    double tri_area(int t) const;
    double max_edge_length() const { return max_edge_; }
    double min_angle_deg() const;

    BoundaryShape boundary_shape() const { return shape_; }

    /// Index of a triangle containing p, or -1 when p lies outside the mesh
    /// (beyond a small tolerance relative to the local edge length).
    int locate(Vec2 p) const;

    /// Barycentric coordinates of p in triangle t (clamped to [0,1] and
    /// renormalized when p sits marginally outside).
    std::array<double, 3> barycentric(int t, Vec2 p) const;

    /// Distance from p to the polygonal boundary.
    double distance_to_boundary(Vec2 p) const;

    /// Mean length of edges incident to vertex v.
    double mean_incident_edge(int v) const;

private:
    std::vector<Vec2> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<char> boundary_mask_;
    std::vector<int> boundary_vertices_;
    std::vector<int> interior_vertices_;
    std::vector<std::array<int, 2>> boundary_edges_;
    double area_ = 0.0;
    double max_edge_ = 0.0;
    BoundaryShape shape_ = BoundaryShape::polygon;

    // uniform bucket grid for point location
    Vec2 bbox_lo_, bbox_hi_;
    int grid_nx_ = 0, grid_ny_ = 0;
    double cell_ = 1.0;
    std::vector<std::vector<int>> buckets_;

    void build_locator();
};

/// Fan-plus-refinement triangulation of the unit disk. Level 0 is a regular
/// 12-gon fan (12 triangles); each level splits every triangle in four and
/// projects new boundary vertices onto the unit circle, so the maximum edge
/// length halves per level. Minimum angle stays at 30 degrees.
Mesh build_disk_mesh(int refinement_level);

/// Structured triangulation of [0,width] x [0,height] with 2*nx*ny triangles.
Mesh build_rect_mesh(double width, double height, int nx, int ny);

/// Uniform 4-to-1 refinement by edge midpoints. Disk meshes get new boundary
/// midpoints radially projected to the unit circle.
Mesh refine(const Mesh& mesh);

/// Text format "tmmesh 1" (see README). Vertices are written with 17
/// significant digits so save/load round-trips bit-exactly.
void save_mesh(const Mesh& mesh, const std::string& path);
Mesh load_mesh(const std::string& path);

/// Serialize/deserialize to the same format in memory (used by the CLI and
/// the round-trip tests).
std::string mesh_to_string(const Mesh& mesh);
Mesh mesh_from_string(const std::string& text);

}  // namespace tmx
