#include "tmx/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "tmx/errors.hpp"
#include "tmx/output.hpp"

namespace tmx {

namespace {

// Kahan-compensated sum; the mesh area invariant is checked at 1e-12 relative.
double stable_sum(const std::vector<double>& xs) {
    double s = 0.0, c = 0.0;
    for (double x : xs) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

}  // namespace

double Mesh::tri_area(int t) const {
    const auto& tr = triangles_[t];
    return signed_area(vertices_[tr[0]], vertices_[tr[1]], vertices_[tr[2]]);
}

double Mesh::min_angle_deg() const {
    double worst = 180.0;
    for (const auto& tr : triangles_) {
        for (int k = 0; k < 3; ++k) {
            Vec2 a = vertices_[tr[k]];
            Vec2 b = vertices_[tr[(k + 1) % 3]];
            Vec2 c = vertices_[tr[(k + 2) % 3]];
            Vec2 u = b - a, v = c - a;
            double ang = std::acos(std::clamp(dot(u, v) / (norm(u) * norm(v)), -1.0, 1.0));
            worst = std::min(worst, ang * 180.0 / M_PI);
        }
    }
    return worst;
}

Mesh Mesh::from_data(std::vector<Vec2> vertices,
                     std::vector<std::array<int, 3>> triangles,
                     BoundaryShape shape) {
    Mesh m;
    m.vertices_ = std::move(vertices);
    m.triangles_ = std::move(triangles);
    m.shape_ = shape;

    const int nv = m.n_vertices();
    const int nt = m.n_triangles();
    if (nv < 3 || nt < 1) throw ValidationError("mesh needs at least 3 vertices and 1 triangle");

    double scale = 0.0;
    for (const auto& p : m.vertices_) scale = std::max(scale, std::max(std::abs(p.x), std::abs(p.y)));
    if (scale == 0.0) scale = 1.0;

    std::vector<char> used(nv, 0);
    std::vector<double> areas(nt);
    for (int t = 0; t < nt; ++t) {
        auto& tr = m.triangles_[t];
        for (int k = 0; k < 3; ++k) {
            if (tr[k] < 0 || tr[k] >= nv)
                throw ValidationError("triangle " + std::to_string(t) + " references vertex " +
                                      std::to_string(tr[k]) + " out of range");
            used[tr[k]] = 1;
        }
        if (tr[0] == tr[1] || tr[1] == tr[2] || tr[0] == tr[2])
            throw ValidationError("triangle " + std::to_string(t) + " repeats a vertex");
        double a = signed_area(m.vertices_[tr[0]], m.vertices_[tr[1]], m.vertices_[tr[2]]);
        if (a < 0) {
            std::swap(tr[1], tr[2]);
            a = -a;
        }
        if (a <= 1e-14 * scale * scale)
            throw ValidationError("triangle " + std::to_string(t) + " is degenerate (zero area)");
        areas[t] = a;
    }
    for (int v = 0; v < nv; ++v)
        if (!used[v]) throw ValidationError("vertex " + std::to_string(v) + " belongs to no triangle");

    // Edge census: interior edges appear in exactly 2 triangles, boundary in 1.
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& tr : m.triangles_) {
        for (int k = 0; k < 3; ++k) {
            int a = tr[k], b = tr[(k + 1) % 3];
            if (a > b) std::swap(a, b);
            int c = ++edge_count[{a, b}];
            if (c > 2)
                throw ValidationError("non-manifold edge (" + std::to_string(a) + "," +
                                      std::to_string(b) + ") shared by more than 2 triangles");
        }
    }
    m.boundary_mask_.assign(nv, 0);
    double max_edge = 0.0;
    for (const auto& [e, c] : edge_count) {
        max_edge = std::max(max_edge, dist(m.vertices_[e.first], m.vertices_[e.second]));
        if (c == 1) {
            m.boundary_mask_[e.first] = 1;
            m.boundary_mask_[e.second] = 1;
            m.boundary_edges_.push_back({e.first, e.second});
        }
    }
    if (m.boundary_edges_.empty()) throw ValidationError("mesh has no boundary");
    m.max_edge_ = max_edge;

    for (int v = 0; v < nv; ++v)
        (m.boundary_mask_[v] ? m.boundary_vertices_ : m.interior_vertices_).push_back(v);

    m.area_ = stable_sum(areas);
    m.build_locator();
    return m;
}

void Mesh::build_locator() {
    bbox_lo_ = bbox_hi_ = vertices_[0];
    for (const auto& p : vertices_) {
        bbox_lo_.x = std::min(bbox_lo_.x, p.x);
        bbox_lo_.y = std::min(bbox_lo_.y, p.y);
        bbox_hi_.x = std::max(bbox_hi_.x, p.x);
        bbox_hi_.y = std::max(bbox_hi_.y, p.y);
    }
    double w = std::max(bbox_hi_.x - bbox_lo_.x, 1e-300);
    double h = std::max(bbox_hi_.y - bbox_lo_.y, 1e-300);
    int target = std::max(1, (int)std::sqrt((double)n_triangles()));
    cell_ = std::max(w, h) / target;
    grid_nx_ = std::max(1, (int)std::ceil(w / cell_));
    grid_ny_ = std::max(1, (int)std::ceil(h / cell_));
    buckets_.assign((size_t)grid_nx_ * grid_ny_, {});
    for (int t = 0; t < n_triangles(); ++t) {
        const auto& tr = triangles_[t];
        Vec2 lo = vertices_[tr[0]], hi = lo;
        for (int k = 1; k < 3; ++k) {
            lo.x = std::min(lo.x, vertices_[tr[k]].x);
            lo.y = std::min(lo.y, vertices_[tr[k]].y);
            hi.x = std::max(hi.x, vertices_[tr[k]].x);
            hi.y = std::max(hi.y, vertices_[tr[k]].y);
        }
        int i0 = std::clamp((int)((lo.x - bbox_lo_.x) / cell_), 0, grid_nx_ - 1);
        int i1 = std::clamp((int)((hi.x - bbox_lo_.x) / cell_), 0, grid_nx_ - 1);
        int j0 = std::clamp((int)((lo.y - bbox_lo_.y) / cell_), 0, grid_ny_ - 1);
        int j1 = std::clamp((int)((hi.y - bbox_lo_.y) / cell_), 0, grid_ny_ - 1);
        for (int i = i0; i <= i1; ++i)
            for (int j = j0; j <= j1; ++j) buckets_[(size_t)j * grid_nx_ + i].push_back(t);
    }
}

int Mesh::locate(Vec2 p) const {
    int i = std::clamp((int)((p.x - bbox_lo_.x) / cell_), 0, grid_nx_ - 1);
    int j = std::clamp((int)((p.y - bbox_lo_.y) / cell_), 0, grid_ny_ - 1);
    int best = -1;
    double best_defect = 1e-9;  // relative barycentric slack
    for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
            int ii = i + di, jj = j + dj;
            if (ii < 0 || jj < 0 || ii >= grid_nx_ || jj >= grid_ny_) continue;
            for (int t : buckets_[(size_t)jj * grid_nx_ + ii]) {
                const auto& tr = triangles_[t];
                Vec2 a = vertices_[tr[0]], b = vertices_[tr[1]], c = vertices_[tr[2]];
                double A = signed_area(a, b, c);
                double l0 = signed_area(p, b, c) / A;
                double l1 = signed_area(a, p, c) / A;
                double l2 = 1.0 - l0 - l1;
                double defect = -std::min({l0, l1, l2});
                if (defect < best_defect) {
                    best_defect = defect;
                    best = t;
                    if (defect <= 0) return t;
                }
            }
        }
    }
    return best;
}

std::array<double, 3> Mesh::barycentric(int t, Vec2 p) const {
    const auto& tr = triangles_[t];
    Vec2 a = vertices_[tr[0]], b = vertices_[tr[1]], c = vertices_[tr[2]];
    double A = signed_area(a, b, c);
    double l0 = std::clamp(signed_area(p, b, c) / A, 0.0, 1.0);
    double l1 = std::clamp(signed_area(a, p, c) / A, 0.0, 1.0);
    double l2 = std::clamp(1.0 - l0 - l1, 0.0, 1.0);
    double s = l0 + l1 + l2;
    return {l0 / s, l1 / s, l2 / s};
}

double Mesh::distance_to_boundary(Vec2 p) const {
    double d = std::numeric_limits<double>::max();
    for (const auto& e : boundary_edges_) {
        Vec2 a = vertices_[e[0]], b = vertices_[e[1]];
        Vec2 ab = b - a;
        double t = std::clamp(dot(p - a, ab) / dot(ab, ab), 0.0, 1.0);
        d = std::min(d, dist(p, a + t * ab));
    }
    return d;
}

double Mesh::mean_incident_edge(int v) const {
    double s = 0.0;
    int cnt = 0;
    for (const auto& tr : triangles_) {
        for (int k = 0; k < 3; ++k) {
            if (tr[k] != v) continue;
            s += dist(vertices_[v], vertices_[tr[(k + 1) % 3]]);
            s += dist(vertices_[v], vertices_[tr[(k + 2) % 3]]);
            cnt += 2;
        }
    }
    return cnt ? s / cnt : 0.0;
}

Mesh build_disk_mesh(int refinement_level) {
    if (refinement_level < 0) throw DomainError("disk refinement level must be >= 0");
    const int n = 12;
    std::vector<Vec2> verts;
    verts.push_back({0.0, 0.0});
    for (int k = 0; k < n; ++k) {
        double a = 2.0 * M_PI * k / n;
        verts.push_back({std::cos(a), std::sin(a)});
    }
    std::vector<std::array<int, 3>> tris;
    for (int k = 0; k < n; ++k) tris.push_back({0, 1 + k, 1 + (k + 1) % n});
    Mesh m = Mesh::from_data(std::move(verts), std::move(tris), Mesh::BoundaryShape::unit_circle);
    for (int l = 0; l < refinement_level; ++l) m = refine(m);
    return m;
}

Mesh build_rect_mesh(double width, double height, int nx, int ny) {
    if (width <= 0 || height <= 0) throw DomainError("rectangle dimensions must be positive");
    if (nx < 1 || ny < 1) throw DomainError("rectangle subdivisions must be >= 1");
    std::vector<Vec2> verts;
    verts.reserve((size_t)(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            verts.push_back({width * i / nx, height * j / ny});
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    std::vector<std::array<int, 3>> tris;
    tris.reserve((size_t)2 * nx * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            // alternate the diagonal so the mesh has no preferred direction
            if ((i + j) % 2 == 0) {
                tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
                tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
            } else {
                tris.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
                tris.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
            }
        }
    }
    return Mesh::from_data(std::move(verts), std::move(tris));
}

Mesh refine(const Mesh& mesh) {
    std::vector<Vec2> verts = mesh.vertices();
    std::vector<std::array<int, 3>> tris;
    tris.reserve((size_t)4 * mesh.n_triangles());

    std::map<std::pair<int, int>, int> midpoint;
    // boundary edge lookup for circle projection
    std::map<std::pair<int, int>, bool> is_bedge;
    for (const auto& e : mesh.boundary_edges()) {
        auto key = std::minmax(e[0], e[1]);
        is_bedge[{key.first, key.second}] = true;
    }
    auto mid = [&](int a, int b) {
        auto key = std::minmax(a, b);
        auto it = midpoint.find({key.first, key.second});
        if (it != midpoint.end()) return it->second;
        Vec2 p = 0.5 * (mesh.vertex(a) + mesh.vertex(b));
        if (mesh.boundary_shape() == Mesh::BoundaryShape::unit_circle &&
            is_bedge.count({key.first, key.second})) {
            double r = norm(p);
            p = (1.0 / r) * p;
        }
        int idx = (int)verts.size();
        verts.push_back(p);
        midpoint[{key.first, key.second}] = idx;
        return idx;
    };

    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tr = mesh.triangle(t);
        int m01 = mid(tr[0], tr[1]);
        int m12 = mid(tr[1], tr[2]);
        int m20 = mid(tr[2], tr[0]);
        tris.push_back({tr[0], m01, m20});
        tris.push_back({tr[1], m12, m01});
        tris.push_back({tr[2], m20, m12});
        tris.push_back({m01, m12, m20});
    }
    return Mesh::from_data(std::move(verts), std::move(tris), mesh.boundary_shape());
}

std::string mesh_to_string(const Mesh& mesh) {
    std::string out;
    out += "tmmesh 1\n";
    out += std::to_string(mesh.n_vertices()) + " " + std::to_string(mesh.n_triangles()) + "\n";
    for (const auto& p : mesh.vertices())
        out += fmt17(p.x) + " " + fmt17(p.y) + "\n";
    for (const auto& tr : mesh.triangles())
        out += std::to_string(tr[0]) + " " + std::to_string(tr[1]) + " " + std::to_string(tr[2]) + "\n";
    return out;
}

Mesh mesh_from_string(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    long lineno = 0;
    auto next_line = [&]() {
        if (!std::getline(in, line)) throw ParseError("unexpected end of mesh file", lineno);
        ++lineno;
        return line;
    };
    std::string header = next_line();
    if (header != "tmmesh 1") throw ParseError("bad header, expected 'tmmesh 1'", lineno);
    int nv = 0, nt = 0;
    {
        std::istringstream ls(next_line());
        if (!(ls >> nv >> nt) || nv < 0 || nt < 0) throw ParseError("bad vertex/triangle counts", lineno);
    }
    std::vector<Vec2> verts(nv);
    for (int i = 0; i < nv; ++i) {
        std::istringstream ls(next_line());
        if (!(ls >> verts[i].x >> verts[i].y)) throw ParseError("bad vertex coordinates", lineno);
    }
    std::vector<std::array<int, 3>> tris(nt);
    for (int t = 0; t < nt; ++t) {
        std::istringstream ls(next_line());
        if (!(ls >> tris[t][0] >> tris[t][1] >> tris[t][2])) throw ParseError("bad triangle indices", lineno);
    }
    // A saved disk mesh has all boundary vertices on the unit circle; restore
    // the circle-projection refinement behavior in that case.
    Mesh m = Mesh::from_data(verts, tris);
    bool on_circle = true;
    for (int v : m.boundary_vertices())
        on_circle = on_circle && std::abs(norm(m.vertex(v)) - 1.0) <= 1e-12;
    if (on_circle) return Mesh::from_data(std::move(verts), std::move(tris), Mesh::BoundaryShape::unit_circle);
    return m;
}

void save_mesh(const Mesh& mesh, const std::string& path) {
    atomic_write(path, mesh_to_string(mesh));
}

Mesh load_mesh(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open mesh file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return mesh_from_string(ss.str());
}

}  // namespace tmx
