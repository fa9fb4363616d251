#pragma once

#include <algorithm>
#include <vector>

#include "tmx/errors.hpp"
#include "tmx/mesh.hpp"

namespace tmx {

/// Nodal coefficients of a piecewise-linear function on a Mesh.
class Field {
public:
    Field() = default;
    explicit Field(const Mesh& mesh, double init = 0.0)
        : mesh_(&mesh), v_((size_t)mesh.n_vertices(), init) {}
    Field(const Mesh& mesh, std::vector<double> values) : mesh_(&mesh), v_(std::move(values)) {
        if ((int)v_.size() != mesh.n_vertices())
            throw ValidationError("field length does not match vertex count");
    }

    const Mesh& mesh() const { return *mesh_; }
    int size() const { return (int)v_.size(); }
    double operator[](int i) const { return v_[i]; }
    double& operator[](int i) { return v_[i]; }
    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

    void zero_boundary() {
        for (int b : mesh_->boundary_vertices()) v_[b] = 0.0;
    }

    bool is_dirichlet_zero() const {
        for (int b : mesh_->boundary_vertices())
            if (v_[b] != 0.0) return false;
        return true;
    }

    int argmax() const {
        return (int)(std::max_element(v_.begin(), v_.end()) - v_.begin());
    }
    double max_value() const { return *std::max_element(v_.begin(), v_.end()); }
    double min_value() const { return *std::min_element(v_.begin(), v_.end()); }

    /// Linear interpolation at p; throws DomainError when p is outside the mesh.
    double interpolate(Vec2 p) const {
        int t = mesh_->locate(p);
        if (t < 0) throw DomainError("interpolation point outside mesh");
        auto l = mesh_->barycentric(t, p);
        const auto& tr = mesh_->triangle(t);
        return l[0] * v_[tr[0]] + l[1] * v_[tr[1]] + l[2] * v_[tr[2]];
    }

private:
    const Mesh* mesh_ = nullptr;
    std::vector<double> v_;
};

}  // namespace tmx
