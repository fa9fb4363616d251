#pragma once

#include <span>
#include <tuple>
#include <vector>

#include "tmx/errors.hpp"

namespace tmx {

/// Symmetric sparse matrix in CSR form. Immutable after construction.
class SparseOperator {
public:
    static SparseOperator from_triplets(int n, std::vector<std::tuple<int, int, double>> triplets);

    int size() const { return n_; }
    void apply(std::span<const double> x, std::span<double> y) const;
    double quadratic_form(std::span<const double> x) const;
    std::vector<double> diagonal() const;
    std::vector<double> row_sums() const;

    /// max_{ij} |a_ij - a_ji| / max |a_ij|; exercised by the symmetry invariant.
    double symmetry_defect() const;

    /// Principal submatrix on the kept indices (in their given order).
    SparseOperator restrict_to(const std::vector<int>& keep) const;

    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& cols() const { return col_; }
    const std::vector<double>& vals() const { return val_; }

private:
    int n_ = 0;
    std::vector<int> row_ptr_, col_;
    std::vector<double> val_;
};

struct CgOptions {
    double rel_tol = 1e-10;
    int max_iters = -1;  // -1 means 50 * n
};

struct CgResult {
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

/// Solver non-convergence; carries the residual history for diagnostics.
struct SolveError : Error {
    SolveError(const std::string& msg, std::vector<double> hist)
        : Error(msg), residual_history(std::move(hist)) {}
    std::vector<double> residual_history;
};

/// Preconditioned conjugate gradients with diagonal (Jacobi) preconditioning.
/// x is both the warm start and the solution. Throws SolveError when the
/// relative residual fails to reach rel_tol within max_iters.
CgResult pcg(const SparseOperator& A, std::span<const double> b, std::vector<double>& x,
             const CgOptions& opts = {});

}  // namespace tmx
