#include "tmx/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tmx {

SparseOperator SparseOperator::from_triplets(int n, std::vector<std::tuple<int, int, double>> t) {
    std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    SparseOperator A;
    A.n_ = n;
    A.row_ptr_.assign(n + 1, 0);
    for (size_t k = 0; k < t.size();) {
        size_t j = k;
        double s = 0.0;
        while (j < t.size() && std::get<0>(t[j]) == std::get<0>(t[k]) &&
               std::get<1>(t[j]) == std::get<1>(t[k]))
            s += std::get<2>(t[j++]);
        A.col_.push_back(std::get<1>(t[k]));
        A.val_.push_back(s);
        A.row_ptr_[std::get<0>(t[k]) + 1]++;
        k = j;
    }
    std::partial_sum(A.row_ptr_.begin(), A.row_ptr_.end(), A.row_ptr_.begin());
    return A;
}

void SparseOperator::apply(std::span<const double> x, std::span<double> y) const {
    for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += val_[k] * x[col_[k]];
        y[i] = s;
    }
}

double SparseOperator::quadratic_form(std::span<const double> x) const {
    double s = 0.0, c = 0.0;
    for (int i = 0; i < n_; ++i) {
        double row = 0.0;
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) row += val_[k] * x[col_[k]];
        double term = x[i] * row - c;
        double t = s + term;
        c = (t - s) - term;
        s = t;
    }
    return s;
}

std::vector<double> SparseOperator::diagonal() const {
    std::vector<double> d(n_, 0.0);
    for (int i = 0; i < n_; ++i)
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
            if (col_[k] == i) d[i] = val_[k];
    return d;
}

std::vector<double> SparseOperator::row_sums() const {
    std::vector<double> r(n_, 0.0);
    for (int i = 0; i < n_; ++i)
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) r[i] += val_[k];
    return r;
}

double SparseOperator::symmetry_defect() const {
    double max_abs = 0.0;
    for (double v : val_) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0.0) return 0.0;
    double worst = 0.0;
    for (int i = 0; i < n_; ++i) {
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            int j = col_[k];
            double aji = 0.0;
            for (int kk = row_ptr_[j]; kk < row_ptr_[j + 1]; ++kk)
                if (col_[kk] == i) aji = val_[kk];
            worst = std::max(worst, std::abs(val_[k] - aji));
        }
    }
    return worst / max_abs;
}

SparseOperator SparseOperator::restrict_to(const std::vector<int>& keep) const {
    std::vector<int> where(n_, -1);
    for (size_t i = 0; i < keep.size(); ++i) where[keep[i]] = (int)i;
    std::vector<std::tuple<int, int, double>> t;
    for (size_t i = 0; i < keep.size(); ++i) {
        int row = keep[i];
        for (int k = row_ptr_[row]; k < row_ptr_[row + 1]; ++k) {
            int j = where[col_[k]];
            if (j >= 0) t.emplace_back((int)i, j, val_[k]);
        }
    }
    return from_triplets((int)keep.size(), std::move(t));
}

CgResult pcg(const SparseOperator& A, std::span<const double> b, std::vector<double>& x,
             const CgOptions& opts) {
    const int n = A.size();
    const int max_iters = opts.max_iters > 0 ? opts.max_iters : 50 * n;
    if ((int)x.size() != n) x.assign(n, 0.0);

    std::vector<double> diag = A.diagonal();
    for (double& d : diag) d = (d > 0.0) ? 1.0 / d : 1.0;

    std::vector<double> r(n), z(n), p(n), Ap(n);
    A.apply(x, r);
    double bnorm = 0.0;
    for (int i = 0; i < n; ++i) {
        r[i] = b[i] - r[i];
        bnorm += b[i] * b[i];
    }
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0.0) {
        x.assign(n, 0.0);
        return {0, 0.0, true};
    }

    auto rnorm = [&] {
        double s = 0.0;
        for (double v : r) s += v * v;
        return std::sqrt(s);
    };

    std::vector<double> history;
    double res = rnorm() / bnorm;
    if (res <= opts.rel_tol) return {0, res, true};

    for (int i = 0; i < n; ++i) z[i] = diag[i] * r[i];
    p = z;
    double rz = 0.0;
    for (int i = 0; i < n; ++i) rz += r[i] * z[i];

    for (int it = 1; it <= max_iters; ++it) {
        A.apply(p, Ap);
        double pAp = 0.0;
        for (int i = 0; i < n; ++i) pAp += p[i] * Ap[i];
        if (pAp <= 0.0) throw SolveError("pcg: operator not positive definite", history);
        double alpha = rz / pAp;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        res = rnorm() / bnorm;
        history.push_back(res);
        if (res <= opts.rel_tol) return {it, res, true};
        for (int i = 0; i < n; ++i) z[i] = diag[i] * r[i];
        double rz_new = 0.0;
        for (int i = 0; i < n; ++i) rz_new += r[i] * z[i];
        double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw SolveError("pcg: no convergence after " + std::to_string(max_iters) +
                         " iterations (residual " + std::to_string(res) + ")",
                     history);
}

}  // namespace tmx
