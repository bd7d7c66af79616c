#include "depthres/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "depthres/parallel.hpp"

namespace depthres {

double CsrMatrix::diagonal(int row) const {
    for (int k = row_offsets[row]; k < row_offsets[row + 1]; ++k)
        if (cols[k] == row) return vals[k];
    return 0.0;
}

void spmv(const CsrMatrix& a, const std::vector<double>& x, std::vector<double>& y) {
    if (static_cast<int>(x.size()) != a.n)
        throw ConfigError("spmv: vector length does not match matrix dimension");
    y.assign(a.n, 0.0);
    parallel_for(0, a.n, [&](int row) {
        double sum = 0.0;
        for (int k = a.row_offsets[row]; k < a.row_offsets[row + 1]; ++k)
            sum += a.vals[k] * x[a.cols[k]];
        y[row] = sum;
    });
}

std::vector<double> spmv(const CsrMatrix& a, const std::vector<double>& x) {
    std::vector<double> y;
    spmv(a, x, y);
    return y;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

PcgResult pcg_solve(const SparseSystem& sys, const std::vector<double>& x0,
                    double tol, int max_iters) {
    const CsrMatrix& a = sys.a;
    const int n = a.n;
    if (static_cast<int>(sys.rhs.size()) != n)
        throw ConfigError("pcg_solve: rhs length does not match matrix dimension");
    if (static_cast<int>(x0.size()) != n)
        throw ConfigError("pcg_solve: initial guess length does not match matrix dimension");
    if (!(tol > 0.0)) throw ConfigError("pcg_solve: tol must be > 0");

    PcgResult result;
    const double b_norm = norm2(sys.rhs);
    if (b_norm == 0.0) {
        result.x.assign(n, 0.0);
        result.converged = true;
        return result;
    }

    std::vector<double> inv_diag(n);
    for (int i = 0; i < n; ++i) {
        const double d = a.diagonal(i);
        if (!(d > 0.0) || !std::isfinite(d))
            throw NumericError("pcg_solve: non-positive diagonal at row " + std::to_string(i));
        inv_diag[i] = 1.0 / d;
    }

    std::vector<double> x = x0;
    std::vector<double> r(n), z(n), p(n), q(n);
    spmv(a, x, r);
    for (int i = 0; i < n; ++i) r[i] = sys.rhs[i] - r[i];

    std::vector<double> best_x = x;
    double best_res = norm2(r) / b_norm;

    if (best_res <= tol) {
        result.x = std::move(best_x);
        result.iterations = 0;
        result.relative_residual = best_res;
        result.converged = true;
        return result;
    }

    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rho = dot(r, z);

    int iter = 0;
    while (iter < max_iters) {
        ++iter;
        spmv(a, p, q);
        const double pq = dot(p, q);
        if (!std::isfinite(pq))
            throw NumericError("pcg_solve: diverged (non-finite curvature)");
        if (pq <= 0.0)
            throw NumericError("pcg_solve: matrix is not positive definite");
        const double alpha = rho / pq;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        const double res = norm2(r) / b_norm;
        if (!std::isfinite(res))
            throw NumericError("pcg_solve: diverged (non-finite residual)");
        if (res < best_res) {
            best_res = res;
            best_x = x;
        }
        if (res <= tol) break;
        for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        const double rho_new = dot(r, z);
        const double beta = rho_new / rho;
        rho = rho_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }

    // Report the exact residual of the returned iterate; the recurrence
    // residual can drift over many iterations.
    spmv(a, best_x, q);
    for (int i = 0; i < n; ++i) q[i] = sys.rhs[i] - q[i];
    const double exact_res = norm2(q) / b_norm;

    result.x = std::move(best_x);
    result.iterations = iter;
    result.relative_residual = exact_res;
    result.converged = exact_res <= tol;
    return result;
}

void check_spd_structure(const CsrMatrix& a) {
    if (a.n < 0 || static_cast<int>(a.row_offsets.size()) != a.n + 1)
        throw NumericError("csr: row offsets malformed");
    std::map<std::pair<int, int>, double> entries;
    for (int row = 0; row < a.n; ++row) {
        double diag = 0.0;
        double off_sum = 0.0;
        int prev_col = -1;
        for (int k = a.row_offsets[row]; k < a.row_offsets[row + 1]; ++k) {
            const int col = a.cols[k];
            const double v = a.vals[k];
            if (col < 0 || col >= a.n)
                throw NumericError("csr: column out of range in row " + std::to_string(row));
            if (col <= prev_col)
                throw NumericError("csr: columns not strictly increasing in row " +
                                   std::to_string(row));
            prev_col = col;
            if (!std::isfinite(v))
                throw NumericError("csr: non-finite value in row " + std::to_string(row));
            if (col == row)
                diag = v;
            else
                off_sum += std::abs(v);
            entries[{row, col}] = v;
        }
        if (!(diag > 0.0))
            throw NumericError("csr: non-positive diagonal at row " + std::to_string(row));
        if (!(diag > off_sum))
            throw NumericError("csr: row " + std::to_string(row) +
                               " is not strictly diagonally dominant");
    }
    for (const auto& [key, v] : entries) {
        const auto it = entries.find({key.second, key.first});
        if (it == entries.end() || it->second != v)
            throw NumericError("csr: entry (" + std::to_string(key.first) + "," +
                               std::to_string(key.second) + ") has no symmetric match");
    }
}

}  // namespace depthres
