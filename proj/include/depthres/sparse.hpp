// Compressed-row sparse matrices and a Jacobi-preconditioned conjugate
// gradient solver for the symmetric positive-definite systems produced by
// the reweighted solver.

#ifndef DEPTHRES_SPARSE_HPP
#define DEPTHRES_SPARSE_HPP

#include <vector>

#include "depthres/core.hpp"

namespace depthres {

/// Sparse n x n matrix in CSR form. Column indices are strictly increasing
/// within each row; duplicate contributions are summed during assembly.
struct CsrMatrix {
    int n = 0;
    std::vector<int> row_offsets;  // n + 1 entries
    std::vector<int> cols;
    std::vector<double> vals;

    double diagonal(int row) const;
};

/// One linear system A x = b with A symmetric positive definite.
struct SparseSystem {
    CsrMatrix a;
    std::vector<double> rhs;
};

/// y = A x. Throws ConfigError on dimension mismatch.
void spmv(const CsrMatrix& a, const std::vector<double>& x, std::vector<double>& y);

std::vector<double> spmv(const CsrMatrix& a, const std::vector<double>& x);

struct PcgResult {
    std::vector<double> x;
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Jacobi-preconditioned CG. Returns the iterate with the smallest true
/// relative residual ||b - A x|| / ||b||; converged is set when it reached
/// tol within max_iters. ||b|| = 0 short-circuits to the zero vector.
/// Throws NumericError when non-finite values appear or the matrix is not
/// positive definite along the search directions.
PcgResult pcg_solve(const SparseSystem& sys, const std::vector<double>& x0,
                    double tol, int max_iters);

/// Structural checks used by tests: symmetry of stored entries, strictly
/// increasing columns, finite values, positive diagonal with strict
/// diagonal dominance. Throws NumericError describing the first violation.
void check_spd_structure(const CsrMatrix& a);

}  // namespace depthres

#endif  // DEPTHRES_SPARSE_HPP
