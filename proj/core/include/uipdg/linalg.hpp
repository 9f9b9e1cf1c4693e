// Block-structured CSR matrices and the solver stack: preconditioned
// conjugate gradients for symmetric systems, BiCGStab for nonsymmetric ones,
// both with exact element-block-diagonal preconditioning, and a dense LU
// fallback for small systems.
#pragma once

#include <uipdg/types.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace uipdg {

/// CSR matrix whose rows and columns carry a natural block structure of
/// size `block_size` (the element space dimension for volume systems, k+1
/// for skeleton systems).
struct SparseMatrix {
  int n = 0;
  int block_size = 1;
  std::vector<int> row_ptr;
  std::vector<int> col_idx;
  std::vector<double> values;

  int nnz() const { return static_cast<int>(values.size()); }
  double max_abs() const;
};

/// Two-phase builder: declare the block couplings, finalize the pattern,
/// then accumulate dense blocks.  Accumulation order does not change the
/// stored pattern, so identical inputs give bitwise-identical matrices.
class BlockSparseBuilder {
public:
  BlockSparseBuilder(int num_blocks, int block_size);
  void add_coupling(int bi, int bj);
  void finalize_pattern();
  void add_block(int bi, int bj, const Eigen::MatrixXd& M);
  SparseMatrix take();

private:
  int nblocks_, bs_;
  bool finalized_ = false;
  std::vector<std::vector<int>> neighbors_;
  SparseMatrix mat_;
  int block_offset(int bi, int bj) const;
};

/// y = A x; deterministic for fixed input.
void spmv(const SparseMatrix& A, const Eigen::VectorXd& x, Eigen::VectorXd& y);

Eigen::MatrixXd to_dense(const SparseMatrix& A);

/// max |A - A'| over all entries (pattern asymmetry counts with the full
/// magnitude of the unmatched entry).
double max_asymmetry(const SparseMatrix& A);

/// Worker count honoring the UIPDG_THREADS environment variable.
int worker_count();

struct SolveOptions {
  double tol = 1e-10;  ///< relative residual target |b - Ax| <= tol |b|
  int max_iter = 20000;
  bool symmetric = false;     ///< selects conjugate gradients
  bool force_iterative = false; ///< skip the dense fallback (testing)
};

struct SolveReport {
  int n = 0;
  int iterations = 0;
  double residual = 0.0; ///< true relative residual of the returned x
  bool converged = false;
  std::string method;
};

/// Solves A x = b.  Systems of dimension <= 2000 use dense LU; larger
/// symmetric systems use preconditioned conjugate gradients and the rest
/// BiCGStab, both with exact inverses of the diagonal blocks as the
/// preconditioner.  Throws SolverError when the tolerance is not reached;
/// the report of the returned solution is stored in `report`.
Eigen::VectorXd solve(const SparseMatrix& A, const Eigen::VectorXd& b,
                      const SolveOptions& opts, SolveReport& report);

/// True iff A is symmetric positive definite: requires symmetry within
/// 1e-12 relative (throws SolverError otherwise) and all pivots of a dense
/// symmetric factorization positive.
bool spd_check(const SparseMatrix& A);

/// MatrixMarket coordinate dump (1-based, general), 17 significant digits.
void write_matrix_market(const SparseMatrix& A, std::ostream& out);
void write_matrix_market_file(const SparseMatrix& A, const std::string& path);

} // namespace uipdg
