#include <uipdg/linalg.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

namespace uipdg {

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values)
    m = std::max(m, std::abs(v));
  return m;
}

BlockSparseBuilder::BlockSparseBuilder(int num_blocks, int block_size)
    : nblocks_(num_blocks), bs_(block_size) {
  neighbors_.resize(num_blocks);
}

void BlockSparseBuilder::add_coupling(int bi, int bj) {
  neighbors_[bi].push_back(bj);
}

void BlockSparseBuilder::finalize_pattern() {
  for (auto& nb : neighbors_) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  mat_.n = nblocks_ * bs_;
  mat_.block_size = bs_;
  mat_.row_ptr.assign(mat_.n + 1, 0);
  for (int bi = 0; bi < nblocks_; ++bi) {
    const int row_nnz = static_cast<int>(neighbors_[bi].size()) * bs_;
    for (int i = 0; i < bs_; ++i)
      mat_.row_ptr[bi * bs_ + i + 1] = mat_.row_ptr[bi * bs_ + i] + row_nnz;
  }
  mat_.col_idx.resize(mat_.row_ptr.back());
  mat_.values.assign(mat_.row_ptr.back(), 0.0);
  for (int bi = 0; bi < nblocks_; ++bi) {
    for (int i = 0; i < bs_; ++i) {
      int pos = mat_.row_ptr[bi * bs_ + i];
      for (int bj : neighbors_[bi])
        for (int j = 0; j < bs_; ++j)
          mat_.col_idx[pos++] = bj * bs_ + j;
    }
  }
  finalized_ = true;
}

int BlockSparseBuilder::block_offset(int bi, int bj) const {
  const auto& nb = neighbors_[bi];
  const auto it = std::lower_bound(nb.begin(), nb.end(), bj);
  if (it == nb.end() || *it != bj)
    throw Error("block coupling (" + std::to_string(bi) + ", " +
                std::to_string(bj) + ") was not declared");
  return static_cast<int>(it - nb.begin());
}

void BlockSparseBuilder::add_block(int bi, int bj, const Eigen::MatrixXd& M) {
  if (!finalized_)
    throw Error("pattern not finalized before accumulation");
  const int off = block_offset(bi, bj);
  for (int i = 0; i < bs_; ++i) {
    const int base = mat_.row_ptr[bi * bs_ + i] + off * bs_;
    for (int j = 0; j < bs_; ++j)
      mat_.values[base + j] += M(i, j);
  }
}

SparseMatrix BlockSparseBuilder::take() { return std::move(mat_); }

int worker_count() {
  if (const char* env = std::getenv("UIPDG_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1)
      return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

void spmv_rows(const SparseMatrix& A, const Eigen::VectorXd& x,
               Eigen::VectorXd& y, int r0, int r1) {
  for (int r = r0; r < r1; ++r) {
    double s = 0.0;
    for (int p = A.row_ptr[r]; p < A.row_ptr[r + 1]; ++p)
      s += A.values[p] * x[A.col_idx[p]];
    y[r] = s;
  }
}

} // namespace

void spmv(const SparseMatrix& A, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
  y.resize(A.n);
  const int workers = std::min(worker_count(), std::max(1, A.n / 4096));
  if (workers <= 1) {
    spmv_rows(A, x, y, 0, A.n);
    return;
  }
  // contiguous row chunks: each row is written by exactly one worker, so the
  // result is identical to the serial loop
  std::vector<std::thread> pool;
  const int chunk = (A.n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int r0 = w * chunk, r1 = std::min(A.n, r0 + chunk);
    if (r0 < r1)
      pool.emplace_back(spmv_rows, std::cref(A), std::cref(x), std::ref(y), r0,
                        r1);
  }
  for (auto& t : pool)
    t.join();
}

Eigen::MatrixXd to_dense(const SparseMatrix& A) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(A.n, A.n);
  for (int r = 0; r < A.n; ++r)
    for (int p = A.row_ptr[r]; p < A.row_ptr[r + 1]; ++p)
      D(r, A.col_idx[p]) += A.values[p];
  return D;
}

double max_asymmetry(const SparseMatrix& A) {
  // transpose pattern walk; pattern is block-symmetric by construction but
  // the check does not rely on that
  std::vector<int> next(A.row_ptr.begin(), A.row_ptr.end() - 1);
  double worst = 0.0;
  for (int r = 0; r < A.n; ++r) {
    for (int p = A.row_ptr[r]; p < A.row_ptr[r + 1]; ++p) {
      const int c = A.col_idx[p];
      // find A(c, r) by scanning row c once (columns ascend)
      double at = 0.0;
      int q = next[c];
      while (q < A.row_ptr[c + 1] && A.col_idx[q] < r)
        ++q;
      next[c] = q;
      if (q < A.row_ptr[c + 1] && A.col_idx[q] == r)
        at = A.values[q];
      worst = std::max(worst, std::abs(A.values[p] - at));
    }
  }
  return worst;
}

namespace {

/// Exact inverses of the diagonal blocks.
class BlockJacobi {
public:
  explicit BlockJacobi(const SparseMatrix& A) : bs_(A.block_size), n_(A.n) {
    const int nblocks = n_ / bs_;
    inv_.reserve(nblocks);
    Eigen::MatrixXd D(bs_, bs_);
    for (int b = 0; b < nblocks; ++b) {
      D.setZero();
      for (int i = 0; i < bs_; ++i) {
        const int r = b * bs_ + i;
        for (int p = A.row_ptr[r]; p < A.row_ptr[r + 1]; ++p) {
          const int c = A.col_idx[p] - b * bs_;
          if (c >= 0 && c < bs_)
            D(i, c) = A.values[p];
        }
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(D);
      if (!lu.isInvertible())
        throw SolverError("singular diagonal block " + std::to_string(b) +
                          " in preconditioner");
      inv_.push_back(lu.inverse());
    }
  }

  void apply(const Eigen::VectorXd& r, Eigen::VectorXd& z) const {
    z.resize(n_);
    const int nblocks = n_ / bs_;
    for (int b = 0; b < nblocks; ++b)
      z.segment(b * bs_, bs_) = inv_[b] * r.segment(b * bs_, bs_);
  }

private:
  int bs_, n_;
  std::vector<Eigen::MatrixXd> inv_;
};

std::string format_residual(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

double true_residual(const SparseMatrix& A, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& b, double bnorm) {
  Eigen::VectorXd r(A.n);
  spmv(A, x, r);
  r = b - r;
  return r.norm() / bnorm;
}

Eigen::VectorXd pcg(const SparseMatrix& A, const Eigen::VectorXd& b,
                    const SolveOptions& opts, SolveReport& report) {
  const double bnorm = b.norm();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(A.n);
  if (bnorm == 0.0) {
    report.converged = true;
    return x;
  }
  const BlockJacobi prec(A);
  Eigen::VectorXd r = b, z(A.n), p(A.n), q(A.n);
  prec.apply(r, z);
  p = z;
  double rho = r.dot(z);
  for (int it = 1; it <= opts.max_iter; ++it) {
    spmv(A, p, q);
    const double pq = p.dot(q);
    if (pq <= 0.0)
      throw SolverError("conjugate-gradient breakdown at iteration " +
                        std::to_string(it) +
                        ": direction of nonpositive curvature (matrix not "
                        "positive definite?)");
    const double alpha = rho / pq;
    x += alpha * p;
    r -= alpha * q;
    if (r.norm() <= opts.tol * bnorm) {
      // recurrence residual reached the target; confirm with the true one
      const double res = true_residual(A, x, b, bnorm);
      if (res <= opts.tol) {
        report.iterations = it;
        report.residual = res;
        report.converged = true;
        return x;
      }
      spmv(A, x, r);
      r = b - r;
    }
    prec.apply(r, z);
    const double rho_next = r.dot(z);
    p = z + (rho_next / rho) * p;
    rho = rho_next;
  }
  report.iterations = opts.max_iter;
  report.residual = true_residual(A, x, b, bnorm);
  throw SolverError("conjugate gradients did not converge in " +
                    std::to_string(opts.max_iter) +
                    " iterations (relative residual " +
                    format_residual(report.residual) + ")");
}

Eigen::VectorXd bicgstab(const SparseMatrix& A, const Eigen::VectorXd& b,
                         const SolveOptions& opts, SolveReport& report) {
  const double bnorm = b.norm();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(A.n);
  if (bnorm == 0.0) {
    report.converged = true;
    return x;
  }
  const BlockJacobi prec(A);
  Eigen::VectorXd r = b;
  Eigen::VectorXd rhat = r;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(A.n), v = p;
  Eigen::VectorXd phat(A.n), shat(A.n), s(A.n), t(A.n);
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  int restarts = 0;
  // Best iterate snapshotting.  The recurrence can run away (the overflow
  // guard below) and pollute x, so a rollback point is kept continuously:
  // x_snap tracks the smallest recurrence residual since the last restart,
  // which is honest within a stable stretch.  The zero vector (relative
  // residual 1) is the initial baseline, so a polluted iterate can never
  // become the restart point.
  double snap_norm = bnorm;
  Eigen::VectorXd x_snap = x;
  double last_restart_res = std::numeric_limits<double>::infinity();
  // Full restart: resume from the better of the current and snapshot
  // iterates with a fresh residual and shadow vector and cleared directions.
  // The recurrence tolerates gradual biorthogonality decay while it
  // converges, but once the residual is replaced the old shadow vector is
  // noise, so every replacement must come through here.
  const auto restart = [&](int it) {
    if (++restarts > 50)
      throw SolverError("BiCGStab breakdown at iteration " +
                        std::to_string(it) + " after 50 restarts");
    spmv(A, x, r);
    r = b - r;
    double res = r.norm() / bnorm;
    spmv(A, x_snap, s);
    s = b - s;
    const double res_snap = s.norm() / bnorm;
    // NaN-poisoned iterates fail the comparison and lose to the snapshot
    if (!(res < res_snap)) {
      x = x_snap;
      r = s;
      res = res_snap;
    }
    rhat = r;
    // a restart that regained nothing would retrace the same path; skewing
    // the shadow vector deterministically breaks such cycles
    if (!(res < last_restart_res))
      for (Eigen::Index i = 0; i < rhat.size(); ++i)
        rhat[i] *= 1.0 + 1e-4 * static_cast<double>((i * 2654435761u) % 17);
    last_restart_res = res;
    snap_norm = r.norm();
    x_snap = x;
    p.setZero();
    v.setZero();
    rho = alpha = omega = 1.0;
  };
  for (int it = 1; it <= opts.max_iter; ++it) {
    const double rho_next = rhat.dot(r);
    if (std::abs(rho_next) < 1e-300 || std::abs(omega) < 1e-300 ||
        !(r.norm() <= 1e8 * bnorm)) {
      restart(it);
      continue;
    }
    const double beta = (rho_next / rho) * (alpha / omega);
    p = r + beta * (p - omega * v);
    prec.apply(p, phat);
    spmv(A, phat, v);
    const double rv = rhat.dot(v);
    if (std::abs(rv) < 1e-300) {
      restart(it);
      continue;
    }
    alpha = rho_next / rv;
    s = r - alpha * v;
    if (s.norm() <= opts.tol * bnorm) {
      x += alpha * phat;
      const double res = true_residual(A, x, b, bnorm);
      if (res <= opts.tol) {
        report.iterations = it;
        report.residual = res;
        report.converged = true;
        return x;
      }
      restart(it);
      continue;
    }
    prec.apply(s, shat);
    spmv(A, shat, t);
    const double tt = t.dot(t);
    omega = tt > 0.0 ? t.dot(s) / tt : 0.0;
    x += alpha * phat + omega * shat;
    r = s - omega * t;
    rho = rho_next;
    const double rnorm = r.norm();
    if (rnorm < snap_norm) {
      snap_norm = rnorm;
      x_snap = x;
    }
    if (rnorm <= opts.tol * bnorm) {
      const double res = true_residual(A, x, b, bnorm);
      if (res <= opts.tol) {
        report.iterations = it;
        report.residual = res;
        report.converged = true;
        return x;
      }
      restart(it);
    }
  }
  report.iterations = opts.max_iter;
  report.residual = std::min(true_residual(A, x, b, bnorm),
                             true_residual(A, x_snap, b, bnorm));
  throw SolverError("BiCGStab did not converge in " +
                    std::to_string(opts.max_iter) +
                    " iterations (relative residual " +
                    format_residual(report.residual) + ")");
}

} // namespace

Eigen::VectorXd solve(const SparseMatrix& A, const Eigen::VectorXd& b,
                      const SolveOptions& opts, SolveReport& report) {
  report = SolveReport{};
  report.n = A.n;
  if (A.n != b.size())
    throw SolverError("dimension mismatch: matrix " + std::to_string(A.n) +
                      ", rhs " + std::to_string(b.size()));
  if (A.n <= 2000 && !opts.force_iterative) {
    report.method = "dense_lu";
    const Eigen::MatrixXd D = to_dense(A);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(D);
    Eigen::VectorXd x = lu.solve(b);
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
      report.converged = true;
      return x;
    }
    double res = (b - D * x).norm() / bnorm;
    if (res > opts.tol) {
      // one step of iterative refinement covers mildly ill-conditioned cases
      x += lu.solve(b - D * x);
      res = (b - D * x).norm() / bnorm;
    }
    report.residual = res;
    report.converged = res <= opts.tol;
    if (!report.converged)
      throw SolverError("dense solve left relative residual " +
                        format_residual(res));
    return x;
  }
  report.method = opts.symmetric ? "pcg_block_jacobi" : "bicgstab_block_jacobi";
  return opts.symmetric ? pcg(A, b, opts, report)
                        : bicgstab(A, b, opts, report);
}

bool spd_check(const SparseMatrix& A) {
  const double scale = A.max_abs();
  if (max_asymmetry(A) > 1e-12 * (scale > 0.0 ? scale : 1.0))
    throw SolverError("spd_check requires a symmetric matrix");
  const Eigen::MatrixXd D = to_dense(A);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(D);
  if (ldlt.info() != Eigen::Success)
    return false;
  return ldlt.vectorD().minCoeff() > 0.0;
}

void write_matrix_market(const SparseMatrix& A, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.n << ' ' << A.n << ' ' << A.nnz() << '\n';
  char buf[64];
  for (int r = 0; r < A.n; ++r)
    for (int p = A.row_ptr[r]; p < A.row_ptr[r + 1]; ++p) {
      std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", r + 1,
                    A.col_idx[p] + 1, A.values[p]);
      out << buf;
    }
}

void write_matrix_market_file(const SparseMatrix& A, const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw Error("cannot open '" + path + "' for writing");
  write_matrix_market(A, out);
}

} // namespace uipdg
