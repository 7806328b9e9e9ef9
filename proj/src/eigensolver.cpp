#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "tightcert/spectral.hpp"

namespace tightcert::spectral {

namespace {

using Matrix = Eigen::MatrixXd;

// Removes the constant component in the M inner product. Rows of M sum to
// the lumped mass, so <1, x>_M = lumped^T x.
void deflate_constant(Matrix& x, const Vector& lumped, double area) {
  if (x.cols() == 0)
    return;
  const Eigen::RowVectorXd coeff = (lumped.transpose() * x) / area;
  x.rowwise() -= coeff;
}

// Replaces the columns of `z` by an M-orthonormal basis of their span,
// dropping directions whose Gram eigenvalue falls below `drop` relative to
// the largest. Two passes recover orthogonality lost in the first.
void orthonormalize(Matrix& z, const SparseMatrix& mass, double drop = 1e-12) {
  for (int pass = 0; pass < 2 && z.cols() > 0; ++pass) {
    Matrix gram = z.transpose() * (mass * z);
    gram = 0.5 * (gram + gram.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    const Vector& ev = es.eigenvalues();
    const double top = ev.maxCoeff();
    if (!(top > 0.0)) {
      z.resize(z.rows(), 0);
      return;
    }
    int keep = 0;
    for (int i = 0; i < ev.size(); ++i)
      keep += ev[i] > drop * top ? 1 : 0;
    Matrix basis(z.cols(), keep);
    int col = 0;
    for (int i = 0; i < ev.size(); ++i) {
      if (ev[i] > drop * top)
        basis.col(col++) = es.eigenvectors().col(i) / std::sqrt(ev[i]);
    }
    z = (z * basis).eval();
  }
}

// z -= x (x^T M z) for M-orthonormal x, applied twice.
void orthogonalize_against(Matrix& z, const Matrix& x, const Matrix& mx) {
  if (z.cols() == 0 || x.cols() == 0)
    return;
  for (int pass = 0; pass < 2; ++pass)
    z -= x * (mx.transpose() * z);
}

void normalize_sign(Vector& f) {
  Eigen::Index arg = 0;
  f.cwiseAbs().maxCoeff(&arg);
  if (f[arg] < 0.0)
    f = -f;
}

} // namespace

double mass_norm(const OperatorPair& ops, const Vector& f) {
  return std::sqrt(std::max(0.0, f.dot(ops.mass * f)));
}

double rayleigh_quotient(const OperatorPair& ops, const Vector& f) {
  const double denom = f.dot(ops.mass * f);
  if (!(denom > 0.0))
    throw std::invalid_argument("rayleigh_quotient: zero vector");
  return f.dot(ops.stiffness * f) / denom;
}

double residual_norm(const OperatorPair& ops, double lambda, const Vector& f) {
  if (f.squaredNorm() == 0.0)
    throw std::invalid_argument("residual_norm: zero vector");
  return (ops.stiffness * f - lambda * (ops.mass * f)).norm();
}

std::vector<std::pair<int, int>> multiplicity_clusters(const std::vector<EigenPair>& pairs,
                                                       double rel_gap) {
  std::vector<std::pair<int, int>> out;
  const int n = static_cast<int>(pairs.size());
  int start = 0;
  for (int i = 1; i <= n; ++i) {
    const bool split =
        i == n || (pairs[i].lambda - pairs[i - 1].lambda) >
                      rel_gap * std::max(1.0, std::abs(pairs[i].lambda));
    if (split) {
      out.emplace_back(start, i - 1);
      start = i;
    }
  }
  return out;
}

std::vector<EigenPair> solve_lowest(const OperatorPair& ops, int k, const SolverOptions& options) {
  SolveStats stats;
  return solve_lowest(ops, k, options, stats);
}

std::vector<EigenPair> solve_lowest(const OperatorPair& ops, int k, const SolverOptions& options,
                                    SolveStats& stats) {
  const int n = ops.size();
  if (k < 1)
    throw std::invalid_argument("solve_lowest: k must be >= 1");
  if (4 * k >= n) {
    std::ostringstream os;
    os << "solve_lowest: k = " << k << " requires more than " << 4 * k << " vertices (have " << n
       << ")";
    throw std::invalid_argument(os.str());
  }
  if (!(options.tol > 0.0) || options.max_iterations < 1)
    throw std::invalid_argument("solve_lowest: tol must be positive and max_iterations >= 1");

  const double area = ops.total_area();
  std::vector<EigenPair> result;
  {
    EigenPair constant;
    constant.lambda = 0.0;
    constant.f = Vector::Constant(n, 1.0 / std::sqrt(area));
    constant.residual = residual_norm(ops, 0.0, constant.f);
    result.push_back(std::move(constant));
  }
  stats.iterations = 0;
  const int wanted = k - 1;
  if (wanted == 0)
    return result;

  const SparseMatrix& a = ops.stiffness;
  const SparseMatrix& b = ops.mass;
  const int block = std::min(k + options.extra_block, n - 1);

  Vector precond(n);
  {
    const Vector ds = a.diagonal();
    const Vector dm = b.diagonal();
    const double sigma = 1e-3 * ds.mean() / dm.mean();
    for (int i = 0; i < n; ++i)
      precond[i] = 1.0 / (std::abs(ds[i]) + sigma * dm[i]);
  }

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(n, block);
  for (int j = 0; j < block; ++j)
    for (int i = 0; i < n; ++i)
      x(i, j) = normal(rng);
  deflate_constant(x, ops.lumped_mass, area);
  orthonormalize(x, b);
  if (x.cols() < block)
    throw std::runtime_error("solve_lowest: initial block is rank deficient");

  Matrix ax = a * x, bx = b * x;
  {
    Matrix h = x.transpose() * ax;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    x = (x * es.eigenvectors()).eval();
    ax = a * x;
    bx = b * x;
  }

  Matrix p(n, 0);
  Vector theta(block);
  std::vector<double> residuals(wanted, std::numeric_limits<double>::infinity());
  std::vector<double> best(wanted, std::numeric_limits<double>::infinity());
  bool done = false;
  int it = 0;
  for (; it <= options.max_iterations; ++it) {
    for (int j = 0; j < block; ++j)
      theta[j] = x.col(j).dot(ax.col(j));
    Matrix r = ax - bx * theta.asDiagonal();

    std::vector<int> active;
    bool all = true;
    for (int j = 0; j < block; ++j) {
      if (j < wanted) {
        residuals[j] = r.col(j).norm();
        best[j] = std::min(best[j], residuals[j]);
        if (residuals[j] <= options.tol * std::max(1.0, theta[j]))
          continue;
        all = false;
      }
      active.push_back(j);
    }
    if (all) {
      done = true;
      break;
    }
    if (it == options.max_iterations)
      break;

    Matrix w(n, static_cast<Eigen::Index>(active.size()));
    for (std::size_t c = 0; c < active.size(); ++c)
      w.col(static_cast<Eigen::Index>(c)) = precond.cwiseProduct(r.col(active[c]));
    deflate_constant(w, ops.lumped_mass, area);
    orthogonalize_against(w, x, bx);
    orthonormalize(w, b);

    if (p.cols() > 0) {
      deflate_constant(p, ops.lumped_mass, area);
      orthogonalize_against(p, x, bx);
      if (w.cols() > 0)
        orthogonalize_against(p, w, b * w);
      orthonormalize(p, b);
    }

    const Eigen::Index nx = x.cols(), nw = w.cols(), np = p.cols();
    Matrix z(n, nx + nw + np);
    z << x, w, p;
    const Matrix az = a * z;
    const Matrix bz = b * z;
    Matrix h = z.transpose() * az;
    Matrix g = z.transpose() * bz;
    h = 0.5 * (h + h.transpose()).eval();
    g = 0.5 * (g + g.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(h, g);
    if (es.info() != Eigen::Success)
      throw NonConvergence("solve_lowest: Rayleigh-Ritz step failed", best, it);
    const Matrix c = es.eigenvectors().leftCols(block);

    // Search directions: the W and P parts of the new Ritz vectors.
    Matrix new_p(n, static_cast<Eigen::Index>(active.size()));
    for (std::size_t q = 0; q < active.size(); ++q) {
      const int j = active[q];
      new_p.col(static_cast<Eigen::Index>(q)) =
          z.rightCols(nw + np) * c.col(j).tail(nw + np);
    }
    x = z * c;
    ax = az * c;
    bx = bz * c;
    p = std::move(new_p);

    // Refresh products periodically to bound drift.
    if (it % 20 == 19) {
      orthonormalize(x, b);
      Matrix hx = x.transpose() * (a * x);
      hx = 0.5 * (hx + hx.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Matrix> ex(hx);
      x = (x * ex.eigenvectors()).eval();
      ax = a * x;
      bx = b * x;
    }
  }
  stats.iterations = it;

  if (!done) {
    std::ostringstream os;
    os << "solve_lowest: no convergence after " << options.max_iterations
       << " block iterations (worst best residual "
       << *std::max_element(best.begin(), best.end()) << ", tol " << options.tol << ")";
    throw NonConvergence(os.str(), best, it);
  }

  for (int j = 0; j < wanted; ++j) {
    EigenPair pair;
    pair.f = x.col(j);
    normalize_sign(pair.f);
    pair.lambda = rayleigh_quotient(ops, pair.f);
    pair.residual = residual_norm(ops, pair.lambda, pair.f);
    result.push_back(std::move(pair));
  }
  std::stable_sort(result.begin() + 1, result.end(),
                   [](const EigenPair& l, const EigenPair& r) { return l.lambda < r.lambda; });
  return result;
}

} // namespace tightcert::spectral
