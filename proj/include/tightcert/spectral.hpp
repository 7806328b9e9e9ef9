#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "tightcert/triangle_mesh.hpp"

namespace tightcert::spectral {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

class DegenerateTriangle : public std::runtime_error {
public:
  DegenerateTriangle(int face, const std::string& what) : std::runtime_error(what), face_(face) {}
  int face() const noexcept { return face_; }

private:
  int face_;
};

/// Cotangent stiffness S (positive semidefinite, S * 1 = 0), consistent
/// piecewise-linear mass M and the lumped diagonal of M.
struct OperatorPair {
  SparseMatrix stiffness;
  SparseMatrix mass;
  Vector lumped_mass;

  int size() const { return static_cast<int>(lumped_mass.size()); }
  double total_area() const { return lumped_mass.sum(); }
};

OperatorPair assemble(const surface::TriangleMesh& mesh);

/// Cotangent weight of edge `e`: half the sum of cotangents of the two
/// opposite angles.
double cotangent_weight(const surface::TriangleMesh& mesh, int e);

struct EigenPair {
  double lambda = 0.0;
  Vector f;              // vertex values, M-normalised
  double residual = 0.0; // ||S f - lambda M f||_2
};

struct SolverOptions {
  double tol = 1e-8;
  std::uint64_t seed = 1;
  int max_iterations = 500;
  int extra_block = 5;
};

class NonConvergence : public std::runtime_error {
public:
  NonConvergence(const std::string& what, std::vector<double> best_residuals, int iterations)
      : std::runtime_error(what), residuals_(std::move(best_residuals)), iterations_(iterations) {}
  const std::vector<double>& best_residuals() const noexcept { return residuals_; }
  int iterations() const noexcept { return iterations_; }

private:
  std::vector<double> residuals_;
  int iterations_;
};

/// Smallest `k` eigenpairs of S f = lambda M f in nondecreasing order.
///
/// The constant mode is deflated explicitly and returned as the first pair.
/// The remaining pairs come from a locally optimal block preconditioned
/// conjugate gradient iteration (block size k + extra_block) with Jacobi
/// preconditioning on S + sigma M. A pair is converged once
/// ||S f - lambda M f||_2 <= tol * max(1, lambda) with ||f||_M = 1.
/// Throws NonConvergence after max_iterations block steps.
std::vector<EigenPair> solve_lowest(const OperatorPair& ops, int k, const SolverOptions& options = {});

/// Report of how many block steps the last solve used (diagnostics only).
struct SolveStats {
  int iterations = 0;
};
std::vector<EigenPair> solve_lowest(const OperatorPair& ops, int k, const SolverOptions& options,
                                    SolveStats& stats);

double rayleigh_quotient(const OperatorPair& ops, const Vector& f);
double residual_norm(const OperatorPair& ops, double lambda, const Vector& f);
double mass_norm(const OperatorPair& ops, const Vector& f);

/// Groups of consecutive eigenpairs whose relative gap is below `rel_gap`
/// (gap / max(1, lambda)). Each entry is [first, last] inclusive.
std::vector<std::pair<int, int>> multiplicity_clusters(const std::vector<EigenPair>& pairs,
                                                       double rel_gap = 1e-3);

} // namespace tightcert::spectral
