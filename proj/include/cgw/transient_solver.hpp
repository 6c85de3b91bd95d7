#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cgw {

/// LU factorization of I - S for a substochastic matrix S over n transient
/// states, with one absorbing "exit" per row.
///
/// The caller supplies the off-diagonal entries of S and, per row, the exit
/// mass (probability of leaving the transient set). The diagonal of I - S is
/// rebuilt as exit + sum of off-diagonals at every elimination step, so no
/// step subtracts two positive numbers. This keeps full relative accuracy
/// when a row of S is within 1e-9 of stochastic, where forming 1 - S_ii
/// directly would lose most significant digits.
///
/// No pivoting: pivots stay positive as long as every state can reach an
/// exit, and every multiplier is non-negative. Throws SingularSystem when a
/// pivot vanishes.
class TransientSolver {
 public:
  /// `transitions` is n*n row-major; its diagonal is ignored.
  TransientSolver(std::span<const double> transitions, std::span<const double> exit_mass,
                  std::size_t n);

  /// Solves (I - S) x = rhs. Non-negative right-hand sides give
  /// non-negative solutions computed without cancellation.
  std::vector<double> solve(std::span<const double> rhs) const;

  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  std::vector<double> pivot_;   // diagonal of U
  std::vector<double> upper_;   // -U off-diagonal, row-major, j > i
  std::vector<double> lower_;   // -L off-diagonal, row-major, j < i
};

}  // namespace cgw
