#include "cgw/transient_solver.hpp"

#include "cgw/error.hpp"

namespace cgw {

TransientSolver::TransientSolver(std::span<const double> transitions,
                                 std::span<const double> exit_mass, std::size_t n)
    : n_(n), pivot_(n, 0.0), upper_(n * n, 0.0), lower_(n * n, 0.0) {
  if (transitions.size() != n * n || exit_mass.size() != n)
    throw Error(ErrorCode::InvalidInput, "transient system dimensions disagree");

  // Working copy of the off-diagonal masses s_ij >= 0, so that
  // (I - S)_ij = -s_ij off the diagonal, plus the exit masses r_i.
  std::vector<double> s(transitions.begin(), transitions.end());
  std::vector<double> exit(exit_mass.begin(), exit_mass.end());
  for (std::size_t i = 0; i < n; ++i) s[i * n + i] = 0.0;

  for (std::size_t k = 0; k < n; ++k) {
    double diag = exit[k];
    for (std::size_t j = k + 1; j < n; ++j) diag += s[k * n + j];
    if (!(diag > 0.0))
      throw Error(ErrorCode::SingularSystem, "state " + std::to_string(k) + " cannot exit");
    pivot_[k] = diag;
    for (std::size_t j = k + 1; j < n; ++j) upper_[k * n + j] = s[k * n + j];

    for (std::size_t i = k + 1; i < n; ++i) {
      const double sik = s[i * n + k];
      if (sik == 0.0) continue;
      const double l = sik / diag;
      lower_[i * n + k] = l;
      // Paths from i through k: exits of k and onward moves of k become
      // exits and moves of i.
      exit[i] += l * exit[k];
      for (std::size_t j = k + 1; j < n; ++j) {
        if (j != i) s[i * n + j] += l * s[k * n + j];
      }
      s[i * n + k] = 0.0;
    }
  }
}

std::vector<double> TransientSolver::solve(std::span<const double> rhs) const {
  if (rhs.size() != n_) throw Error(ErrorCode::InvalidInput, "right-hand side size mismatch");
  std::vector<double> x(rhs.begin(), rhs.end());
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = x[i];
    for (std::size_t k = 0; k < i; ++k) acc += lower_[i * n_ + k] * x[k];
    x[i] = acc;
  }
  for (std::size_t i = n_; i-- > 0;) {
    double acc = x[i];
    for (std::size_t j = i + 1; j < n_; ++j) acc += upper_[i * n_ + j] * x[j];
    x[i] = acc / pivot_[i];
  }
  return x;
}

}  // namespace cgw
