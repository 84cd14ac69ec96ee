#ifndef MGI_LINALG_HPP
#define MGI_LINALG_HPP

#include <Eigen/Cholesky>
#include <functional>

#include "mgi/types.hpp"

namespace mgi {

// Symmetric linear map given by its action on vectors. dim is the ambient
// dimension; lipschitz, when positive, is a known upper bound on the largest
// eigenvalue (skips power iteration in the box projection).
struct LinearOperator {
    Index dim = 0;
    std::function<Vector(const Vector&)> apply;
    double lipschitz = -1.0;

    static LinearOperator from_matrix(const Matrix& m);
    static LinearOperator identity(Index n);
};

// Moore-Penrose pseudoinverse via SVD. Singular values below
// rel_cutoff * sigma_max are treated as zero.
Matrix pseudoinverse(const Matrix& m, double rel_cutoff);

// Default relative cutoff used when callers do not pin one.
inline double default_pinv_cutoff(Index rows, Index cols) {
    return 1e-10 * static_cast<double>(std::max(rows, cols));
}
inline Matrix pseudoinverse(const Matrix& m) {
    return pseudoinverse(m, default_pinv_cutoff(m.rows(), m.cols()));
}

// Cholesky-backed factorization of a symmetric positive-definite matrix for
// repeated solves. Rejects matrices that are asymmetric beyond sym_tol
// (relative) or whose pivots fall below the rank tolerance.
class SpdFactor {
  public:
    explicit SpdFactor(const Matrix& source, double rank_tol = 1e-12, double sym_tol = 1e-12);

    Vector solve(const Vector& rhs) const { return ldlt_.solve(rhs); }
    Matrix solve(const Matrix& rhs) const { return ldlt_.solve(rhs); }
    Index dim() const { return ldlt_.rows(); }
    double rank_tolerance() const { return rank_tol_; }

  private:
    Eigen::LDLT<Matrix> ldlt_;
    double rank_tol_;
};

// diag + G * G^T with diag positive and rank(G) small compared to n.
struct LowRankPlusDiag {
    Vector diag;
    Matrix factors;  // n x r; r may be 0

    Index dim() const { return diag.size(); }
    Matrix dense() const;
};

// Applies (diag + G G^T)^{-1} through the Woodbury identity:
//   (D + G G^T)^{-1} = D^{-1} - D^{-1} G (I + G^T D^{-1} G)^{-1} G^T D^{-1}.
class WoodburyInverse {
  public:
    explicit WoodburyInverse(const LowRankPlusDiag& s, double diag_floor = 0.0);

    Vector apply(const Vector& v) const;
    Matrix apply(const Matrix& m) const;
    LinearOperator as_operator() const;
    Index dim() const { return inv_diag_.size(); }

    const Vector& inverse_diag() const { return inv_diag_; }
    // Solves (I + G^T D^{-1} G) x = rhs, the r x r capacitance system.
    Matrix capacitance_solve(const Matrix& rhs) const;
    const Matrix& factors() const { return factors_; }

  private:
    Vector inv_diag_;
    Matrix factors_;
    Eigen::LLT<Matrix> capacitance_;
};

inline WoodburyInverse invert_low_rank_plus_diag(const LowRankPlusDiag& s,
                                                 double diag_floor = 0.0) {
    return WoodburyInverse(s, diag_floor);
}

struct BoxProjectionResult {
    Vector point;
    int iterations = 0;
    bool converged = false;
    double kkt_residual = 0.0;
};

// argmin over v in [lo, hi] of (v - u)^T sigma_inv (v - u), solved by
// accelerated projected gradient with step 1/L. The convergence measure is the
// sup-norm of the projected-gradient step x - clamp(x - grad(x)/L).
BoxProjectionResult project_box(const Vector& u, const LinearOperator& sigma_inv,
                                const Vector& box_lo, const Vector& box_hi,
                                double tol = 1e-8, int max_iter = 10000);

// Same, but throws NonConvergenceError (carrying the best iterate) on failure.
Vector mahalanobis_project(const Vector& u, const LinearOperator& sigma_inv,
                           const Vector& box_lo, const Vector& box_hi,
                           double tol = 1e-8, int max_iter = 10000);

}  // namespace mgi

#endif
