#ifndef MGI_TRANSFORMS_HPP
#define MGI_TRANSFORMS_HPP

#include "mgi/types.hpp"

namespace mgi {

enum class BasisKind { identity, dct2, haar2 };

// Orthonormal sparsity-inducing transform on a width x height grid:
// identity, separable 2D DCT-II, or multilevel 2D Haar (Mallat pyramid).
// Images and coefficient vectors are row-major of length width * height.
class SparsityBasis {
  public:
    // haar_levels < 0 selects the deepest level count that divides both
    // dimensions (full depth for power-of-two grids).
    SparsityBasis(BasisKind kind, GridShape grid, int haar_levels = -1);

    BasisKind kind() const { return kind_; }
    const GridShape& grid() const { return grid_; }
    int haar_levels() const { return haar_levels_; }

    Vector forward(const Vector& image) const;
    Vector inverse(const Vector& coeffs) const;

    // Square roots of diag(T * sigma * T^T), computed by fast transforms of
    // sigma's columns and rows rather than a dense triple product.
    Vector component_std(const Matrix& sigma) const;

  private:
    BasisKind kind_;
    GridShape grid_;
    int haar_levels_ = 0;
    Matrix dct_rows_;  // h x h orthonormal DCT-II matrix
    Matrix dct_cols_;  // w x w
};

}  // namespace mgi

#endif
