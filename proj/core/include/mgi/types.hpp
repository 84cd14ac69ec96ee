#ifndef MGI_TYPES_HPP
#define MGI_TYPES_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <stdexcept>
#include <string>
#include <utility>

namespace mgi {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Index = Eigen::Index;

struct GridShape {
    int width = 0;
    int height = 0;

    Index size() const { return static_cast<Index>(width) * height; }
    bool operator==(const GridShape&) const = default;
};

// Transparency distribution f on a pixel grid, values in [0, 1].
// Stored row-major: values[y * width + x].
struct ObjectImage {
    GridShape grid;
    Vector values;

    bool valid() const {
        if (values.size() != grid.size()) return false;
        return values.allFinite() && values.minCoeff() >= 0.0 && values.maxCoeff() <= 1.0;
    }
};

struct InvalidInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SingularCovarianceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ImagingImpossibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Iterative solver gave up; carries the best iterate seen so far.
struct NonConvergenceError : std::runtime_error {
    Vector best_iterate;
    NonConvergenceError(const std::string& what, Vector iterate)
        : std::runtime_error(what), best_iterate(std::move(iterate)) {}
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mgi

#endif
