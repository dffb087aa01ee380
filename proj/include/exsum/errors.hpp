#pragma once

#include <stdexcept>
#include <string>

namespace exsum {

struct NonFiniteInput : std::invalid_argument {
    explicit NonFiniteInput(const std::string& what = "non-finite value in input")
        : std::invalid_argument(what) {}
};

struct ShapeMismatch : std::invalid_argument {
    explicit ShapeMismatch(const std::string& what = "operand shapes differ")
        : std::invalid_argument(what) {}
};

struct DimensionMismatch : std::invalid_argument {
    explicit DimensionMismatch(const std::string& what = "inner dimensions disagree")
        : std::invalid_argument(what) {}
};

struct NotDiagonallyDominant : std::invalid_argument {
    explicit NotDiagonallyDominant(const std::string& what = "matrix is not strictly diagonally dominant")
        : std::invalid_argument(what) {}
};

struct ZeroPivot : std::runtime_error {
    int row;
    explicit ZeroPivot(int r)
        : std::runtime_error("zero pivot at row " + std::to_string(r)), row(r) {}
};

struct ZeroNormalizer : std::runtime_error {
    ZeroNormalizer() : std::runtime_error("eigenvalue estimate is zero") {}
};

struct NotConverged : std::runtime_error {
    explicit NotConverged(const std::string& what = "iteration did not converge")
        : std::runtime_error(what) {}
};

struct OddSubintervalCount : std::invalid_argument {
    explicit OddSubintervalCount(const std::string& what = "subinterval count must be even and >= 2")
        : std::invalid_argument(what) {}
};

struct InvalidConfig : std::invalid_argument {
    explicit InvalidConfig(const std::string& what) : std::invalid_argument(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace exsum
