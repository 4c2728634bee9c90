#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chfsi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on shapes or arguments was not met by the caller.
class ContractViolation : public Error {
public:
    using Error::Error;
};

class NotPositiveDefinite : public Error {
public:
    explicit NotPositiveDefinite(std::size_t pivot)
        : Error("matrix is not positive definite: non-positive pivot at index " +
                std::to_string(pivot)),
          pivot_(pivot) {}

    /// One-based index of the failing pivot.
    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

class RankDeficient : public Error {
public:
    explicit RankDeficient(std::size_t column)
        : Error("column " + std::to_string(column) + " collapsed during orthonormalization"),
          column_(column) {}

    /// Zero-based index of the collapsed column.
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

class OracleNoConvergence : public Error {
public:
    using Error::Error;
};

/// The wanted and unwanted spectral intervals overlap, so no damping filter exists.
class FilterDegenerate : public Error {
public:
    using Error::Error;
};

}  // namespace chfsi

#define CHFSI_REQUIRE(cond, msg)                                   \
    do {                                                           \
        if (!(cond)) throw ::chfsi::ContractViolation(msg);        \
    } while (false)
