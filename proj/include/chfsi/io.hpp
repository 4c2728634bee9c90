#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "chfsi/matrix.hpp"

namespace chfsi {

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed file contents.
class FormatError : public IoError {
public:
    using IoError::IoError;
};

class BadMagic : public FormatError {
public:
    BadMagic() : FormatError("bad magic: not a CHFSI-MAT1 file") {}
};

class TruncatedPayload : public FormatError {
public:
    TruncatedPayload(std::uint64_t expected, std::uint64_t actual)
        : FormatError("truncated payload: expected " + std::to_string(expected) +
                      " bytes, found " + std::to_string(actual)),
          expected_(expected),
          actual_(actual) {}
    std::uint64_t expected() const noexcept { return expected_; }
    std::uint64_t actual() const noexcept { return actual_; }

private:
    std::uint64_t expected_;
    std::uint64_t actual_;
};

class SymmetryViolation : public FormatError {
public:
    SymmetryViolation(std::uint64_t offset, double deviation)
        : FormatError("hermitian symmetry violated at byte offset " + std::to_string(offset) +
                      " (relative deviation " + std::to_string(deviation) + ")"),
          offset_(offset) {}
    /// Byte offset of the worst entry within the file.
    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

/// Kind code stored in byte 10 of the header.
enum class MatrixKind : std::uint8_t { Hermitian = 1, Spd = 2, Block = 3 };

/// MatrixFile layout (all integers little-endian):
///
///   offset  size  field
///        0    10  magic "CHFSI-MAT1"
///       10     1  kind (1 hermitian, 2 spd, 3 block)
///       11     5  reserved, zero
///       16     8  rows n (u64)
///       24     8  columns (u64; equals n for hermitian and spd)
///       32   16*n*cols  column-major entries, real then imaginary, IEEE-754 binary64
inline constexpr std::size_t kMatrixHeaderBytes = 32;
inline constexpr double kFileSymmetryTolerance = 1e-10;

struct MatrixFile {
    MatrixKind kind = MatrixKind::Block;
    Matrix data;
};

std::vector<std::uint8_t> encode_matrix(ConstMatrixView m, MatrixKind kind);
/// Validates the header and exact payload length; square kinds are checked
/// for Hermitian symmetry and symmetrized.
MatrixFile decode_matrix(std::span<const std::uint8_t> bytes);

void write_matrix(const std::string& path, ConstMatrixView m, MatrixKind kind);
MatrixFile read_matrix(const std::string& path);
/// read_matrix restricted to the hermitian and spd kinds.
HermitianMatrix read_hermitian(const std::string& path);
Matrix read_block(const std::string& path);

/// Matrix Market array or coordinate files with real or complex fields and
/// general, symmetric, or hermitian symmetry.
Matrix read_matrix_market(std::istream& in);
Matrix read_matrix_market(const std::string& path);
/// Writes "array complex general" with 17 significant digits.
void write_matrix_market(std::ostream& out, ConstMatrixView m);

/// Makes the largest-magnitude entry of each column real and positive.
void normalize_phases(Matrix& block);

/// "%.16e": 17 significant digits.
std::string format_value(double v);

}  // namespace chfsi
