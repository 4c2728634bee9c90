#include "chfsi/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace chfsi {

namespace {

constexpr char kMagic[] = "CHFSI-MAT1";
constexpr std::size_t kMagicBytes = 10;

void put_u64(std::vector<std::uint8_t>& out, std::size_t at, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out[at + b] = static_cast<std::uint8_t>(v >> (8 * b));
}

std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t at) {
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(in[at + b]) << (8 * b);
    return v;
}

void put_f64(std::vector<std::uint8_t>& out, std::size_t at, double d) {
    put_u64(out, at, std::bit_cast<std::uint64_t>(d));
}

double get_f64(std::span<const std::uint8_t> in, std::size_t at) {
    return std::bit_cast<double>(get_u64(in, at));
}

}  // namespace

std::vector<std::uint8_t> encode_matrix(ConstMatrixView m, MatrixKind kind) {
    if (kind != MatrixKind::Block)
        CHFSI_REQUIRE(m.rows() == m.cols(), "hermitian and spd files must be square");
    const auto rows = static_cast<std::uint64_t>(m.rows());
    const auto cols = static_cast<std::uint64_t>(m.cols());
    std::vector<std::uint8_t> out(kMatrixHeaderBytes + 16 * rows * cols, 0);
    std::memcpy(out.data(), kMagic, kMagicBytes);
    out[10] = static_cast<std::uint8_t>(kind);
    put_u64(out, 16, rows);
    put_u64(out, 24, cols);
    std::size_t at = kMatrixHeaderBytes;
    for (Index j = 0; j < m.cols(); ++j)
        for (const Complex& z : m.col(j)) {
            put_f64(out, at, z.real());
            put_f64(out, at + 8, z.imag());
            at += 16;
        }
    return out;
}

MatrixFile decode_matrix(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kMatrixHeaderBytes || std::memcmp(bytes.data(), kMagic, kMagicBytes) != 0)
        throw BadMagic();
    const std::uint8_t code = bytes[10];
    if (code < 1 || code > 3)
        throw FormatError("unknown matrix kind code " + std::to_string(code) + " at byte offset 10");
    MatrixFile file;
    file.kind = static_cast<MatrixKind>(code);
    const std::uint64_t rows = get_u64(bytes, 16);
    const std::uint64_t cols = get_u64(bytes, 24);
    if (file.kind != MatrixKind::Block && rows != cols)
        throw FormatError("square kind with " + std::to_string(rows) + " rows and " +
                          std::to_string(cols) + " columns (byte offset 24)");
    if (rows > (1ULL << 31) || cols > (1ULL << 31))
        throw FormatError("implausible matrix shape at byte offset 16");
    const std::uint64_t expected = 16 * rows * cols;
    const std::uint64_t actual = bytes.size() - kMatrixHeaderBytes;
    if (actual < expected) throw TruncatedPayload(expected, actual);
    if (actual > expected)
        throw FormatError("payload has " + std::to_string(actual - expected) +
                          " trailing bytes after offset " +
                          std::to_string(kMatrixHeaderBytes + expected));

    Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
    std::size_t at = kMatrixHeaderBytes;
    for (Complex& z : m.values()) {
        z = {get_f64(bytes, at), get_f64(bytes, at + 8)};
        at += 16;
    }

    if (file.kind != MatrixKind::Block) {
        double scale = 0.0;
        for (const Complex& z : m.values()) scale = std::max(scale, std::abs(z));
        double worst = 0.0;
        Index wi = 0, wj = 0;
        for (Index j = 0; j < m.cols(); ++j)
            for (Index i = j; i < m.rows(); ++i) {
                const double dev = std::abs(m(i, j) - std::conj(m(j, i)));
                if (dev > worst) {
                    worst = dev;
                    wi = i;
                    wj = j;
                }
            }
        const double rel = scale == 0.0 ? 0.0 : worst / scale;
        if (!(rel <= kFileSymmetryTolerance))
            throw SymmetryViolation(kMatrixHeaderBytes + 16 * static_cast<std::uint64_t>(wi + wj * m.rows()),
                                    rel);
        file.data = HermitianMatrix::symmetrize(std::move(m)).matrix();
    } else {
        file.data = std::move(m);
    }
    return file;
}

void write_matrix(const std::string& path, ConstMatrixView m, MatrixKind kind) {
    const auto bytes = encode_matrix(m, kind);
    std::ofstream f(path, std::ios::binary);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("cannot write " + path);
}

MatrixFile read_matrix(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return decode_matrix(bytes);
}

HermitianMatrix read_hermitian(const std::string& path) {
    MatrixFile file = read_matrix(path);
    if (file.kind == MatrixKind::Block)
        throw FormatError(path + ": expected a hermitian or spd matrix, found a vector block");
    return HermitianMatrix::symmetrize(std::move(file.data));
}

Matrix read_block(const std::string& path) {
    MatrixFile file = read_matrix(path);
    if (file.kind != MatrixKind::Block)
        throw FormatError(path + ": expected a vector block");
    return std::move(file.data);
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

Matrix read_matrix_market(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("matrix market: empty input");
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (tag != "%%MatrixMarket" || lower(object) != "matrix")
        throw FormatError("matrix market: missing %%MatrixMarket matrix banner");
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (format != "array" && format != "coordinate")
        throw FormatError("matrix market: unsupported format '" + format + "'");
    if (field != "real" && field != "complex" && field != "integer")
        throw FormatError("matrix market: unsupported field '" + field + "'");
    if (symmetry != "general" && symmetry != "symmetric" && symmetry != "hermitian")
        throw FormatError("matrix market: unsupported symmetry '" + symmetry + "'");
    const bool is_complex = field == "complex";

    do {
        if (!std::getline(in, line)) throw FormatError("matrix market: missing size line");
    } while (line.empty() || line[0] == '%');

    std::istringstream size_line(line);
    Index rows = 0, cols = 0, entries = 0;
    size_line >> rows >> cols;
    if (format == "coordinate") size_line >> entries;
    if (size_line.fail() || rows <= 0 || cols <= 0)
        throw FormatError("matrix market: malformed size line '" + line + "'");
    if (symmetry != "general" && rows != cols)
        throw FormatError("matrix market: symmetric storage requires a square matrix");

    Matrix m(rows, cols);
    auto read_value = [&]() {
        double re = 0.0, im = 0.0;
        in >> re;
        if (is_complex) in >> im;
        if (in.fail()) throw FormatError("matrix market: truncated or malformed value list");
        return Complex(re, im);
    };
    auto mirror = [&](Index i, Index j, Complex z) {
        m(i, j) = z;
        if (i != j) {
            if (symmetry == "hermitian") m(j, i) = std::conj(z);
            else if (symmetry == "symmetric") m(j, i) = z;
        }
    };

    if (format == "array") {
        for (Index j = 0; j < cols; ++j) {
            const Index first = symmetry == "general" ? 0 : j;
            for (Index i = first; i < rows; ++i) mirror(i, j, read_value());
        }
    } else {
        for (Index e = 0; e < entries; ++e) {
            Index i = 0, j = 0;
            in >> i >> j;
            if (in.fail() || i < 1 || j < 1 || i > rows || j > cols)
                throw FormatError("matrix market: bad coordinate entry " + std::to_string(e + 1));
            mirror(i - 1, j - 1, read_value());
        }
    }
    return m;
}

Matrix read_matrix_market(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path);
    return read_matrix_market(f);
}

void write_matrix_market(std::ostream& out, ConstMatrixView m) {
    out << "%%MatrixMarket matrix array complex general\n" << m.rows() << " " << m.cols() << "\n";
    char buf[64];
    for (Index j = 0; j < m.cols(); ++j)
        for (const Complex& z : m.col(j)) {
            std::snprintf(buf, sizeof buf, "%.17g %.17g\n", z.real(), z.imag());
            out << buf;
        }
}

void normalize_phases(Matrix& block) {
    for (Index j = 0; j < block.cols(); ++j) {
        auto c = block.col(j);
        if (c.empty()) continue;
        auto it = std::max_element(c.begin(), c.end(),
                                   [](const Complex& a, const Complex& b) { return std::abs(a) < std::abs(b); });
        const double mag = std::abs(*it);
        if (mag == 0.0) continue;
        const Complex rot = std::conj(*it) / mag;
        for (Complex& z : c) z *= rot;
        *it = mag;
    }
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

}  // namespace chfsi
