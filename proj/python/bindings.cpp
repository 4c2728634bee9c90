#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "chfsi/generalized.hpp"
#include "chfsi/io.hpp"
#include "chfsi/sequence.hpp"
#include "chfsi/solver.hpp"

namespace py = pybind11;
using chfsi::Complex;
using chfsi::Index;
using chfsi::Matrix;

namespace {

using CArray = py::array_t<Complex, py::array::f_style | py::array::forcecast>;

Matrix to_matrix(const CArray& a) {
    if (a.ndim() == 1) {
        Matrix m(a.shape(0), 1);
        std::memcpy(m.data(), a.data(), sizeof(Complex) * static_cast<std::size_t>(a.shape(0)));
        return m;
    }
    if (a.ndim() != 2) throw py::value_error("expected a 1-d or 2-d array");
    Matrix m(a.shape(0), a.shape(1));
    std::memcpy(m.data(), a.data(), sizeof(Complex) * static_cast<std::size_t>(a.size()));
    return m;
}

py::array_t<Complex> to_array(const Matrix& m) {
    py::array_t<Complex, py::array::f_style> out({m.rows(), m.cols()});
    std::memcpy(out.mutable_data(), m.data(), sizeof(Complex) * static_cast<std::size_t>(m.rows() * m.cols()));
    return out;
}

chfsi::HermitianMatrix to_hermitian(const CArray& a) { return chfsi::HermitianMatrix::from_raw(to_matrix(a)); }

chfsi::SolverConfig make_config(Index nev, double tol, int degree, int max_iters, Index buffer, std::uint64_t seed,
                                int workers) {
    chfsi::SolverConfig c;
    c.nev = nev;
    c.tol = tol;
    c.degree = degree;
    c.max_outer_iters = max_iters;
    c.buffer = buffer;
    c.seed = seed;
    c.workers = workers;
    return c;
}

std::optional<Matrix> maybe_matrix(const std::optional<CArray>& a) {
    if (!a) return std::nullopt;
    return to_matrix(*a);
}

py::dict report_dict(const chfsi::SolveReport& r) {
    py::dict d;
    d["outer_iterations"] = r.outer_iterations();
    d["total_matvecs"] = r.total_matvecs;
    d["upper_bound"] = r.upper_bound;
    py::list its;
    for (const auto& it : r.iterations) {
        py::dict row;
        row["iter"] = it.iter;
        row["filtered_cols"] = it.filtered_cols;
        row["converged"] = it.converged;
        row["max_resid"] = it.max_resid;
        row["matvecs"] = it.matvecs;
        its.append(row);
    }
    d["iterations"] = its;
    return d;
}

}  // namespace

PYBIND11_MODULE(_chfsi, m) {
    m.doc() = "Chebyshev filtered subspace iteration for dense Hermitian eigenproblems";

    py::register_exception<chfsi::ContractViolation>(m, "ContractViolation", PyExc_ValueError);
    py::register_exception<chfsi::NotConverged>(m, "NotConverged", PyExc_RuntimeError);
    py::register_exception<chfsi::NotPositiveDefinite>(m, "NotPositiveDefinite", PyExc_ValueError);
    py::register_exception<chfsi::FilterDegenerate>(m, "FilterDegenerate", PyExc_ValueError);
    py::register_exception<chfsi::IoError>(m, "IoError", PyExc_OSError);

    m.def(
        "solve",
        [](const CArray& h, Index nev, double tol, int degree, int max_iters, Index buffer, std::uint64_t seed,
           int workers, const std::optional<CArray>& start) {
            const auto hm = to_hermitian(h);
            auto r = chfsi::chfsi_solve(hm, maybe_matrix(start), make_config(nev, tol, degree, max_iters, buffer,
                                                                             seed, workers));
            py::dict d;
            d["eigenvalues"] = r.eigenvalues;
            d["eigenvectors"] = to_array(r.eigenvectors);
            d["residuals"] = r.final_residuals;
            d["report"] = report_dict(r.report);
            return d;
        },
        py::arg("h"), py::arg("nev"), py::arg("tol") = 1e-10, py::arg("degree") = 20, py::arg("max_iters") = 30,
        py::arg("buffer") = -1, py::arg("seed") = 42, py::arg("workers") = 1, py::arg("start") = py::none(),
        "Lowest nev eigenpairs of a Hermitian matrix.");

    m.def(
        "solve_generalized",
        [](const CArray& a, const CArray& b, Index nev, double tol, int degree, int max_iters, Index buffer,
           std::uint64_t seed, int workers) {
            const auto am = to_hermitian(a);
            const auto bm = to_hermitian(b);
            auto r = chfsi::solve_generalized(am, bm, std::nullopt,
                                              make_config(nev, tol, degree, max_iters, buffer, seed, workers));
            py::dict d;
            d["eigenvalues"] = r.eigenvalues;
            d["eigenvectors"] = to_array(r.eigenvectors);
            d["report"] = report_dict(r.report);
            return d;
        },
        py::arg("a"), py::arg("b"), py::arg("nev"), py::arg("tol") = 1e-10, py::arg("degree") = 20,
        py::arg("max_iters") = 30, py::arg("buffer") = -1, py::arg("seed") = 42, py::arg("workers") = 1,
        "Lowest nev eigenpairs of A c = lambda B c with B positive definite.");

    m.def(
        "oracle_eig",
        [](const CArray& h) {
            auto e = chfsi::oracle_eig(to_hermitian(h));
            return py::make_tuple(e.values, to_array(e.vectors));
        },
        py::arg("h"), "All eigenpairs by cyclic Jacobi (reference implementation).");

    m.def(
        "chebyshev_filter",
        [](const CArray& h, const CArray& y, int degree, double lower, double upper, double reference) {
            const auto hm = to_hermitian(h);
            return to_array(chfsi::chebyshev_filter(hm, to_matrix(y), {degree, lower, upper, reference}));
        },
        py::arg("h"), py::arg("y"), py::arg("degree"), py::arg("lower"), py::arg("upper"), py::arg("reference"));

    m.def(
        "lanczos_upper_bound",
        [](const CArray& h, int steps, std::uint64_t seed) {
            return chfsi::lanczos_upper_bound(to_hermitian(h), steps, seed);
        },
        py::arg("h"), py::arg("steps") = 10, py::arg("seed") = 42);

    m.def(
        "generate_sequence",
        [](Index n, int cycles, Index nev, double delta0, double rho, std::uint64_t seed, bool generalized) {
            chfsi::SequenceSpec s;
            s.n = n;
            s.cycles = cycles;
            s.nev = nev;
            s.delta0 = delta0;
            s.rho = rho;
            s.seed = seed;
            s.kind = generalized ? chfsi::ProblemKind::Generalized : chfsi::ProblemKind::Standard;
            const auto seq = chfsi::generate_sequence(s);
            py::list out;
            for (const auto& p : seq.problems) {
                if (p.b) out.append(py::make_tuple(to_array(p.a.matrix()), to_array(p.b->matrix())));
                else out.append(py::make_tuple(to_array(p.a.matrix()), py::none()));
            }
            return out;
        },
        py::arg("n") = 500, py::arg("cycles") = 13, py::arg("nev") = 35, py::arg("delta0") = 0.1,
        py::arg("rho") = 0.5, py::arg("seed") = 2013, py::arg("generalized") = false,
        "List of (A, B or None) per cycle.");

    m.def(
        "write_matrix",
        [](const std::string& path, const CArray& a, const std::string& kind) {
            chfsi::MatrixKind k;
            if (kind == "hermitian") k = chfsi::MatrixKind::Hermitian;
            else if (kind == "spd") k = chfsi::MatrixKind::Spd;
            else if (kind == "block") k = chfsi::MatrixKind::Block;
            else throw py::value_error("kind must be hermitian, spd or block");
            chfsi::write_matrix(path, to_matrix(a), k);
        },
        py::arg("path"), py::arg("a"), py::arg("kind") = "hermitian");

    m.def(
        "read_matrix",
        [](const std::string& path) {
            auto f = chfsi::read_matrix(path);
            const char* kind = f.kind == chfsi::MatrixKind::Hermitian ? "hermitian"
                               : f.kind == chfsi::MatrixKind::Spd     ? "spd"
                                                                      : "block";
            return py::make_tuple(to_array(f.data), kind);
        },
        py::arg("path"));
}
