import numpy as np
import pytest

import chfsi


def hermitian(n, seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (g + g.conj().T) / 2


def spd(n, seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return m.conj().T @ m / n + np.eye(n)


def test_solve_matches_numpy():
    h = hermitian(60, 1)
    r = chfsi.solve(h, nev=6)
    np.testing.assert_allclose(r["eigenvalues"], np.linalg.eigvalsh(h)[:6], atol=1e-9)
    y = r["eigenvectors"]
    assert y.shape == (60, 6)
    np.testing.assert_allclose(y.conj().T @ y, np.eye(6), atol=1e-10)
    assert max(r["residuals"]) < 1e-10
    assert r["report"]["outer_iterations"] >= 1


def test_exact_start_takes_one_iteration():
    h = hermitian(50, 2)
    _, v = np.linalg.eigh(h)
    r = chfsi.solve(h, nev=4, buffer=2, start=v[:, :6])
    assert r["report"]["outer_iterations"] == 1


def test_generalized():
    a, b = hermitian(40, 3), spd(40, 4)
    r = chfsi.solve_generalized(a, b, nev=5)
    lam = np.sort(np.linalg.eigvals(np.linalg.solve(b, a)).real)[:5]
    np.testing.assert_allclose(r["eigenvalues"], lam, atol=1e-8)
    c = r["eigenvectors"]
    np.testing.assert_allclose(c.conj().T @ b @ c, np.eye(5), atol=1e-9)


def test_oracle_eig():
    h = hermitian(25, 5)
    values, vectors = chfsi.oracle_eig(h)
    np.testing.assert_allclose(values, np.linalg.eigvalsh(h), atol=1e-11)
    np.testing.assert_allclose(h @ vectors, vectors * np.asarray(values), atol=1e-10)


def test_filter_on_diagonal():
    d = np.linspace(-1.0, 9.0, 11)
    y = np.eye(11, dtype=complex)
    out = chfsi.chebyshev_filter(np.diag(d), y, degree=8, lower=1.0, upper=9.0, reference=-1.0)
    assert out[0, 0].real == pytest.approx(1.0, abs=1e-12)
    inside = np.abs(np.diag(out)[2:])
    assert np.all(inside < 1.0)


def test_lanczos_bound():
    h = hermitian(80, 6)
    assert chfsi.lanczos_upper_bound(h, steps=10) >= np.linalg.eigvalsh(h)[-1]


def test_generate_sequence():
    seq = chfsi.generate_sequence(n=30, cycles=3, nev=4)
    assert len(seq) == 3
    for a, b in seq:
        assert a.shape == (30, 30)
        assert b is None
        np.testing.assert_allclose(a, a.conj().T, atol=1e-14)
    gen = chfsi.generate_sequence(n=20, cycles=2, nev=3, generalized=True)
    assert all(b is not None and np.all(np.linalg.eigvalsh(b) > 0) for _, b in gen)


def test_matrix_file_round_trip(tmp_path):
    h = hermitian(12, 7)
    path = str(tmp_path / "h.chm")
    chfsi.write_matrix(path, h, "hermitian")
    back, kind = chfsi.read_matrix(path)
    assert kind == "hermitian"
    np.testing.assert_array_equal(back, (h + h.conj().T) / 2)


def test_errors(tmp_path):
    with pytest.raises(chfsi.ContractViolation):
        chfsi.solve(hermitian(10, 8), nev=0)
    with pytest.raises(chfsi.NotPositiveDefinite):
        chfsi.solve_generalized(hermitian(10, 9), -np.eye(10), nev=2)
    with pytest.raises(chfsi.NotConverged):
        chfsi.solve(hermitian(80, 10), nev=10, max_iters=1, degree=2)
    bad = tmp_path / "bad.chm"
    bad.write_bytes(b"not a matrix file at all, definitely not")
    with pytest.raises(chfsi.IoError):
        chfsi.read_matrix(str(bad))
