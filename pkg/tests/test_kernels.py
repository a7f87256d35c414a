"""Backend equivalence and correctness of the two hot kernels."""

import numpy as np
import pytest
from scipy.linalg import expm

import orlicz_qha._kernels as kernels
from orlicz_qha._kernels import fallback


def backends():
    out = [fallback]
    if kernels.BACKEND == "compiled":
        from orlicz_qha._kernels import _core

        out.append(_core)
    return out


@pytest.mark.parametrize("impl", backends(), ids=lambda m: m.BACKEND)
class TestJacobi:
    def test_against_lapack(self, impl, rng):
        for n in (2, 5, 16, 48):
            A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            got = impl.jacobi_singular_values(A)
            ref = np.linalg.svd(A, compute_uv=False)
            np.testing.assert_allclose(got, ref, rtol=1e-11, atol=1e-11 * ref[0])

    def test_rank_deficient(self, impl, rng):
        A = rng.normal(size=(6, 2)) @ rng.normal(size=(2, 6)) + 0j
        got = impl.jacobi_singular_values(A)
        ref = np.linalg.svd(A, compute_uv=False)
        np.testing.assert_allclose(got, ref, atol=1e-10 * ref[0])

    def test_tall_matrix(self, impl, rng):
        A = rng.normal(size=(9, 4)) + 1j * rng.normal(size=(9, 4))
        got = impl.jacobi_singular_values(A)
        ref = np.linalg.svd(A, compute_uv=False)
        np.testing.assert_allclose(got, ref, rtol=1e-11)


@pytest.mark.parametrize("impl", backends(), ids=lambda m: m.BACKEND)
class TestDisplacement:
    def test_identity_at_zero(self, impl):
        D = impl.displacement_batch(np.array([0.0 + 0.0j]), 16)[0]
        np.testing.assert_allclose(D, np.eye(16), atol=1e-14)

    def test_vacuum_element(self, impl):
        alphas = np.array([0.5 + 0.25j, 2.0 - 1.0j, 3.0 + 3.0j])
        D = impl.displacement_batch(alphas, 24)
        np.testing.assert_allclose(
            D[:, 0, 0], np.exp(-np.abs(alphas) ** 2 / 2), rtol=1e-13
        )

    def test_against_expm(self, impl):
        N = 48
        a = np.diag(np.sqrt(np.arange(1, N)), 1)
        for alpha in (0.3 + 0.4j, 1.5 - 0.5j):
            D = impl.displacement_batch(np.array([alpha]), N)[0]
            ref = expm(alpha * a.conj().T - np.conj(alpha) * a)
            np.testing.assert_allclose(D[:24, :24], ref[:24, :24], atol=1e-12)

    def test_unitarity_low_block(self, impl):
        D = impl.displacement_batch(np.array([1.0 + 0.7j]), 48)[0]
        P = D.conj().T @ D
        np.testing.assert_allclose(P[:16, :16], np.eye(16), atol=1e-10)


def test_backends_agree(rng):
    mods = backends()
    if len(mods) < 2:
        pytest.skip("compiled backend unavailable")
    alphas = rng.normal(size=12) + 1j * rng.normal(size=12)
    d1 = mods[0].displacement_batch(alphas, 32)
    d2 = mods[1].displacement_batch(alphas, 32)
    np.testing.assert_allclose(d1, d2, atol=1e-13)
    A = rng.normal(size=(24, 24)) + 1j * rng.normal(size=(24, 24))
    s1 = mods[0].jacobi_singular_values(A)
    s2 = mods[1].jacobi_singular_values(A)
    np.testing.assert_allclose(s1, s2, rtol=1e-10)


def test_selector_env(tmp_path, monkeypatch):
    import importlib
    import subprocess
    import sys

    code = (
        "import orlicz_qha._kernels as k; print(k.BACKEND)"
    )
    out = subprocess.run(
        [sys.executable, "-c", code],
        env={"ORLICZ_QHA_FORCE_FALLBACK": "1", "PATH": "/usr/bin:/bin"},
        capture_output=True,
        text=True,
    )
    assert out.stdout.strip() == "fallback"
