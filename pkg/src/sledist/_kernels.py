"""Numerical hot loops, each in two flavors: vectorized numpy and compiled numba.

The numba versions are compiled lazily on first use so that importing the
package never pays JIT cost; when numba is missing the numpy flavor is the
only one available.  Both flavors implement the same arithmetic and agree to
rounding noise; backend selection happens in :mod:`sledist.backends`.
"""

from __future__ import annotations

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only on stripped installs
    numba = None
    HAVE_NUMBA = False


# ---------------------------------------------------------------------------
# numpy flavor


def horner_many_numpy(coeffs_desc: np.ndarray, mid: float, xs: np.ndarray) -> np.ndarray:
    u = xs - mid
    acc = np.full(xs.shape, coeffs_desc[0])
    for c in coeffs_desc[1:]:
        acc = acc * u + c
    return acc


def barycentric_many_numpy(
    nodes: np.ndarray,
    values: np.ndarray,
    weights: np.ndarray,
    xs: np.ndarray,
    chunk: int = 4096,
) -> np.ndarray:
    """Barycentric interpolation at xs; exact hits on a node return the node value."""
    out = np.empty(xs.shape)
    for start in range(0, xs.size, chunk):
        x = xs[start : start + chunk]
        diff = x[:, None] - nodes[None, :]
        on_node = diff == 0.0
        hit = on_node.any(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = weights / diff
            res = (w @ values) / w.sum(axis=1)
        if hit.any():
            res[hit] = values[on_node.argmax(axis=1)[hit]]
        out[start : start + chunk] = res
    return out


def eigvalsh_batch_numpy(mats: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a batch of Hermitian matrices via LAPACK."""
    return np.linalg.eigvalsh(mats)


# ---------------------------------------------------------------------------
# numba flavor (compiled on first call; see backends.get_backend)

_numba_cache: dict[str, object] = {}


def _compile_numba():
    if not HAVE_NUMBA:
        raise ImportError("numba is not installed")
    if _numba_cache:
        return _numba_cache

    njit = numba.njit

    @njit(cache=True)
    def horner_many(coeffs_desc, mid, xs):
        out = np.empty(xs.size)
        for i in range(xs.size):
            u = xs[i] - mid
            acc = coeffs_desc[0]
            for k in range(1, coeffs_desc.size):
                acc = acc * u + coeffs_desc[k]
            out[i] = acc
        return out

    @njit(cache=True)
    def barycentric_many(nodes, values, weights, xs):
        out = np.empty(xs.size)
        for i in range(xs.size):
            x = xs[i]
            num = 0.0
            den = 0.0
            hit = -1
            for k in range(nodes.size):
                d = x - nodes[k]
                if d == 0.0:
                    hit = k
                    break
                w = weights[k] / d
                num += w * values[k]
                den += w
            out[i] = values[hit] if hit >= 0 else num / den
        return out

    @njit(cache=True)
    def jacobi_eigvalsh_batch(mats, tol, max_sweeps):
        """Cyclic Jacobi with complex phase rotations; returns sorted eigenvalues.

        Convergence: off-diagonal Frobenius mass below tol times the matrix
        Frobenius norm.  sweeps[i] == max_sweeps flags non-convergence.
        """
        n_mat, K, _ = mats.shape
        evals = np.empty((n_mat, K), dtype=np.float64)
        sweeps_used = np.empty(n_mat, dtype=np.int64)
        for idx in range(n_mat):
            A = mats[idx].copy()
            ref = 0.0
            for r in range(K):
                for c in range(K):
                    ref += abs(A[r, c]) ** 2
            ref = np.sqrt(ref)
            if ref == 0.0:
                for r in range(K):
                    evals[idx, r] = 0.0
                sweeps_used[idx] = 0
                continue
            sweeps = 0
            while sweeps < max_sweeps:
                off = 0.0
                for p in range(K - 1):
                    for q in range(p + 1, K):
                        off += abs(A[p, q]) ** 2
                off = np.sqrt(2.0 * off)
                if off <= tol * ref:
                    break
                for p in range(K - 1):
                    for q in range(p + 1, K):
                        apq = A[p, q]
                        if abs(apq) <= 1e-300:
                            continue
                        app = A[p, p].real
                        aqq = A[q, q].real
                        # phase factor makes the rotated off-diagonal entry real
                        phase = apq / abs(apq)
                        tau = (aqq - app) / (2.0 * abs(apq))
                        if tau >= 0.0:
                            t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                        else:
                            t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                        c = 1.0 / np.sqrt(1.0 + t * t)
                        s = t * c
                        for r in range(K):
                            arp = A[r, p]
                            arq = A[r, q]
                            A[r, p] = c * arp - s * np.conj(phase) * arq
                            A[r, q] = s * phase * arp + c * arq
                        for r in range(K):
                            apr = A[p, r]
                            aqr = A[q, r]
                            A[p, r] = c * apr - s * phase * aqr
                            A[q, r] = s * np.conj(phase) * apr + c * aqr
                sweeps += 1
            sweeps_used[idx] = sweeps
            d = np.empty(K, dtype=np.float64)
            for r in range(K):
                d[r] = A[r, r].real
            d.sort()
            for r in range(K):
                evals[idx, r] = d[r]
        return evals, sweeps_used

    _numba_cache["horner_many"] = horner_many
    _numba_cache["barycentric_many"] = barycentric_many
    _numba_cache["jacobi_eigvalsh_batch"] = jacobi_eigvalsh_batch
    return _numba_cache
