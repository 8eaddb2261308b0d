"""Hot numerical loops: polynomial systems, RK4, quaternion words, twist walks.

Each kernel has a numba ``@njit`` build and a pure-numpy twin with the same
signature.  Setting ``TORELLI_DISABLE_NUMBA=1`` (or running without numba
installed) selects the numpy versions; ``BACKEND`` records which is active.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("TORELLI_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError
    from numba import njit
except ImportError:  # pragma: no cover - depends on environment
    njit = None

BACKEND = "numba" if njit is not None else "numpy"


class PolySystem:
    """Several polynomials flattened into one term table for fast evaluation.

    ``exps[t]`` is the exponent vector of term ``t``, ``coeffs[t]`` its float
    coefficient, and ``owner[t]`` the index of the polynomial it belongs to.
    """

    __slots__ = ("exps", "coeffs", "owner", "nout")

    def __init__(self, polys):
        rows, cs, own = [], [], []
        for i, p in enumerate(polys):
            e, c = p.compiled()
            rows.append(e)
            cs.append(c)
            own.append(np.full(len(c), i, dtype=np.int64))
        self.nout = len(rows)
        self.exps = np.ascontiguousarray(np.concatenate(rows) if rows else np.zeros((0, 7), np.int64), dtype=np.int64)
        self.coeffs = np.ascontiguousarray(np.concatenate(cs) if cs else np.zeros(0), dtype=np.float64)
        self.owner = np.ascontiguousarray(np.concatenate(own) if own else np.zeros(0, np.int64), dtype=np.int64)

    def __call__(self, X):
        """Evaluate at one point (shape (7,)) or a batch (shape (n, 7))."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            return eval_batch(self.exps, self.coeffs, self.owner, self.nout, X[None, :])[0]
        return eval_batch(self.exps, self.coeffs, self.owner, self.nout, np.ascontiguousarray(X))


# ---------------------------------------------------------------- numpy


def _np_eval_batch(exps, coeffs, owner, nout, X):
    if len(coeffs) == 0:
        return np.zeros((X.shape[0], nout))
    mon = np.prod(X[:, None, :] ** exps[None, :, :], axis=2) * coeffs[None, :]
    out = np.zeros((X.shape[0], nout))
    for j in range(nout):
        out[:, j] = mon[:, owner == j].sum(axis=1)
    return out


def _np_rk4(exps, coeffs, owner, X0, dt, nsteps):
    X = np.array(X0, dtype=np.float64)
    f = lambda Y: _np_eval_batch(exps, coeffs, owner, 7, Y)  # noqa: E731
    for _ in range(nsteps):
        k1 = f(X)
        k2 = f(X + 0.5 * dt * k1)
        k3 = f(X + 0.5 * dt * k2)
        k4 = f(X + dt * k3)
        X = X + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return X


def _py_qmul(p, q):
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return (
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    )


def _py_letter(A, letter):
    a, b, c, d = A[abs(letter) - 1]
    return (a, b, c, d) if letter > 0 else (a, -b, -c, -d)


def _py_word(A, letters, start, length):
    acc = (1.0, 0.0, 0.0, 0.0)
    for t in range(start, start + length):
        acc = _py_qmul(acc, _py_letter(A, letters[t]))
    return acc


def _py_normalize(q):
    n = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]) ** 0.5
    return (q[0] / n, q[1] / n, q[2] / n, q[3] / n)


def _py_coords(A):
    A1, A2, A3 = A
    A12 = _py_qmul(A1, A2)
    A13 = _py_qmul(A1, A3)
    A23 = _py_qmul(A2, A3)
    A123 = _py_qmul(A12, A3)
    return (2 * A123[0], 2 * A1[0], 2 * A2[0], 2 * A3[0], 2 * A12[0], 2 * A13[0], 2 * A23[0])


def _np_walk(A0, letters, starts, lengths, choices):
    A = [tuple(float(v) for v in row) for row in A0]
    letters = letters.tolist()
    starts = starts.tolist()
    lengths = lengths.tolist()
    out = np.empty((len(choices), 7))
    for step, r in enumerate(choices.tolist()):
        A = [_py_normalize(_py_word(A, letters, starts[r][g], lengths[r][g])) for g in range(3)]
        out[step] = _py_coords(A)
    return out, np.array(A)


def _np_apply_words(A0, letters, starts, lengths):
    A = [tuple(float(v) for v in row) for row in A0]
    return np.array([_py_normalize(_py_word(A, letters.tolist(), starts[g], lengths[g])) for g in range(3)])


# ---------------------------------------------------------------- numba

if njit is not None:

    @njit(cache=True)
    def _nb_eval_point(exps, coeffs, owner, nout, x, out):
        for j in range(nout):
            out[j] = 0.0
        for t in range(coeffs.shape[0]):
            v = coeffs[t]
            for i in range(7):
                e = exps[t, i]
                for _ in range(e):
                    v *= x[i]
            out[owner[t]] += v

    @njit(cache=True)
    def _nb_eval_batch(exps, coeffs, owner, nout, X):
        out = np.empty((X.shape[0], nout))
        buf = np.empty(nout)
        for n in range(X.shape[0]):
            _nb_eval_point(exps, coeffs, owner, nout, X[n], buf)
            out[n, :] = buf
        return out

    @njit(cache=True)
    def _nb_rk4(exps, coeffs, owner, X0, dt, nsteps):
        X = X0.copy()
        k1 = np.empty(7)
        k2 = np.empty(7)
        k3 = np.empty(7)
        k4 = np.empty(7)
        y = np.empty(7)
        for n in range(X.shape[0]):
            x = X[n].copy()
            for _ in range(nsteps):
                _nb_eval_point(exps, coeffs, owner, 7, x, k1)
                for i in range(7):
                    y[i] = x[i] + 0.5 * dt * k1[i]
                _nb_eval_point(exps, coeffs, owner, 7, y, k2)
                for i in range(7):
                    y[i] = x[i] + 0.5 * dt * k2[i]
                _nb_eval_point(exps, coeffs, owner, 7, y, k3)
                for i in range(7):
                    y[i] = x[i] + dt * k3[i]
                _nb_eval_point(exps, coeffs, owner, 7, y, k4)
                for i in range(7):
                    x[i] += (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            X[n] = x
        return X

    @njit(cache=True)
    def _nb_qmul(p, q, out):
        a1, b1, c1, d1 = p[0], p[1], p[2], p[3]
        a2, b2, c2, d2 = q[0], q[1], q[2], q[3]
        out[0] = a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2
        out[1] = a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2
        out[2] = a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2
        out[3] = a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2

    @njit(cache=True)
    def _nb_word(A, letters, start, length, out):
        acc = np.array([1.0, 0.0, 0.0, 0.0])
        g = np.empty(4)
        tmp = np.empty(4)
        for t in range(start, start + length):
            lt = letters[t]
            row = abs(lt) - 1
            g[0] = A[row, 0]
            s = 1.0 if lt > 0 else -1.0
            g[1] = s * A[row, 1]
            g[2] = s * A[row, 2]
            g[3] = s * A[row, 3]
            _nb_qmul(acc, g, tmp)
            acc[:] = tmp
        nrm = np.sqrt(acc[0] ** 2 + acc[1] ** 2 + acc[2] ** 2 + acc[3] ** 2)
        for i in range(4):
            out[i] = acc[i] / nrm

    @njit(cache=True)
    def _nb_coords(A, out):
        a12 = np.empty(4)
        a13 = np.empty(4)
        a23 = np.empty(4)
        a123 = np.empty(4)
        _nb_qmul(A[0], A[1], a12)
        _nb_qmul(A[0], A[2], a13)
        _nb_qmul(A[1], A[2], a23)
        _nb_qmul(a12, A[2], a123)
        out[0] = 2 * a123[0]
        out[1] = 2 * A[0, 0]
        out[2] = 2 * A[1, 0]
        out[3] = 2 * A[2, 0]
        out[4] = 2 * a12[0]
        out[5] = 2 * a13[0]
        out[6] = 2 * a23[0]

    @njit(cache=True)
    def _nb_walk(A0, letters, starts, lengths, choices):
        A = A0.copy()
        B = np.empty_like(A)
        out = np.empty((choices.shape[0], 7))
        for step in range(choices.shape[0]):
            r = choices[step]
            for g in range(3):
                _nb_word(A, letters, starts[r, g], lengths[r, g], B[g])
            A[:, :] = B
            _nb_coords(A, out[step])
        return out, A

    @njit(cache=True)
    def _nb_apply_words(A0, letters, starts, lengths):
        B = np.empty_like(A0)
        for g in range(3):
            _nb_word(A0, letters, starts[g], lengths[g], B[g])
        return B


def eval_batch(exps, coeffs, owner, nout, X):
    if njit is not None:
        return _nb_eval_batch(exps, coeffs, owner, nout, X)
    return _np_eval_batch(exps, coeffs, owner, nout, X)


def rk4(system: PolySystem, X0, dt: float, nsteps: int):
    """Advance each row of ``X0`` by ``nsteps`` classical RK4 steps of the 7-component field."""
    X0 = np.ascontiguousarray(np.atleast_2d(np.asarray(X0, dtype=np.float64)))
    if njit is not None:
        return _nb_rk4(system.exps, system.coeffs, system.owner, X0, float(dt), int(nsteps))
    return _np_rk4(system.exps, system.coeffs, system.owner, X0, float(dt), int(nsteps))


def walk(A0, letters, starts, lengths, choices):
    """Apply rule ``choices[n]`` at step ``n``; returns (trace points, final tuple)."""
    A0 = np.ascontiguousarray(A0, dtype=np.float64)
    letters = np.ascontiguousarray(letters, dtype=np.int64)
    starts = np.ascontiguousarray(starts, dtype=np.int64)
    lengths = np.ascontiguousarray(lengths, dtype=np.int64)
    choices = np.ascontiguousarray(choices, dtype=np.int64)
    if njit is not None:
        return _nb_walk(A0, letters, starts, lengths, choices)
    return _np_walk(A0, letters, starts, lengths, choices)


def apply_words(A0, letters, starts, lengths):
    """Images of the three generators under one substitution rule."""
    A0 = np.ascontiguousarray(A0, dtype=np.float64)
    letters = np.ascontiguousarray(letters, dtype=np.int64)
    starts = np.ascontiguousarray(starts, dtype=np.int64)
    lengths = np.ascontiguousarray(lengths, dtype=np.int64)
    if njit is not None:
        return _nb_apply_words(A0, letters, starts, lengths)
    return _np_apply_words(A0, letters, starts, lengths)
