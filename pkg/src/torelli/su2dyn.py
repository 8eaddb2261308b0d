"""SU(2) representations, Dehn twists, Hamiltonian flows and random walks.

SU(2) elements are unit quaternions ``(a, b, c, d)``, identified with the
matrix ``[[a + bi, c + di], [-c + di, a - bi]]``, so the trace is ``2a``.
A representation is a ``RepTuple`` holding the images of F1, F2, F3.

Words in the free group are tuples of nonzero ints: ``g`` is generator
``F_g`` and ``-g`` its inverse.  A twist rule is a substitution
``F_i -> word_i``; it acts on representations by precomposition, so the new
image of ``F_i`` is the old representation evaluated on ``word_i``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np

from . import _kernels
from .charvar import SPHERE, check_boundary_value, get_surface, relation_k, surface_kind
from .poisson import ham_field
from .polyring import VAR_INDEX, VARS, Poly

# ---------------------------------------------------------------- quaternions


def qmul(p, q) -> np.ndarray:
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return np.array([
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ])


def qconj(q) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def qmatrix(q) -> np.ndarray:
    a, b, c, d = q
    return np.array([[a + 1j * b, c + 1j * d], [-c + 1j * d, a - 1j * b]])


def random_su2(rng) -> np.ndarray:
    """Haar-random unit quaternion."""
    q = rng.normal(size=4)
    return q / np.linalg.norm(q)


def su2_with_trace(trace: float, rng) -> np.ndarray:
    """Unit quaternion with the given trace and a uniformly random axis."""
    a = trace / 2.0
    u = rng.normal(size=3)
    u /= np.linalg.norm(u)
    return np.concatenate([[a], np.sqrt(max(0.0, 1.0 - a * a)) * u])


@dataclass(frozen=True)
class RepTuple:
    """Images ``(A1, A2, A3)`` of the free generators, as a (3, 4) quaternion array."""

    q: np.ndarray = field(repr=False)

    def __post_init__(self):
        q = np.array(self.q, dtype=np.float64).reshape(3, 4)
        q /= np.linalg.norm(q, axis=1, keepdims=True)
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    @classmethod
    def identity(cls) -> "RepTuple":
        return cls(np.tile([1.0, 0.0, 0.0, 0.0], (3, 1)))

    def matrices(self) -> list:
        return [qmatrix(a) for a in self.q]

    def __eq__(self, other):
        return isinstance(other, RepTuple) and np.array_equal(self.q, other.q)

    def __hash__(self):
        return hash(self.q.tobytes())


# ---------------------------------------------------------------- words


def free_reduce(word) -> tuple:
    out: list = []
    for g in word:
        if g == 0 or abs(g) > 3:
            raise ValueError(f"bad letter {g!r}; letters are +-1, +-2, +-3")
        if out and out[-1] == -g:
            out.pop()
        else:
            out.append(g)
    return tuple(out)


def invert_word(word) -> tuple:
    return tuple(-g for g in reversed(word))


def substitute(word, images) -> tuple:
    """Image of ``word`` under the substitution ``F_i -> images[i-1]``."""
    out: list = []
    for g in word:
        w = images[abs(g) - 1]
        out.extend(w if g > 0 else invert_word(w))
    return free_reduce(out)


def compose(outer, inner) -> tuple:
    """Substitution ``outer o inner``: generator ``F_i`` goes to ``outer(inner(F_i))``."""
    return tuple(substitute(w, outer) for w in inner)


def conjugate(c, word) -> tuple:
    return free_reduce(tuple(c) + tuple(word) + invert_word(c))


def eval_word(word, r: RepTuple) -> np.ndarray:
    acc = np.array([1.0, 0.0, 0.0, 0.0])
    for g in word:
        a = r.q[abs(g) - 1]
        acc = qmul(acc, a if g > 0 else qconj(a))
    return acc


def word_trace(word, r: RepTuple) -> float:
    return 2.0 * eval_word(word, r)[0]


def word_text(word) -> str:
    return "".join(f"F{abs(g)}" + ("^-1" if g < 0 else "") for g in word) or "1"


# ---------------------------------------------------------------- twist rules


class TwistValidationError(ValueError):
    pass


@dataclass(frozen=True)
class TwistRule:
    """Free-group automorphism realizing a Dehn twist."""

    name: str
    images: tuple
    inverse_images: tuple
    curve: tuple
    description: str = ""

    def inverse(self) -> "TwistRule":
        name = self.name[:-3] if self.name.endswith("^-1") else self.name + "^-1"
        return TwistRule(name, self.inverse_images, self.images, self.curve, self.description)

    def is_automorphism(self) -> bool:
        ident = ((1,), (2,), (3,))
        return (
            compose(self.images, self.inverse_images) == ident
            and compose(self.inverse_images, self.images) == ident
        )

    def flat(self):
        """(letters, starts, lengths) arrays consumed by the kernels."""
        letters, starts, lengths = [], [], []
        for w in self.images:
            starts.append(len(letters))
            lengths.append(len(w))
            letters.extend(w)
        return np.array(letters, np.int64), np.array(starts, np.int64), np.array(lengths, np.int64)


def _conj_rule(name, c, conj_gens, other_gen, other_tail, curve, description):
    """Conjugate ``conj_gens`` by ``c``; the remaining generator keeps a fixed boundary word.

    ``other_tail`` is the word expressing the remaining generator through the
    conjugated ones and a fixed word: generator = other_tail[0] * other_tail[1],
    where the first part is conjugated and the second is left alone.
    """

    def build(cw):
        images = [None, None, None]
        for g in conj_gens:
            images[g - 1] = conjugate(cw, (g,))
        if other_gen is not None:
            head, fixed = other_tail
            images[other_gen - 1] = free_reduce(conjugate(cw, head) + tuple(fixed))
        for i in range(3):
            if images[i] is None:
                images[i] = (i + 1,)
        return tuple(images)

    return TwistRule(name, build(c), build(invert_word(c)), tuple(curve), description)


def _sphere_rules() -> dict:
    t12 = _conj_rule(
        "tau12", (1, 2), (1, 2), None, None, (1, 2),
        "twist along F1F2: conjugate F1, F2 by F1F2",
    )
    c, d = (2, 3, 1, -3), (-3, 2, 3, 1)
    images = (conjugate(d, (1,)), conjugate(c, (2,)), (3,))
    inverse = (conjugate(invert_word(d), (1,)), conjugate(invert_word(c), (2,)), (3,))
    t0 = TwistRule(
        "tau0", images, inverse, (1, -3, 2, 3),
        "twist along F0 = F1F3^-1F2F3: conjugate F1 by F3^-1F2F3F1 and F2 by F2F3F1F3^-1",
    )
    return {"tau12": t12, "tau0": t0}


_T = ((1,), (2, 1), (-1, 3))
_T_INV = ((1,), (2, -1), (1, 3))


def _torus_rules() -> dict:
    g12 = (1, 2, -1, -2)
    g13 = (1, 3, -1, -3)
    d23 = (-2, -3, 2, 3)
    t12 = _conj_rule(
        "tau12", g12, (1, 2), 3, ((-2, -1), (1, 2, 3)), g12,
        "twist along [F1,F2]: conjugate F1, F2 by the commutator, fix F1F2F3",
    )
    t13 = _conj_rule(
        "tau13", g13, (1, 3), 2, ((-3, -1), (1, 3, 2)), g13,
        "twist along [F1,F3]: conjugate F1, F3 by the commutator, fix F1F3F2",
    )
    # F1 = (F1F3F2) F2^-1 F3^-1 with F1F3F2 fixed
    t23_images = (
        free_reduce((1, 3, 2) + conjugate(d23, (-2, -3))),
        conjugate(d23, (2,)),
        conjugate(d23, (3,)),
    )
    di = invert_word(d23)
    t23_inverse = (
        free_reduce((1, 3, 2) + conjugate(di, (-2, -3))),
        conjugate(di, (2,)),
        conjugate(di, (3,)),
    )
    t23 = TwistRule(
        "tau23", t23_images, t23_inverse, (2, 3, -2, -3),
        "twist along [F2,F3]: conjugate F2, F3 by F2^-1F3^-1F2F3, fix F1F3F2",
    )
    # F0 is the image of [F2,F3] under T: F2 -> F2F1, F3 -> F1^-1F3
    t0 = TwistRule(
        "tau0",
        compose(_T, compose(t23.images, _T_INV)),
        compose(_T, compose(t23.inverse_images, _T_INV)),
        substitute((2, 3, -2, -3), _T),
        "tau23 conjugated by T: F1 -> F1, F2 -> F2F1, F3 -> F1^-1F3",
    )
    return {"tau12": t12, "tau23": t23, "tau13": t13, "tau0": t0}


def validate_rule(surface, rule: TwistRule, trials: int = 1000, seed: int = 0) -> dict:
    """Worst-case errors of ``rule`` over random representations.

    Checks that the rule is a free-group automorphism, that boundary traces
    and the curve's own trace are preserved, and that the relation still
    vanishes at the image.  Raises ``TwistValidationError`` on failure.
    """
    surf = get_surface(surface_kind(surface))
    if not rule.is_automorphism():
        raise TwistValidationError(f"{rule.name}: supplied inverse does not invert the substitution")
    rng = np.random.default_rng(seed)
    k = _kernels.PolySystem([relation_k()])
    letters, starts, lengths = rule.flat()
    worst = {"boundary": 0.0, "curve": 0.0, "k": 0.0}
    for _ in range(trials):
        r = RepTuple(np.array([random_su2(rng) for _ in range(3)]))
        r2 = RepTuple(_kernels.apply_words(r.q, letters, starts, lengths))
        for w in surf.boundary_words:
            worst["boundary"] = max(worst["boundary"], float(abs(word_trace(w, r2) - word_trace(w, r))))
        worst["curve"] = max(worst["curve"], float(abs(word_trace(rule.curve, r2) - word_trace(rule.curve, r))))
        worst["k"] = max(worst["k"], float(abs(k(trace_coords(r2))[0])))
    if worst["boundary"] > 1e-12 or worst["curve"] > 1e-12 or worst["k"] > 1e-10:
        raise TwistValidationError(f"{rule.name} on {surf.name} fails invariance: {worst}")
    return worst


@lru_cache(maxsize=None)
def twist_table(surface) -> dict:
    """Validated generators of the twist group, keyed by name."""
    kind = surface_kind(surface)
    rules = _sphere_rules() if kind is SPHERE else _torus_rules()
    for rule in rules.values():
        validate_rule(kind, rule)
    return rules


def get_rule(surface, name: str) -> TwistRule:
    table = twist_table(surface)
    base = name[:-3] if name.endswith("^-1") else name
    if base not in table:
        raise ValueError(f"unknown twist {name!r}; available: {', '.join(table)}")
    rule = table[base]
    return rule.inverse() if name.endswith("^-1") else rule


# ---------------------------------------------------------------- coordinates


def trace_coords(r: RepTuple) -> np.ndarray:
    """``(t4, t1, t2, t3, t12, t13, t23)`` with ``t4 = tr(A1 A2 A3)``."""
    A1, A2, A3 = r.q
    A12 = qmul(A1, A2)
    return 2.0 * np.array([
        qmul(A12, A3)[0], A1[0], A2[0], A3[0], A12[0], qmul(A1, A3)[0], qmul(A2, A3)[0],
    ])


def random_rep(rng) -> RepTuple:
    return RepTuple(np.array([random_su2(rng) for _ in range(3)]))


def identity_error(p: Poly, word, trials: int = 1000, seed: int = 0) -> float:
    """Largest ``|p(trace_coords(r)) - tr(r(word))|`` over Haar-random tuples."""
    rng = np.random.default_rng(seed)
    sys_ = _kernels.PolySystem([p])
    worst = 0.0
    for _ in range(trials):
        r = random_rep(rng)
        worst = max(worst, abs(sys_(trace_coords(r))[0] - word_trace(word, r)))
    return worst


def identity_test(p: Poly, word, trials: int = 1000, seed: int = 0, tol: float = 1e-9) -> bool:
    """Randomized check that ``p`` equals the trace of ``word`` on SU(2) characters."""
    return identity_error(p, word, trials, seed) < tol


# ---------------------------------------------------------------- sampling


class InfeasibleBoundary(ValueError):
    """No representation with the requested boundary traces was found."""


def _solve_on_sphere(rows, rhs, rng):
    """Uniform point on ``{x in S^3 : rows @ x = rhs}`` or None if empty."""
    M = np.asarray(rows, dtype=np.float64)
    x0, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    if np.linalg.norm(M @ x0 - rhs) > 1e-12:
        return None
    rho2 = 1.0 - x0 @ x0
    if rho2 < 0:
        return None
    _, sv, vt = np.linalg.svd(M)
    rank = int((sv > 1e-12).sum())
    null = vt[rank:]
    v = rng.normal(size=len(null))
    v /= np.linalg.norm(v)
    return x0 + np.sqrt(rho2) * (v @ null)


def sample_rep(surface, c, seed: int = 0, max_attempts: int = 10_000) -> RepTuple:
    """Random representation whose boundary traces equal ``c``.

    A1, A2 are drawn first (with prescribed traces on the sphere, Haar on
    the torus); the remaining conditions are linear in the quaternion A3, so
    A3 is drawn uniformly on the circle they cut out of the unit sphere.
    """
    kind = surface_kind(surface)
    c = np.array(check_boundary_value(kind, c))
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        if kind is SPHERE:
            A1, A2 = su2_with_trace(c[0], rng), su2_with_trace(c[1], rng)
            P = qmul(A1, A2)
            rows = [[1.0, 0.0, 0.0, 0.0], qconj(P)]
            rhs = np.array([c[2] / 2.0, c[3] / 2.0])
        else:
            A1, A2 = random_su2(rng), random_su2(rng)
            # Re(A1 A2 x) = c1/2 and Re(A1 x A2) = Re(A2 A1 x) = c2/2
            rows = [qconj(qmul(A1, A2)), qconj(qmul(A2, A1))]
            rhs = np.array([c[0] / 2.0, c[1] / 2.0])
        A3 = _solve_on_sphere(rows, rhs, rng)
        if A3 is None:
            continue
        r = RepTuple(np.array([A1, A2, A3]))
        res = boundary_residual_rep(kind, c, r)
        if np.max(np.abs(res)) < 1e-10:
            return r
    raise InfeasibleBoundary(f"no representation with boundary traces {tuple(c)} after {max_attempts} attempts")


def boundary_residual_rep(surface, c, r: RepTuple) -> np.ndarray:
    surf = get_surface(surface_kind(surface))
    vals = [word_trace(w, r) - ci for w, ci in zip(surf.boundary_words, c)]
    return np.array(vals)


# ---------------------------------------------------------------- twists and walks


def apply_twist(surface, rule, r: RepTuple) -> RepTuple:
    if isinstance(rule, str):
        rule = get_rule(surface, rule)
    letters, starts, lengths = rule.flat()
    return RepTuple(_kernels.apply_words(r.q, letters, starts, lengths))


@dataclass(frozen=True)
class WalkResult:
    points: np.ndarray = field(repr=False)
    gens: tuple = field(repr=False)
    final: RepTuple = field(repr=False)

    def __len__(self):
        return len(self.points)

    def jsonl_rows(self):
        for n, (x, g) in enumerate(zip(self.points, self.gens)):
            yield {"step": n + 1, "x": [float(v) for v in x], "gen": g}


def walk(surface, r0: RepTuple, gens=None, steps: int = 1000, seed: int = 0, inverses: bool = True) -> WalkResult:
    """Random walk choosing uniformly among ``gens`` and (by default) their inverses."""
    if steps < 1:
        raise ValueError("steps must be at least 1")
    table = twist_table(surface)
    names = list(table) if gens is None else [g.name if isinstance(g, TwistRule) else g for g in gens]
    rules = [get_rule(surface, n) for n in names]
    if inverses:
        rules = rules + [r.inverse() for r in rules]
    letters, starts, lengths = [], [], []
    for rule in rules:
        lt, st, ln = rule.flat()
        starts.append(st + len(letters))
        lengths.append(ln)
        letters.extend(lt.tolist())
    rng = np.random.default_rng(seed)
    choices = rng.integers(0, len(rules), size=steps)
    pts, final = _kernels.walk(
        r0.q, np.array(letters, np.int64), np.array(starts), np.array(lengths), choices
    )
    rule_names = tuple(rules[i].name for i in choices)
    return WalkResult(points=pts, gens=rule_names, final=RepTuple(final))


# ---------------------------------------------------------------- flows


class FlowError(RuntimeError):
    pass


def _constraints(surface):
    surf = get_surface(surface_kind(surface))
    return list(surf.boundary_functions) + [relation_k()]


def flow(
    surface,
    x,
    f: Poly,
    T: float = 1.0,
    dt: float = 1e-3,
    project: bool = False,
    variant: str = "goldman",
    record_every: int | None = None,
    tol: float = 1e-6,
) -> np.ndarray:
    """RK4 integration of the Hamiltonian field of ``f`` from ``x``.

    ``x`` is one point (shape (7,)) or a batch (shape (n, 7)).  Returns the
    trajectory with shape (m, 7) or (m, n, 7), where ``m`` counts the
    recorded states including the start.  With ``project`` each step is
    followed by a Newton projection back onto the level set of the
    boundary functions and ``k``.  Without projection, a constraint drift
    above ``tol`` raises ``FlowError``.
    """
    X = np.atleast_2d(np.asarray(x, dtype=np.float64)).copy()
    single = np.asarray(x).ndim == 1
    nsteps = int(round(T / dt))
    field_sys = _kernels.PolySystem(ham_field(surface, f, variant).comps)
    cons = _constraints(surface)
    cons_sys = _kernels.PolySystem(cons)
    grad_sys = _kernels.PolySystem([g for p in cons for g in p.gradient()])
    target = cons_sys(X)
    target[:, -1] = 0.0
    every = record_every or nsteps
    traj = [X.copy()]
    done = 0
    while done < nsteps:
        chunk = 1 if project else min(every - done % every, nsteps - done)
        X = _kernels.rk4(field_sys, X, dt, chunk)
        done += chunk
        if project:
            X = _project(X, cons_sys, grad_sys, target)
        else:
            drift = np.max(np.abs(cons_sys(X) - target))
            if drift > tol:
                raise FlowError(f"constraint residual {drift:.3e} exceeds {tol:g} at t={done * dt:g}")
        if done % every == 0 or done == nsteps:
            traj.append(X.copy())
    out = np.array(traj)
    return out[:, 0, :] if single else out


def _project(X, cons_sys, grad_sys, target, iters: int = 4):
    m = cons_sys.nout
    for _ in range(iters):
        r = cons_sys(X) - target
        if np.max(np.abs(r)) < 1e-14:
            break
        J = grad_sys(X).reshape(len(X), m, 7)
        JJt = J @ J.transpose(0, 2, 1)
        lam = np.linalg.solve(JJt, r[:, :, None])
        X = X - (J.transpose(0, 2, 1) @ lam)[:, :, 0]
    return X


# ---------------------------------------------------------------- sphere Liouville sampler


def liouville_sample_4hs(c, n: int, seed: int = 0, max_proposals: int | None = None) -> np.ndarray:
    """Points of the sphere leaf distributed by the Liouville measure.

    In the (t12, t23) chart the density is ``sum over branches of
    1/|dk/dt13|``.  Integrating over t23 leaves the arcsine law for t12, and
    conditionally on t12 each branch is uniform in the angle of the
    t23-interval, so both are drawn exactly; proposals whose conic slice is
    empty or leaves the cube are rejected.
    """
    t1, t2, t3, t4 = check_boundary_value(SPHERE, c)
    c12 = t1 * t2 + t3 * t4
    c23 = t2 * t3 + t1 * t4
    c13 = t1 * t3 + t2 * t4
    c0 = 4 - t1**2 - t2**2 - t3**2 - t4**2 - t1 * t2 * t3 * t4
    rng = np.random.default_rng(seed)
    max_proposals = max_proposals or 200 * n + 10_000
    out = []
    proposals = 0
    while len(out) < n:
        if proposals >= max_proposals:
            raise InfeasibleBoundary(
                f"Liouville sampler accepted {len(out)} of {proposals} proposals for c={tuple(c)}"
            )
        m = max(1024, 2 * (n - len(out)))
        proposals += m
        t12 = 2.0 * np.cos(rng.uniform(0.0, np.pi, m))
        # disc(t23) = (t12 t23 - c13)^2 - 4 (t12^2 + t23^2 - c12 t12 - c23 t23 - c0)
        A = t12**2 - 4.0
        B = -2.0 * t12 * c13 + 4.0 * c23
        C = c13**2 - 4.0 * (t12**2 - c12 * t12 - c0)
        dd = B * B - 4.0 * A * C
        ok = (dd > 0) & (A < 0)
        root = np.sqrt(np.where(ok, dd, 0.0))
        lo = np.where(ok, (-B + root) / (2.0 * A), 0.0)
        hi = np.where(ok, (-B - root) / (2.0 * A), 0.0)
        theta = rng.uniform(0.0, np.pi, m)
        t23 = 0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos(theta)
        disc = np.maximum((t12 * t23 - c13) ** 2 - 4.0 * (t12**2 + t23**2 - c12 * t12 - c23 * t23 - c0), 0.0)
        sign = np.where(rng.random(m) < 0.5, -1.0, 1.0)
        t13 = 0.5 * (-(t12 * t23 - c13) + sign * np.sqrt(disc))
        pts = np.column_stack([
            np.full(m, t4), np.full(m, t1), np.full(m, t2), np.full(m, t3), t12, t13, t23,
        ])
        keep = ok & np.all(np.abs(pts) <= 2.0, axis=1)
        out.extend(pts[keep])
    return np.array(out[:n])


# ---------------------------------------------------------------- histograms


@dataclass(frozen=True)
class Hist:
    counts: np.ndarray = field(repr=False)
    coords: tuple
    bins: int
    lo: float = -2.0
    hi: float = 2.0

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def spec(self):
        return (self.coords, self.bins, self.lo, self.hi)

    def edges(self):
        return np.linspace(self.lo, self.hi, self.bins + 1)


def histogram(points, bins: int = 20, coords=("t12", "t13", "t23"), lo: float = -2.0, hi: float = 2.0) -> Hist:
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    coords = tuple(coords)
    idx = [VAR_INDEX[c] for c in coords]
    # points on the cube boundary (up to rounding) land in the outer bins
    data = np.clip(pts[:, idx], lo, hi)
    counts, _ = np.histogramdd(data, bins=[bins] * len(idx), range=[(lo, hi)] * len(idx))
    return Hist(counts.astype(np.int64), coords, bins, lo, hi)


def tv(h1: Hist, h2: Hist) -> float:
    """Total variation distance of the normalized histograms."""
    if h1.spec() != h2.spec():
        raise ValueError(f"histogram specs differ: {h1.spec()} vs {h2.spec()}")
    if h1.total == 0 or h2.total == 0:
        raise ValueError("cannot compare an empty histogram")
    p = h1.counts / h1.total
    q = h2.counts / h2.total
    return float(0.5 * np.abs(p - q).sum())


def write_hist_csv(h: Hist, path) -> None:
    edges = h.edges()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_index"] + [f"{c}_{e}" for c in h.coords for e in ("lo", "hi")] + ["count"])
        for flat, multi in enumerate(product(range(h.bins), repeat=len(h.coords))):
            ranges = []
            for i in multi:
                ranges += [repr(float(edges[i])), repr(float(edges[i + 1]))]
            w.writerow([flat] + ranges + [int(h.counts[multi])])


def read_hist_csv(path) -> Hist:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    if header[0] != "bin_index" or header[-1] != "count" or (len(header) - 2) % 2:
        raise ValueError(f"{path}: not a histogram CSV")
    coords = tuple(h[: -len("_lo")] for h in header[1:-1:2])
    ncoords = len(coords)
    bins = round(len(body) ** (1.0 / ncoords))
    if bins**ncoords != len(body):
        raise ValueError(f"{path}: {len(body)} rows do not form a {ncoords}-dimensional grid")
    lo = float(body[0][1])
    hi = float(body[-1][2 * ncoords])
    counts = np.array([int(r[-1]) for r in body], dtype=np.int64).reshape((bins,) * ncoords)
    return Hist(counts, coords, bins, lo, hi)


def write_jsonl(rows, path) -> int:
    n = 0
    with open(path, "w") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")
            n += 1
    return n


def read_jsonl_points(path) -> np.ndarray:
    with open(path) as fh:
        return np.array([json.loads(line)["x"] for line in fh if line.strip()])


__all__ = [
    "FlowError",
    "Hist",
    "InfeasibleBoundary",
    "RepTuple",
    "TwistRule",
    "TwistValidationError",
    "VARS",
    "WalkResult",
    "apply_twist",
    "boundary_residual_rep",
    "compose",
    "eval_word",
    "flow",
    "free_reduce",
    "histogram",
    "identity_test",
    "invert_word",
    "liouville_sample_4hs",
    "read_hist_csv",
    "read_jsonl_points",
    "sample_rep",
    "substitute",
    "trace_coords",
    "tv",
    "twist_table",
    "walk",
    "write_hist_csv",
    "write_jsonl",
]
