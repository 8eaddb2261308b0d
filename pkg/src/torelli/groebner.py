"""Buchberger's algorithm over Q in the seven trace variables.

Internally a monomial is packed into one Python int (16 bits per exponent,
plus a total-degree field for grevlex) so that monomial multiplication is
integer addition, comparison under the chosen order is integer comparison
of ``key(m)``, and divisibility is a guard-bit test.  Coefficients are
``gmpy2.mpq`` when available, ``fractions.Fraction`` otherwise.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .polyring import NVARS, Poly

try:  # pragma: no cover - exercised implicitly
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

_FIELD = 16
_MAXEXP = (1 << (_FIELD - 1)) - 1

DEFAULT_MAX_STEPS = 10**6
DEFAULT_MAX_PAIRS = 10**5


class BudgetExceeded(RuntimeError):
    """Raised when Buchberger or a reduction runs past its step/pair budget."""

    def __init__(self, msg, stats=None):
        super().__init__(msg)
        self.stats = stats or {}


class _Encoding:
    """Packing of exponent vectors for one monomial order."""

    def __init__(self, order):
        if order == "grevlex":
            # var i at field i (t4 least significant), degree on top
            self.shifts = [_FIELD * i for i in range(NVARS)]
            self.deg_shift = _FIELD * NVARS
            self.flip = (1 << self.deg_shift) - 1
        elif order == "lex":
            # t4 most significant
            self.shifts = [_FIELD * (NVARS - 1 - i) for i in range(NVARS)]
            self.deg_shift = None
            self.flip = 0
        else:
            raise ValueError(f"unknown monomial order {order!r}")
        self.order = order
        nfields = NVARS + (1 if self.deg_shift is not None else 0)
        self.guard = sum(1 << (_FIELD * i + _FIELD - 1) for i in range(nfields))
        self.emask = (1 << _FIELD) - 1

    def encode(self, exps) -> int:
        m = 0
        for e, s in zip(exps, self.shifts):
            if e > _MAXEXP:
                raise OverflowError("exponent too large for packed monomials")
            m |= e << s
        if self.deg_shift is not None:
            m |= sum(exps) << self.deg_shift
        return m

    def decode(self, m) -> tuple:
        em = self.emask
        return tuple((m >> s) & em for s in self.shifts)

    def key(self, m) -> int:
        return m ^ self.flip

    def divides(self, a, b) -> bool:
        g = self.guard
        return ((b | g) - a) & g == g

    def lcm(self, a, b) -> int:
        return self.encode(tuple(max(x, y) for x, y in zip(self.decode(a), self.decode(b))))

    def to_internal(self, p: Poly) -> dict:
        return {self.encode(m): _Q(c.numerator, c.denominator) for m, c in p.terms.items()}

    def to_poly(self, d: dict) -> Poly:
        return Poly({self.decode(m): Fraction(int(c.numerator), int(c.denominator)) for m, c in d.items()})


_ENCODINGS: dict = {}


def _encoding(order) -> _Encoding:
    enc = _ENCODINGS.get(order)
    if enc is None:
        enc = _ENCODINGS[order] = _Encoding(order)
    return enc


class _Basis:
    """Monic polynomial stored as leading monomial plus descending tail."""

    __slots__ = ("lm", "tail")

    def __init__(self, d: dict, enc: _Encoding):
        items = sorted(d.items(), key=lambda mc: enc.key(mc[0]), reverse=True)
        lm, lc = items[0]
        inv = 1 / lc
        self.lm = lm
        self.tail = [(m, c * inv) for m, c in items[1:]]

    def as_dict(self) -> dict:
        d = {m: c for m, c in self.tail}
        d[self.lm] = _Q(1)
        return d


class _Counter:
    __slots__ = ("steps", "max_steps")

    def __init__(self, max_steps):
        self.steps = 0
        self.max_steps = max_steps


def _reduce(f: dict, basis: list, enc: _Encoding, counter: _Counter | None = None) -> dict:
    """Full reduction of ``f`` (packed dict) by monic ``basis``; returns the remainder."""
    f = dict(f)
    key = enc.key
    flip = enc.flip
    g = enc.guard
    heap = [-key(m) for m in f]
    heapq.heapify(heap)
    push = heapq.heappush
    pop = heapq.heappop
    rem = {}
    lms = [(b.lm, b.tail) for b in basis]
    while heap:
        m = (-pop(heap)) ^ flip
        c = f.pop(m, None)
        if c is None:
            continue
        mg = m | g
        for lm, tail in lms:
            if (mg - lm) & g == g:
                q = m - lm
                for tm, tc in tail:
                    mm = tm + q
                    v = f.get(mm)
                    if v is None:
                        f[mm] = -c * tc
                        push(heap, -(mm ^ flip))
                    else:
                        v = v - c * tc
                        if v:
                            f[mm] = v
                        else:
                            del f[mm]
                if counter is not None:
                    counter.steps += 1
                    if counter.steps > counter.max_steps:
                        raise BudgetExceeded(f"reduction step budget of {counter.max_steps} exhausted")
                break
        else:
            rem[m] = c
    return rem


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced Gröbner basis with monic elements, sorted by descending leading monomial."""

    basis: tuple
    order: str = "grevlex"
    stats: dict = field(default_factory=dict, compare=False, repr=False)

    def __len__(self):
        return len(self.basis)

    def __iter__(self):
        return iter(self.basis)

    def _internal(self):
        enc = _encoding(self.order)
        return enc, [_Basis(enc.to_internal(p), enc) for p in self.basis]

    def leading_monomials(self):
        return [p.leading_monomial(self.order) for p in self.basis]


def _spoly(a: _Basis, b: _Basis, enc: _Encoding) -> dict:
    L = enc.lcm(a.lm, b.lm)
    qa, qb = L - a.lm, L - b.lm
    d = {}
    for m, c in a.tail:
        d[m + qa] = c
    for m, c in b.tail:
        mm = m + qb
        v = d.get(mm, 0) - c
        if v:
            d[mm] = v
        else:
            d.pop(mm, None)
    return d


def _gm_update(G, pairs: dict, h_idx, enc) -> dict:
    """Gebauer-Möller installation of a new basis element.

    ``pairs`` maps index pairs to the lcm of their leading monomials.
    """
    lcm, divides = enc.lcm, enc.divides
    h = G[h_idx].lm
    kept = {}
    for (i, j), L in pairs.items():
        # chain criterion: lm(h) strictly inside the lcm makes the pair redundant
        if divides(h, L) and L != lcm(G[i].lm, h) and L != lcm(G[j].lm, h):
            continue
        kept[(i, j)] = L
    by_lcm: dict = {}
    for i in range(h_idx):
        by_lcm.setdefault(lcm(G[i].lm, h), []).append(i)
    minimal = []
    for L in sorted(by_lcm, key=enc.key):
        if all(not divides(M, L) for M in minimal):
            minimal.append(L)
    for L in minimal:
        idxs = by_lcm[L]
        # product criterion
        if any(L == G[i].lm + h for i in idxs):
            continue
        kept[(min(idxs), h_idx)] = L
    return kept


def buchberger(
    generators,
    order: str = "grevlex",
    max_steps: int = DEFAULT_MAX_STEPS,
    max_pairs: int = DEFAULT_MAX_PAIRS,
) -> GroebnerBasis:
    """Reduced Gröbner basis of the ideal generated by ``generators``.

    Pairs are processed in the normal strategy (smallest lcm first, ties by
    index) after Buchberger's criteria; the result depends only on the input
    list, order and budget.
    """
    gens = [g for g in generators if not g.is_zero()]
    if not gens:
        raise ValueError("ideal needs at least one nonzero generator")
    enc = _encoding(order)
    t0 = time.perf_counter()
    counter = _Counter(max_steps)
    G: list = []
    pairs: dict = {}
    npairs = 0
    for p in gens:
        d = _reduce(enc.to_internal(p), G, enc, counter)
        if d:
            G.append(_Basis(d, enc))
            pairs = _gm_update(G, pairs, len(G) - 1, enc)
    while pairs:
        i, j = min(pairs, key=lambda ij: (enc.key(pairs[ij]), ij))
        del pairs[(i, j)]
        npairs += 1
        if npairs > max_pairs:
            raise BudgetExceeded(
                f"pair budget of {max_pairs} exhausted",
                {"pairs": npairs, "steps": counter.steps, "basis": len(G)},
            )
        s = _spoly(G[i], G[j], enc)
        try:
            r = _reduce(s, G, enc, counter)
        except BudgetExceeded as exc:
            exc.stats = {"pairs": npairs, "steps": counter.steps, "basis": len(G)}
            raise
        if r:
            G.append(_Basis(r, enc))
            pairs = _gm_update(G, pairs, len(G) - 1, enc)
    # minimalize then interreduce
    lms = [b.lm for b in G]
    keep = []
    for idx, b in enumerate(G):
        if any(
            enc.divides(lms[o], b.lm) and (lms[o] != b.lm or o < idx)
            for o in range(len(G))
            if o != idx
        ):
            continue
        keep.append(b)
    reduced = []
    for idx, b in enumerate(keep):
        others = keep[:idx] + keep[idx + 1:]
        tail = _reduce(dict(b.tail), others, enc)
        tail[b.lm] = _Q(1)
        reduced.append(_Basis(tail, enc))
    reduced.sort(key=lambda b: enc.key(b.lm), reverse=True)
    polys = tuple(enc.to_poly(b.as_dict()) for b in reduced)
    stats = {
        "pairs": npairs,
        "steps": counter.steps,
        "basis": len(polys),
        "seconds": time.perf_counter() - t0,
    }
    return GroebnerBasis(polys, order, stats)


def normal_form(f: Poly, gb: GroebnerBasis, max_steps: int | None = None) -> Poly:
    """Remainder of ``f`` on division by ``gb``; zero exactly when ``f`` is in the ideal."""
    if f.is_zero():
        return f
    enc, basis = gb._internal()
    counter = _Counter(max_steps) if max_steps is not None else None
    return enc.to_poly(_reduce(enc.to_internal(f), basis, enc, counter))


def normal_form_ideal(f: Poly, generators, order="grevlex") -> Poly:
    return normal_form(f, buchberger(generators, order))


def s_polynomial(a: Poly, b: Poly, order="grevlex") -> Poly:
    enc = _encoding(order)
    return enc.to_poly(_spoly(_Basis(enc.to_internal(a), enc), _Basis(enc.to_internal(b), enc), enc))


def is_groebner(gb: GroebnerBasis) -> bool:
    """Every S-polynomial of basis pairs reduces to zero."""
    enc, basis = gb._internal()
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            if _reduce(_spoly(basis[i], basis[j], enc), basis, enc):
                return False
    return True


def contains(gb: GroebnerBasis, f: Poly) -> bool:
    return normal_form(f, gb).is_zero()


# ---------------------------------------------------------------- certificates


@dataclass(frozen=True)
class ResidueCheck:
    """Normal form of the target modulo one ideal ``(k, g)``."""

    label: str
    gb: GroebnerBasis = field(repr=False)
    residue: Poly = field(repr=False)
    witness: tuple | None = None
    seconds: float = 0.0

    @property
    def nonzero(self) -> bool:
        return not self.residue.is_zero()


@dataclass(frozen=True)
class Certificate:
    """Record of a non-tangency check: the field's derivative of ``s`` is not in ``(k, s)``.

    On the torus, when ``s`` splits, the check runs once per factor.
    """

    surface: str
    order: str
    variant: str
    s: Poly = field(repr=False)
    h12s: Poly = field(repr=False)
    checks: tuple = field(repr=False)
    factors: tuple | None = field(default=None, repr=False)
    factor_source: str = "none"
    timings: dict = field(default_factory=dict, repr=False)

    @property
    def verdict(self) -> bool:
        return all(c.nonzero for c in self.checks)

    @property
    def residue(self) -> Poly:
        return self.checks[0].residue

    @property
    def gb_size(self) -> int:
        return len(self.checks[0].gb)

    @property
    def witness(self):
        return self.checks[0].witness

    def to_json(self) -> dict:
        return {
            "surface": self.surface,
            "order": self.order,
            "variant": self.variant,
            "verdict": self.verdict,
            "gb_size": self.gb_size,
            "residue_nonzero": self.verdict,
            "witness": list(self.witness) if self.witness is not None else None,
            "split": self.factors is not None,
            "factor_source": self.factor_source,
            "checks": [
                {
                    "ideal": c.label,
                    "gb_size": len(c.gb),
                    "residue_nonzero": c.nonzero,
                    "residue_terms": len(c.residue.terms),
                    "witness": list(c.witness) if c.witness is not None else None,
                    "pairs": c.gb.stats.get("pairs"),
                    "steps": c.gb.stats.get("steps"),
                    "seconds": round(c.seconds, 6),
                }
                for c in self.checks
            ],
            "s_terms": len(self.s.terms),
            "s_degree": self.s.total_degree(),
            "timings": {k: round(v, 6) for k, v in self.timings.items()},
        }


def _find_split(s: Poly):
    from .locus import try_quadratic_split
    from .polyring import VARS

    for v in VARS:
        pair = try_quadratic_split(s, v)
        if pair is not None:
            return pair
    return None


def transversality_certificate(
    surface,
    order: str = "grevlex",
    max_steps: int = DEFAULT_MAX_STEPS,
    max_pairs: int = DEFAULT_MAX_PAIRS,
    variant: str = "goldman",
    field=None,
    factors=None,
    witness: bool = True,
    seed: int = 0,
) -> Certificate:
    """Check that the p12 twist field is not tangent to the dependency locus.

    ``field`` replaces the Hamiltonian field of p12 (a zero field is the
    negative control).  ``factors`` supplies a factorization of ``s`` to use
    when the quadratic split heuristic finds none; it is verified exactly.
    Raises ``BudgetExceeded`` when a Gröbner computation runs out of budget.
    """
    from .charvar import SPHERE, relation_k, surface_kind, trace_fn
    from .locus import dependency_poly
    from .poisson import apply_field, ham_field

    kind = surface_kind(surface)
    timings = {}
    t0 = time.perf_counter()
    s = dependency_poly(kind).s
    timings["dependency"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    v = field if field is not None else ham_field(kind, trace_fn(kind, "p12"), variant)
    h = apply_field(v, s)
    timings["field"] = time.perf_counter() - t0
    k = relation_k()

    pair, source = None, "none"
    if kind is not SPHERE:
        t0 = time.perf_counter()
        pair = _find_split(s)
        timings["split"] = time.perf_counter() - t0
        if pair is not None:
            source = "quadratic-split"
        elif factors is not None:
            f1, f2 = factors
            if f1 * f2 != s:
                raise ValueError("supplied factors do not multiply to s")
            pair, source = (f1, f2), "supplied"
    ideals = [("k,s1", pair[0]), ("k,s2", pair[1])] if pair else [("k,s", s)]

    checks = []
    for i, (label, g) in enumerate(ideals):
        t0 = time.perf_counter()
        gb = buchberger([k, g], order, max_steps=max_steps, max_pairs=max_pairs)
        res = normal_form(h, gb, max_steps=max_steps)
        w = None
        if witness and not res.is_zero():
            w = numeric_witness(k, g, h, seed=seed + i)
        checks.append(ResidueCheck(label, gb, res, w, time.perf_counter() - t0))
        timings[label] = checks[-1].seconds
    return Certificate(
        surface=kind.value,
        order=order,
        variant=variant,
        s=s,
        h12s=h,
        checks=tuple(checks),
        factors=pair,
        factor_source=source,
        timings=timings,
    )


# ---------------------------------------------------------------- numeric witness


def numeric_witness(
    k: Poly,
    s: Poly,
    target: Poly,
    seed: int = 0,
    attempts: int = 100_000,
    tol: float = 1e-10,
    min_target: float = 1e-3,
    grid: int = 64,
) -> tuple | None:
    """A point of the cube where ``k`` and ``s`` vanish but ``target`` does not.

    Five coordinates are drawn uniformly from [-2, 2]; ``k = 0`` is solved for
    t13 in closed form on each branch, and a sign change of ``s`` along the
    remaining coordinate is refined with Brent's method.  Acceptance is
    judged by exact rational evaluation at the float point.
    """
    import numpy as np
    from scipy.optimize import brentq

    from ._kernels import PolySystem
    from .polyring import VAR_INDEX

    u = VAR_INDEX["t13"]
    if k.degree_in(u) != 2:
        raise ValueError("numeric_witness needs k quadratic in t13")
    parts = k.coeffs_in(u)
    quad = PolySystem([parts.get(d, Poly()) for d in (2, 1, 0)])
    s_sys = PolySystem([s])
    scan_vars = [i for i in range(NVARS) if i != u and s.degree_in(i) > 0] or [i for i in range(NVARS) if i != u]
    rng = np.random.default_rng(seed)
    ys = np.linspace(-2.0, 2.0, grid + 1)

    def branch_points(base, vi, yv, sign):
        X = np.repeat(base[None, :], len(yv), axis=0)
        X[:, vi] = yv
        a2, a1, a0 = quad(X).T
        disc = a1 * a1 - 4.0 * a2 * a0
        with np.errstate(invalid="ignore"):
            X[:, u] = (-a1 + sign * np.sqrt(disc)) / (2.0 * a2)
        return X, disc >= 0

    def accept(x):
        if np.any(np.abs(x) > 2.0):
            return False
        xs = [float(v) for v in x]
        return (
            abs(float(k.eval(xs))) < tol
            and abs(float(s.eval(xs))) < tol
            and abs(float(target.eval(xs))) > min_target
        )

    for attempt in range(attempts):
        vi = scan_vars[attempt % len(scan_vars)]
        base = rng.uniform(-2.0, 2.0, NVARS)
        for sign in (1.0, -1.0):
            X, real = branch_points(base, vi, ys, sign)
            vals = s_sys(X)[:, 0]
            for j in range(grid):
                if not (real[j] and real[j + 1]) or vals[j] * vals[j + 1] > 0:
                    continue

                def g(y):
                    Xy, ok = branch_points(base, vi, np.array([y]), sign)
                    if not ok[0]:
                        raise ValueError
                    return s_sys(Xy)[0, 0]

                try:
                    y = brentq(g, ys[j], ys[j + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
                except ValueError:
                    continue
                x, _ = branch_points(base, vi, np.array([y]), sign)
                if accept(x[0]):
                    return tuple(float(v) for v in x[0])
    return None
