"""Sparse polynomials with exact rational coefficients in the seven trace variables.

A monomial is a 7-tuple of exponents indexed by ``VARS``; a polynomial is a
``dict`` mapping monomials to nonzero ``Fraction`` coefficients.  Polynomials
are immutable once built.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import reduce as _fold
from itertools import permutations
from typing import Iterable, Mapping, Sequence

import numpy as np

VARS = ("t4", "t1", "t2", "t3", "t12", "t13", "t23")
NVARS = len(VARS)
VAR_INDEX = {name: i for i, name in enumerate(VARS)}
ZERO_MONO = (0,) * NVARS

# factor order inside a printed monomial, e.g. "t1*t4*t23"
_PRINT_ORDER = sorted(range(NVARS), key=lambda i: (len(VARS[i]), VARS[i]))


def grevlex_key(m):
    return (sum(m), tuple(-e for e in reversed(m)))


def lex_key(m):
    return m


ORDERS = {"grevlex": grevlex_key, "lex": lex_key}


def order_key(order):
    try:
        return ORDERS[order]
    except KeyError:
        raise ValueError(f"unknown monomial order {order!r}") from None


def var_index(v) -> int:
    if isinstance(v, int):
        if not 0 <= v < NVARS:
            raise ValueError(f"variable index out of range: {v}")
        return v
    try:
        return VAR_INDEX[v]
    except KeyError:
        raise ValueError(f"unknown variable {v!r}") from None


def mono_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a, b) -> bool:
    """True if monomial ``a`` divides ``b``."""
    return all(x <= y for x, y in zip(a, b))


def mono_div(a, b):
    return tuple(x - y for x, y in zip(a, b))


def mono_lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, float):
        raise TypeError("float coefficients are not allowed in exact polynomials")
    return Fraction(c)


class Poly:
    """Immutable sparse polynomial over Q in the variables ``VARS``."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[tuple, object] | None = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                c = _as_fraction(c)
                if c:
                    if len(m) != NVARS:
                        raise ValueError(f"monomial {m!r} must have {NVARS} exponents")
                    clean[tuple(m)] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        # trusted constructor: no zero coefficients, Fraction values
        p = object.__new__(cls)
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({ZERO_MONO: c})

    @classmethod
    def var(cls, v) -> "Poly":
        m = [0] * NVARS
        m[var_index(v)] = 1
        return cls._raw({tuple(m): Fraction(1)})

    @classmethod
    def monomial(cls, m, c=1) -> "Poly":
        return cls({tuple(m): c})

    # -- basic queries -------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and ZERO_MONO in self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == Poly.const(other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def degree_in(self, v) -> int:
        i = var_index(v)
        return max((m[i] for m in self.terms), default=-1)

    def coeff(self, m) -> Fraction:
        if isinstance(m, str):
            m = parse(m)
            if len(m.terms) != 1:
                raise ValueError("coefficient lookup needs a single monomial")
            (m,) = m.terms
        return self.terms.get(tuple(m), Fraction(0))

    def coeffs_in(self, v) -> dict:
        """Split as ``sum_d c_d * v**d``; returns ``{d: c_d}`` with ``c_d`` free of ``v``."""
        i = var_index(v)
        parts: dict[int, dict] = {}
        for m, c in self.terms.items():
            d = m[i]
            parts.setdefault(d, {})[m[:i] + (0,) + m[i + 1:]] = c
        return {d: Poly._raw(t) for d, t in parts.items()}

    def leading_monomial(self, order="grevlex"):
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms, key=order_key(order))

    def leading_coefficient(self, order="grevlex") -> Fraction:
        return self.terms[self.leading_monomial(order)]

    def sorted_terms(self, order="grevlex"):
        key = order_key(order)
        return sorted(self.terms.items(), key=lambda mc: key(mc[0]), reverse=True)

    # -- arithmetic ----------------------------------------------------

    def __neg__(self):
        return Poly._raw({m: -c for m, c in self.terms.items()})

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        out = dict(big)
        for m, c in small.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v += c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Poly._raw(out)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            if v is None:
                out[m] = -c
            else:
                v -= c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Poly._raw(out)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Poly._raw({})
            other = Fraction(other)
            return Poly._raw({m: c * other for m, c in self.terms.items()})
        other = _coerce(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        get = out.get
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = tuple(x + y for x, y in zip(ma, mb))
                out[m] = get(m, 0) + ca * cb
        return Poly._raw({m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def mul_term(self, m, c) -> "Poly":
        c = _as_fraction(c)
        if not c:
            return Poly._raw({})
        return Poly._raw({mono_mul(mm, m): cc * c for mm, cc in self.terms.items()})

    def monic(self, order="grevlex") -> "Poly":
        if not self.terms:
            return self
        return self * (1 / self.leading_coefficient(order))

    def primitive(self, order="grevlex") -> "Poly":
        """Scale to coprime integer coefficients with positive leading coefficient."""
        if not self.terms:
            return self
        den = _fold(_lcm, (c.denominator for c in self.terms.values()), 1)
        nums = [int(c * den) for c in self.terms.values()]
        g = _fold(_gcd, nums, 0)
        scale = Fraction(den, g)
        if self.leading_coefficient(order) < 0:
            scale = -scale
        return self * scale

    def exact_div(self, other: "Poly", order="grevlex") -> "Poly":
        """Quotient ``self / other``; raises ``ArithmeticError`` if not exact."""
        if not other.terms:
            raise ZeroDivisionError("division by the zero polynomial")
        key = order_key(order)
        lm_b = max(other.terms, key=key)
        lc_b = other.terms[lm_b]
        rest = {m: c for m, c in other.terms.items() if m != lm_b}
        r = dict(self.terms)
        q = {}
        while r:
            lm = max(r, key=key)
            if not mono_divides(lm_b, lm):
                raise ArithmeticError("polynomial division is not exact")
            t = mono_div(lm, lm_b)
            c = r.pop(lm) / lc_b
            q[t] = c
            for m, cb in rest.items():
                mm = mono_mul(m, t)
                v = r.get(mm, 0) - c * cb
                if v:
                    r[mm] = v
                else:
                    r.pop(mm, None)
        return Poly._raw(q)

    # -- calculus and evaluation ---------------------------------------

    def diff(self, v) -> "Poly":
        i = var_index(v)
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                out[m[:i] + (e - 1,) + m[i + 1:]] = c * e
        return Poly._raw(out)

    def gradient(self) -> list:
        return [self.diff(i) for i in range(NVARS)]

    def eval(self, x: Sequence, exact: bool = True):
        """Evaluate at a point given in ``VARS`` order.

        With ``exact`` the coordinates are converted to ``Fraction`` and the
        result carries no rounding; otherwise float arithmetic is used.
        """
        if len(x) != NVARS:
            raise ValueError(f"point must have {NVARS} coordinates")
        if exact:
            xs = [Fraction(v) for v in x]
            total = Fraction(0)
        else:
            xs = [float(v) for v in x]
            total = 0.0
        for m, c in self.terms.items():
            t = c if exact else float(c)
            for xi, e in zip(xs, m):
                if e:
                    t *= xi ** e
            total += t
        return total

    def subs(self, v, value) -> "Poly":
        """Substitute a polynomial (or number) for one variable."""
        value = _coerce(value)
        i = var_index(v)
        powers = {}
        out = Poly._raw({})
        for d, c in self.coeffs_in(i).items():
            if d not in powers:
                powers[d] = value ** d
            out = out + c * powers[d]
        return out

    def compiled(self):
        """Float arrays ``(exponents, coefficients)`` for the numeric kernels."""
        if not self.terms:
            return np.zeros((0, NVARS), dtype=np.int64), np.zeros(0)
        monos = list(self.terms)
        exps = np.array(monos, dtype=np.int64)
        coeffs = np.array([float(self.terms[m]) for m in monos])
        return exps, coeffs

    # -- printing ------------------------------------------------------

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f"Poly({to_text(self)!r})"


def _gcd(a, b):
    from math import gcd

    return gcd(a, b)


def _lcm(a, b):
    from math import lcm

    return lcm(a, b)


def _coerce(x):
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction)):
        return Poly.const(x)
    return NotImplemented


def variables():
    """The seven coordinate polynomials in ``VARS`` order."""
    return tuple(Poly.var(i) for i in range(NVARS))


def poly_sum(ps: Iterable[Poly]) -> Poly:
    out: dict = {}
    for p in ps:
        for m, c in p.terms.items():
            out[m] = out.get(m, 0) + c
    return Poly._raw({m: c for m, c in out.items() if c})


# -- text format --------------------------------------------------------


def _format_coeff(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _format_mono(m) -> str:
    parts = []
    for i in _PRINT_ORDER:
        e = m[i]
        if e == 1:
            parts.append(VARS[i])
        elif e > 1:
            parts.append(f"{VARS[i]}^{e}")
    return "*".join(parts)


def to_text(p: Poly, order="grevlex") -> str:
    """Canonical text: terms in descending ``order``, integer coefficients bare."""
    if not p.terms:
        return "0"
    out = []
    for idx, (m, c) in enumerate(p.sorted_terms(order)):
        neg = c < 0
        a = -c if neg else c
        mono = _format_mono(m)
        if not mono:
            body = _format_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_format_coeff(a)}*{mono}"
        if idx == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


class PolySyntaxError(ValueError):
    def __init__(self, msg, pos):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


_TOKEN = re.compile(
    r"\s*(?:(?P<var>t(?:12|13|23|[1-4]))|(?P<name>[A-Za-z_]\w*)|(?P<int>\d+)|(?P<op>[-+*/^]))"
)


def _tokenize(text: str):
    pos = 0
    toks = []
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            break
        mt = _TOKEN.match(text, pos)
        if mt is None:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise PolySyntaxError(f"unexpected character {text[start]!r}", start)
        kind = mt.lastgroup
        start = mt.start(kind)
        val = mt.group(kind)
        if kind == "name":
            raise PolySyntaxError(f"unknown variable {val!r}", start)
        if kind == "var" and mt.end() < n and (text[mt.end()].isalnum() or text[mt.end()] == "_"):
            end = mt.end()
            while end < n and (text[end].isalnum() or text[end] == "_"):
                end += 1
            raise PolySyntaxError(f"unknown variable {text[start:end]!r}", start)
        toks.append((kind, val, start))
        pos = mt.end()
    toks.append(("end", "", n))
    return toks


def parse(text: str) -> Poly:
    """Parse the polynomial text grammar; inverse of ``to_text``.

    >>> str(parse("t12^2 - 2"))
    't12^2 - 2'
    """
    toks = _tokenize(text)
    i = 0

    def peek():
        return toks[i]

    def take(kind=None, val=None):
        nonlocal i
        tok = toks[i]
        if (kind and tok[0] != kind) or (val and tok[1] != val):
            want = val or kind
            got = tok[1] or "end of input"
            raise PolySyntaxError(f"expected {want}, got {got!r}", tok[2])
        i += 1
        return tok

    def term(sign):
        coeff = Fraction(sign)
        mono = [0] * NVARS
        seen = False
        if peek()[0] == "int":
            num = int(take()[1])
            if peek()[1] == "/":
                take()
                den_tok = take("int")
                den = int(den_tok[1])
                if den == 0:
                    raise PolySyntaxError("zero denominator", den_tok[2])
                coeff *= Fraction(num, den)
            else:
                coeff *= num
            seen = True
        while True:
            tok = peek()
            if tok[1] == "*":
                take()
                tok = peek()
                if tok[0] != "var":
                    raise PolySyntaxError(f"expected variable after '*', got {tok[1] or 'end of input'!r}", tok[2])
            if tok[0] != "var":
                break
            take()
            e = 1
            if peek()[1] == "^":
                take()
                e = int(take("int")[1])
            mono[VAR_INDEX[tok[1]]] += e
            seen = True
        if not seen:
            tok = peek()
            raise PolySyntaxError(f"expected term, got {tok[1] or 'end of input'!r}", tok[2])
        return tuple(mono), coeff

    out: dict = {}
    sign = 1
    if peek()[1] in "+-" and peek()[0] == "op":
        sign = -1 if take()[1] == "-" else 1
    while True:
        m, c = term(sign)
        out[m] = out.get(m, 0) + c
        tok = peek()
        if tok[0] == "end":
            break
        if tok[1] not in ("+", "-"):
            raise PolySyntaxError(f"unexpected {tok[1]!r}", tok[2])
        sign = -1 if take()[1] == "-" else 1
    return Poly({m: c for m, c in out.items() if c})


# -- polynomial matrices -------------------------------------------------


class PolyMatrix:
    """Square matrix of ``Poly`` entries."""

    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence]):
        rows = [[_coerce(e) for e in r] for r in rows]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("PolyMatrix must be square")
        self.rows = tuple(tuple(r) for r in rows)

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and self.rows == other.rows

    @classmethod
    def identity(cls, n) -> "PolyMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def swap_rows(self, i, j) -> "PolyMatrix":
        rows = list(self.rows)
        rows[i], rows[j] = rows[j], rows[i]
        return PolyMatrix(rows)

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(list(zip(*self.rows)))

    def det(self, method="bareiss") -> Poly:
        if method == "bareiss":
            return det_bareiss(self)
        if method == "cofactor":
            return det_cofactor(self)
        raise ValueError(f"unknown determinant method {method!r}")


def jacobian(polys: Sequence[Poly]) -> PolyMatrix:
    """Rows are gradients of ``polys``; square when given seven functions."""
    return PolyMatrix([p.gradient() for p in polys])


def det_bareiss(m: PolyMatrix) -> Poly:
    """Fraction-free Bareiss elimination with exact polynomial division."""
    n = m.n
    if n == 0:
        return Poly.const(1)
    a = [list(r) for r in m.rows]
    sign = 1
    prev = Poly.const(1)
    for k in range(n - 1):
        if not a[k][k]:
            piv = next((r for r in range(k + 1, n) if a[r][k]), None)
            if piv is None:
                return Poly._raw({})
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            for j in range(k + 1, n):
                num = akk * a[i][j] - aik * a[k][j]
                if prev.is_constant():
                    a[i][j] = num * (1 / prev.terms[ZERO_MONO])
                else:
                    a[i][j] = num.exact_div(prev)
            a[i][k] = Poly._raw({})
        prev = akk
    d = a[n - 1][n - 1]
    return d if sign > 0 else -d


def det_cofactor(m: PolyMatrix) -> Poly:
    """Laplace expansion along the sparsest row, recursively; skips zero entries."""

    def rec(rows, cols):
        if len(rows) == 1:
            return m.rows[rows[0]][cols[0]]
        # expand along the row with the fewest nonzero entries
        best = min(rows, key=lambda r: sum(1 for c in cols if m.rows[r][c]))
        rest = [r for r in rows if r != best]
        bi = rows.index(best)
        total = Poly._raw({})
        for cj, c in enumerate(cols):
            e = m.rows[best][c]
            if not e:
                continue
            minor = rec(rest, [x for x in cols if x != c])
            if not minor:
                continue
            term = e * minor
            total = total - term if (bi + cj) % 2 else total + term
        return total

    if m.n == 0:
        return Poly.const(1)
    return rec(list(range(m.n)), list(range(m.n)))


def det_leibniz(m: PolyMatrix) -> Poly:
    """Permutation-sum determinant; only sensible for tiny matrices (tests)."""
    n = m.n
    total = Poly._raw({})
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = Poly.const(1)
        for i, j in enumerate(perm):
            term = term * m.rows[i][j]
            if not term:
                break
        total = total - term if inv % 2 else total + term
    return total


def sqrt_poly(p: Poly, order="grevlex") -> Poly | None:
    """Exact square root ``q`` with ``q*q == p`` and positive leading coefficient, or None."""
    if not p.terms:
        return Poly._raw({})
    key = order_key(order)
    lm = max(p.terms, key=key)
    if any(e % 2 for e in lm):
        return None
    lc = p.terms[lm]
    root = _rat_sqrt(lc)
    if root is None:
        return None
    lm_q = tuple(e // 2 for e in lm)
    q = Poly._raw({lm_q: root})
    two_lt = (lm_q, 2 * root)
    r = p - q * q
    # each step fixes the leading term of the residual; it can take at most
    # as many steps as there are monomials below lm_q
    for _ in range(_count_below(lm_q) + 1):
        if not r.terms:
            return q
        lm_r = max(r.terms, key=key)
        if not mono_divides(two_lt[0], lm_r):
            return None
        m = mono_div(lm_r, two_lt[0])
        if key(m) >= key(lm_q):
            return None
        t = Poly._raw({m: r.terms[lm_r] / two_lt[1]})
        r = r - (q * 2 + t) * t
        q = q + t
    return q if not r.terms else None


def _count_below(m) -> int:
    from math import comb

    d = sum(m)
    return sum(comb(k + NVARS - 1, NVARS - 1) for k in range(d + 1))


def _rat_sqrt(c: Fraction) -> Fraction | None:
    from math import isqrt

    if c < 0:
        return None
    a, b = isqrt(c.numerator), isqrt(c.denominator)
    if a * a == c.numerator and b * b == c.denominator:
        return Fraction(a, b)
    return None
