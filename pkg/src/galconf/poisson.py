"""Kirillov-Kostant Poisson structure on orbit coordinates.

Phase-space coordinates are the Darboux pairs (q_k^a, p_k^a) of the
external tower, the internal spin s, the internal sl(2,R) triple chi, and
the constant mass m.  Observables are sparse polynomials in these
coordinates; brackets are evaluated by exact differentiation contracted
against the coordinate bracket table.

Generator functions come in two independent routes which the tests pin
against each other: ``generators_at`` evaluates the printed reduced
expressions directly, while ``generator_polynomials`` composes the orbit
parametrization with the Darboux chart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from .algebra import AlgebraSpec, GeneratorId, _sign_pow, eps2, eps3, so21_epsilon_lower
from .coadjoint import DualVector, orbit_dual_vector
from .errors import ShapeMismatch

__all__ = [
    "Poly",
    "PhasePoint",
    "StructureMatrix",
    "raw_bracket",
    "to_darboux",
    "from_darboux",
    "aux_top_momentum",
    "generators_at",
    "generator_polynomials",
    "momentum_map",
    "hamiltonian_poly",
    "observable_bracket",
    "poly_bracket",
    "dual_vector_at",
    "random_point",
]

_fact = math.factorial

# eps^{ab} with 0-based rows/columns; EPS2[a, b] = eps^{(a+1)(b+1)}
EPS2 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def q_levels(N: int, dim: int) -> int:
    return (N + 1) // 2 if dim == 3 else N // 2 + 1


def p_levels(N: int, dim: int) -> int:
    return (N + 1) // 2 if dim == 3 else N // 2


# ---------------------------------------------------------------------------
# sparse polynomials
# ---------------------------------------------------------------------------

class Poly:
    """Sparse polynomial in the phase-space coordinates.

    Monomials are stored as sorted tuples of (symbol, exponent); symbols are
    tuples like ("q", level, axis), ("p", level, axis), ("s", i),
    ("chi", alpha) with 0-based indices.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping] = None):
        self.terms = {k: v for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def const(cls, value) -> "Poly":
        return cls({(): float(value)} if value else {})

    @classmethod
    def var(cls, sym, coeff=1.0) -> "Poly":
        return cls({((sym, 1),): float(coeff)})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(other)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            out[mono] = out.get(mono, 0.0) + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-other if isinstance(other, Poly) else Poly.const(-other))

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return Poly({m: c * other for m, c in self.terms.items()})
        out: Dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                merged: Dict = {}
                for s, e in m1:
                    merged[s] = merged.get(s, 0) + e
                for s, e in m2:
                    merged[s] = merged.get(s, 0) + e
                key = tuple(sorted(merged.items()))
                out[key] = out.get(key, 0.0) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def diff(self, sym) -> "Poly":
        out: Dict = {}
        for mono, c in self.terms.items():
            for i, (s, e) in enumerate(mono):
                if s == sym:
                    rest = mono[:i] + ((s, e - 1),) + mono[i + 1:] if e > 1 \
                        else mono[:i] + mono[i + 1:]
                    out[rest] = out.get(rest, 0.0) + c * e
                    break
        return Poly(out)

    def variables(self) -> set:
        return {s for mono in self.terms for s, _ in mono}

    def eval(self, env: Mapping) -> float:
        total = 0.0
        for mono, c in self.terms.items():
            v = c
            for s, e in mono:
                v *= env[s] ** e
            total += v
        return total

    def __repr__(self) -> str:
        return f"Poly({self.terms!r})"


# ---------------------------------------------------------------------------
# phase points
# ---------------------------------------------------------------------------

@dataclass
class PhasePoint:
    """Orbit coordinates: external Darboux pairs, internal spin, chi, mass.

    Shapes: q is (q_levels, dim) and p is (p_levels, dim); in dimension 2
    the top q level is self-conjugate and has no p partner.
    """

    q: np.ndarray
    p: np.ndarray
    s: object
    chi: np.ndarray
    m: float

    def __post_init__(self):
        self.q = np.array(self.q, dtype=float)
        self.p = np.array(self.p, dtype=float)
        self.chi = np.array(self.chi, dtype=float).reshape(3)
        if self.q.ndim != 2 or self.q.shape[1] not in (2, 3):
            raise ShapeMismatch(f"q must be (levels, dim), got {self.q.shape}")
        if self.dim == 3:
            self.s = np.array(self.s, dtype=float).reshape(3)
        else:
            self.s = float(np.asarray(self.s).reshape(()))
        N = self.N
        if self.q.shape[0] != q_levels(N, self.dim) or \
                self.p.shape != (p_levels(N, self.dim), self.dim):
            raise ShapeMismatch(
                f"inconsistent external shapes q={self.q.shape} p={self.p.shape}")

    @property
    def dim(self) -> int:
        return self.q.shape[1]

    @property
    def N(self) -> int:
        if self.dim == 3:
            return 2 * self.q.shape[0] - 1
        return 2 * (self.q.shape[0] - 1)

    def env(self) -> Dict:
        e: Dict = {}
        for k in range(self.q.shape[0]):
            for a in range(self.dim):
                e[("q", k, a)] = self.q[k, a]
        for k in range(self.p.shape[0]):
            for a in range(self.dim):
                e[("p", k, a)] = self.p[k, a]
        if self.dim == 3:
            for i in range(3):
                e[("s", i)] = self.s[i]
        else:
            e[("s", 0)] = self.s
        for al in range(3):
            e[("chi", al)] = self.chi[al]
        return e

    def copy(self) -> "PhasePoint":
        return PhasePoint(q=self.q.copy(), p=self.p.copy(),
                          s=np.copy(self.s) if self.dim == 3 else self.s,
                          chi=self.chi.copy(), m=self.m)

    def spin_invariant(self) -> float:
        """|s|^2 in dimension 3, the signed scalar s in dimension 2."""
        if self.dim == 3:
            return float(self.s @ self.s)
        return float(self.s)


def random_point(rng, N: int, dim: int, m: float = 1.0, scale: float = 0.7) -> PhasePoint:
    q = rng.uniform(-scale, scale, (q_levels(N, dim), dim))
    p = rng.uniform(-scale, scale, (p_levels(N, dim), dim))
    s = rng.uniform(-scale, scale, 3) if dim == 3 else float(rng.uniform(-scale, scale))
    chi = rng.uniform(-scale, scale, 3)
    return PhasePoint(q=q, p=p, s=s, chi=chi, m=m)


# ---------------------------------------------------------------------------
# Darboux chart
# ---------------------------------------------------------------------------

def raw_bracket(alg: AlgebraSpec, j: int, a: int, k: int, b: int, m: float) -> float:
    """Poisson bracket {x_j^a, x_k^b} of raw orbit coordinates (1-based axes).

    Zero unless the levels pair to N; the mass enters inversely.
    """
    N, dim = alg.N, alg.dim
    if not (0 <= j <= N and 0 <= k <= N):
        raise ShapeMismatch(f"levels must lie in 0..{N}")
    if j + k != N:
        return 0.0
    if dim == 3:
        if a != b:
            return 0.0
        return _sign_pow(j - (N + 1) // 2) / (m * _fact(j) * _fact(N - j))
    return -_sign_pow((2 * j - N) // 2) * eps2(a, b) / (m * _fact(j) * _fact(N - j))


def to_darboux(x_levels, m: float, N: int, dim: int):
    """Map raw tower coordinates to canonical (q, p) blocks.

    In dimension 2 the momentum line absorbs one antisymmetric twist so the
    canonical pairs come out with {q, p} = delta exactly; the self-conjugate
    top level stays on the q side.
    """
    x = np.asarray(x_levels, dtype=float)
    if x.shape != (N + 1, dim):
        raise ShapeMismatch(f"x must be ({N + 1}, {dim}), got {x.shape}")
    q = np.zeros((q_levels(N, dim), dim))
    p = np.zeros((p_levels(N, dim), dim))
    if dim == 3:
        for k in range(q.shape[0]):
            q[k] = _sign_pow(k - (N + 1) // 2) * _fact(k) * x[k]
            p[k] = m * _fact(N - k) * x[N - k]
    else:
        for k in range(q.shape[0]):
            q[k] = _sign_pow((N - 2 * k) // 2) * _fact(k) * x[k]
        for k in range(p.shape[0]):
            p[k] = m * _fact(N - k) * (EPS2.T @ x[N - k])
    return q, p


def from_darboux(q, p, m: float, N: int, dim: int) -> np.ndarray:
    """Inverse of to_darboux; round-trips exactly."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if q.shape != (q_levels(N, dim), dim) or p.shape != (p_levels(N, dim), dim):
        raise ShapeMismatch(f"bad shapes q={q.shape} p={p.shape} for N={N}, dim={dim}")
    x = np.zeros((N + 1, dim))
    if dim == 3:
        for k in range(q.shape[0]):
            x[k] = _sign_pow(k - (N + 1) // 2) * q[k] / _fact(k)
            x[N - k] = p[k] / (m * _fact(N - k))
    else:
        for k in range(q.shape[0]):
            x[k] = _sign_pow((N - 2 * k) // 2) * q[k] / _fact(k)
        for k in range(p.shape[0]):
            x[N - k] = (EPS2 @ p[k]) / (m * _fact(N - k))
    return x


def aux_top_momentum(q_top, m: float) -> np.ndarray:
    """Derived conjugate of the self-conjugate 2D level: (m/2) eps^{ba} q^b."""
    q_top = np.asarray(q_top, dtype=float)
    return (m / 2.0) * (EPS2.T @ q_top)


# ---------------------------------------------------------------------------
# coordinate bracket table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StructureMatrix:
    """Bracket table on the coordinate functions for a given (N, dim, m)."""

    N: int
    dim: int
    m: float

    def coordinates(self) -> List[Tuple]:
        syms: List[Tuple] = []
        for k in range(q_levels(self.N, self.dim)):
            syms += [("q", k, a) for a in range(self.dim)]
        for k in range(p_levels(self.N, self.dim)):
            syms += [("p", k, a) for a in range(self.dim)]
        syms += [("s", i) for i in range(3 if self.dim == 3 else 1)]
        syms += [("chi", al) for al in range(3)]
        return syms

    def bracket(self, u, v) -> Poly:
        ku, kv = u[0], v[0]
        if ku == "q" and kv == "p":
            if u[1] == v[1] and u[2] == v[2]:
                return Poly.const(1.0)
            return Poly()
        if ku == "p" and kv == "q":
            return -self.bracket(v, u)
        if ku == "q" and kv == "q":
            top = self.N // 2
            if self.dim == 2 and u[1] == v[1] == top and u[2] != v[2]:
                # self-conjugate pair: {q^a, q^b} = eps^{ba} / m
                return Poly.const(eps2(v[2] + 1, u[2] + 1) / self.m)
            return Poly()
        if ku == "s" and kv == "s":
            if self.dim == 2:
                return Poly()
            out = Poly()
            for l in range(3):
                e = eps3(u[1] + 1, v[1] + 1, l + 1)
                if e:
                    out = out + Poly.var(("s", l), e)
            return out
        if ku == "chi" and kv == "chi":
            out = Poly()
            for g in range(3):
                e = so21_epsilon_lower(u[1], v[1], g)
                if e:
                    out = out + Poly.var(("chi", g), e)
            return out
        return Poly()


def poly_bracket(f: Poly, g: Poly, sm: StructureMatrix) -> Poly:
    """{f, g} as a polynomial: gradients contracted with the bracket table."""
    out = Poly()
    gv = [(v, g.diff(v)) for v in g.variables()]
    for u in f.variables():
        df = f.diff(u)
        if not df:
            continue
        for v, dg in gv:
            br = sm.bracket(u, v)
            if br and dg:
                out = out + df * dg * br
    return out


def observable_bracket(f: Poly, g: Poly, pt: PhasePoint) -> float:
    """{f, g} at pt by exact polynomial differentiation."""
    sm = StructureMatrix(pt.N, pt.dim, pt.m)
    return poly_bracket(f, g, sm).eval(pt.env())


# ---------------------------------------------------------------------------
# generator functions
# ---------------------------------------------------------------------------

def generators_at(pt: PhasePoint) -> Dict[str, object]:
    """Generator values (h, d, k, j) from the reduced phase-space expressions."""
    N, dim, m = pt.N, pt.dim, pt.m
    q, p, chi = pt.q, pt.p, pt.chi
    halfN = N / 2.0
    if dim == 3:
        n = (N - 1) // 2
        h = chi[0] - chi[1] + float(p[n] @ p[n]) / (2.0 * m) \
            + sum(float(q[k] @ p[k - 1]) for k in range(1, n + 1))
        d = chi[2] + sum((halfN - k) * float(q[k] @ p[k]) for k in range(n + 1))
        kk = chi[0] + chi[1] + (m / 2.0) * ((N + 1) / 2.0) ** 2 * float(q[n] @ q[n]) \
            - sum((N - k) * (k + 1) * float(q[k] @ p[k + 1]) for k in range(n))
        jv = np.array(pt.s, dtype=float)
        for k in range(n + 1):
            jv = jv + np.cross(q[k], p[k])
        return {"h": h, "d": d, "k": kk, "j": jv}
    u = N // 2
    p_top = aux_top_momentum(q[u], m)
    h = chi[0] - chi[1] + sum(float(p[k] @ q[k + 1]) for k in range(u))
    d = chi[2] + sum((halfN - k) * float(p[k] @ q[k]) for k in range(u))
    kk = chi[0] + chi[1] \
        - sum((N - k + 1) * k * float(p[k] @ q[k - 1]) for k in range(1, u)) \
        - N * (halfN + 1.0) * float(q[u - 1] @ p_top)
    js = float(pt.s)
    for k in range(u):
        js += float(q[k, 0] * p[k, 1] - q[k, 1] * p[k, 0])
    js += float(q[u, 0] * p_top[1] - q[u, 1] * p_top[0])
    return {"h": h, "d": d, "k": kk, "j": js}


def _x_polys(N: int, dim: int, m: float) -> List[List[Poly]]:
    """Raw tower coordinates as polynomials in the Darboux chart."""
    out: List[List[Poly]] = []
    if dim == 3:
        n = (N - 1) // 2
        for i in range(N + 1):
            if i <= n:
                coeff = _sign_pow(i - (N + 1) // 2) / _fact(i)
                out.append([Poly.var(("q", i, a), coeff) for a in range(3)])
            else:
                coeff = 1.0 / (m * _fact(i))
                out.append([Poly.var(("p", N - i, a), coeff) for a in range(3)])
        return out
    top = N // 2
    for i in range(N + 1):
        row = []
        for a in range(2):
            if i <= top:
                coeff = _sign_pow((N - 2 * i) // 2) / _fact(i)
                row.append(Poly.var(("q", i, a), coeff))
            else:
                # x^a = eps^{ab} p^b / (m i!)
                poly = Poly()
                for b in range(2):
                    if EPS2[a, b]:
                        poly = poly + Poly.var(("p", N - i, b), EPS2[a, b] / (m * _fact(i)))
                row.append(poly)
        out.append(row)
    return out


def _dot(xs: List[Poly], ys: List[Poly]) -> Poly:
    out = Poly()
    for xa, ya in zip(xs, ys):
        out = out + xa * ya
    return out


def _eps_pair_poly(xs: List[Poly], ys: List[Poly]) -> Poly:
    # sum_{a,b} eps^{ab} x^b y^a
    out = Poly()
    for a in range(2):
        for b in range(2):
            if EPS2[a, b]:
                out = out + EPS2[a, b] * (xs[b] * ys[a])
    return out


def generator_polynomials(N: int, dim: int, m: float) -> Dict[str, object]:
    """Generator functions assembled from the orbit parametrization composed
    with the Darboux chart; independent of ``generators_at``."""
    x = _x_polys(N, dim, m)
    halfN = N / 2.0
    chi0, chi1, chi2 = (Poly.var(("chi", al)) for al in range(3))
    h = chi0 - chi1
    d = Poly.var(("chi", 2))
    kk = chi0 + chi1
    c: List[List[Poly]] = [[Poly() for _ in range(dim)] for _ in range(N + 1)]
    if dim == 3:
        jv = [Poly.var(("s", b)) for b in range(3)]
        for j in range(N + 1):
            f = _sign_pow(j - (N - 1) // 2) * _fact(j) * _fact(N - j)
            for b in range(3):
                c[j][b] = m * f * x[N - j][b]
            g = _sign_pow(j - (N + 1) // 2) * _fact(j) * _fact(N - j)
            for b in range(3):
                cross_term = Poly()
                for cc in range(3):
                    for a in range(3):
                        e = eps3(b + 1, cc + 1, a + 1)
                        if e:
                            cross_term = cross_term + e * (x[j][a] * x[N - j][cc])
                jv[b] = jv[b] - (m / 2.0) * g * cross_term
            d = d + (m / 2.0) * (halfN - j) * g * _dot(x[j], x[N - j])
        for j in range(1, N + 1):
            h = h + (m / 2.0) * _sign_pow(j - (N + 1) // 2) * _fact(j) \
                * _fact(N - j + 1) * _dot(x[j], x[N - j + 1])
        for j in range(N):
            kk = kk + (m / 2.0) * _sign_pow(j - (N - 1) // 2) * _fact(j + 1) \
                * _fact(N - j) * _dot(x[j], x[N - j - 1])
        out: Dict[str, object] = {"j": jv}
    else:
        js = Poly.var(("s", 0))
        for j in range(N + 1):
            f = _sign_pow((N - 2 * j) // 2) * _fact(j) * _fact(N - j)
            for b in range(2):
                for a in range(2):
                    if EPS2[a, b]:
                        # c^b = sign * m j! (N-j)! eps^{ba} x^a
                        c[j][b] = c[j][b] + f * m * (-EPS2[a, b]) * x[N - j][a]
            g = _sign_pow((2 * j - N) // 2) * _fact(j) * _fact(N - j)
            js = js + (m / 2.0) * g * _dot(x[j], x[N - j])
            d = d + (m / 2.0) * (halfN - j) * g * _eps_pair_poly(x[j], x[N - j])
        for j in range(1, N + 1):
            h = h + (m / 2.0) * _sign_pow((2 * j - N) // 2) * _fact(j) \
                * _fact(N - j + 1) * _eps_pair_poly(x[j], x[N - j + 1])
        for j in range(N):
            kk = kk - (m / 2.0) * _sign_pow((2 * j - N) // 2) * _fact(j + 1) \
                * _fact(N - j) * _eps_pair_poly(x[j], x[N - j - 1])
        out = {"j": js}
    out.update({"h": h, "d": d, "k": kk, "c": c, "m": Poly.const(m)})
    return out


def momentum_map(alg: AlgebraSpec, m: float) -> Dict[GeneratorId, Poly]:
    """Generator id -> generator function, for momentum-map closure checks."""
    polys = generator_polynomials(alg.N, alg.dim, m)
    out: Dict[GeneratorId, Poly] = {}
    for g in alg.generators:
        if g.kind == "J":
            out[g] = polys["j"][g.axis - 1] if alg.dim == 3 else polys["j"]
        elif g.kind == "C":
            out[g] = polys["c"][g.level][g.axis - 1]
        elif g.kind == "H":
            out[g] = polys["h"]
        elif g.kind == "D":
            out[g] = polys["d"]
        elif g.kind == "K":
            out[g] = polys["k"]
        elif g.kind == "M":
            out[g] = polys["m"]
    return out


def hamiltonian_poly(N: int, dim: int, m: float, omega: float = 0.0,
                     sign: int = 1) -> Poly:
    """h, or the oscillator deformation h + sign * omega^2 * k."""
    polys = generator_polynomials(N, dim, m)
    h = polys["h"]
    if omega:
        h = h + (sign * omega * omega) * polys["k"]
    return h


def dual_vector_at(pt: PhasePoint) -> DualVector:
    """Dual-space point realized by a phase point."""
    x = from_darboux(pt.q, pt.p, pt.m, pt.N, pt.dim)
    return orbit_dual_vector(pt.m, pt.s, pt.chi, x)
