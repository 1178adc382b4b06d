"""Exact structure constants for the conformal extensions of the Galilei algebra.

The family is indexed by a positive integer N and the spatial dimension
(2 or 3).  Generators are rotations J, an sl(2,R) triple (H, D, K), a tower
of vector generators C_0 .. C_N carrying a spin-N/2 action of the triple,
optionally a space dilatation Ds, and optionally a central mass M.  The
central extension exists only for N odd in dimension 3 and N even in
dimension 2.

Convention: every commutator is written [X, Y] = i * c * Z and the table
stores the real coefficient c as an exact ``Fraction``.  Orientation
conventions are fixed once here: eps_{123} = +1 in dimension 3,
eps^{12} = +1 in dimension 2, and for the sl(2,R) triple eps^{012} = +1
with metric diag(+, -, -).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Tuple

from .errors import BadDimension, UnknownGenerator, UnsupportedExtension

__all__ = [
    "GeneratorId",
    "AlgebraSpec",
    "Element",
    "build_algebra",
    "bracket",
    "jacobi_report",
    "jacobi_worst",
    "conformal_basis",
    "conformal_basis_inverse",
    "so21_basis",
    "so21_epsilon_lower",
    "dump_table",
]

Element = Dict["GeneratorId", Fraction]

# Metric on the sl(2,R) triple in the light-cone-free basis (N^0, N^1, N^2).
SO21_METRIC = (1, -1, -1)


def _sign_pow(exponent: int) -> int:
    """(-1)**exponent for possibly negative integer exponents."""
    return -1 if exponent % 2 else 1


def eps3(i: int, j: int, k: int) -> int:
    """Levi-Civita symbol with 1-based indices, eps3(1,2,3) = +1."""
    if {i, j, k} != {1, 2, 3}:
        return 0
    return 1 if (i, j, k) in ((1, 2, 3), (2, 3, 1), (3, 1, 2)) else -1


def eps2(a: int, b: int) -> int:
    """Antisymmetric symbol with 1-based indices, eps2(1,2) = +1."""
    return 1 if (a, b) == (1, 2) else -1 if (a, b) == (2, 1) else 0


def so21_epsilon_lower(alpha: int, beta: int, gamma: int) -> int:
    """eps^{alpha beta}_gamma with the last index lowered by diag(+,-,-)."""
    perm = {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1,
            (1, 0, 2): -1, (2, 1, 0): -1, (0, 2, 1): -1}
    upper = perm.get((alpha, beta, gamma), 0)
    return upper * SO21_METRIC[gamma]


@dataclass(frozen=True)
class GeneratorId:
    """One basis generator; indices are present exactly when the kind needs them.

    kind  -- one of J, C, H, D, K, M, Ds
    axis  -- 1-based spatial index (J in dimension 3, and every C)
    level -- tower level 0..N (C only)
    """

    kind: str
    axis: Optional[int] = None
    level: Optional[int] = None

    @property
    def name(self) -> str:
        if self.kind == "C":
            return f"C{self.level}_{self.axis}"
        if self.kind == "J" and self.axis is not None:
            return f"J{self.axis}"
        return self.kind

    def __repr__(self) -> str:  # keeps test failure output readable
        return self.name


def parse_generator(name: str) -> GeneratorId:
    """Inverse of ``GeneratorId.name``."""
    if name.startswith("C"):
        level, axis = name[1:].split("_")
        return GeneratorId("C", axis=int(axis), level=int(level))
    if name.startswith("J") and len(name) > 1:
        return GeneratorId("J", axis=int(name[1:]))
    if name in ("J", "H", "D", "K", "M", "Ds"):
        return GeneratorId(name)
    raise UnknownGenerator(f"cannot parse generator name {name!r}")


@dataclass(frozen=True)
class AlgebraSpec:
    """Immutable structure-constant table for one member of the family.

    ``table`` maps an ordered generator pair to the sparse result of their
    bracket; both orders of every nonzero pair are stored so antisymmetry
    is explicit.  Do not mutate after construction.
    """

    N: int
    dim: int
    central: bool
    with_ds: bool
    generators: Tuple[GeneratorId, ...]
    table: Dict[Tuple[GeneratorId, GeneratorId], Element]

    def __post_init__(self):
        object.__setattr__(
            self, "_index", {g: i for i, g in enumerate(self.generators)}
        )

    @property
    def index(self) -> Dict[GeneratorId, int]:
        return self._index

    def generator(self, name: str) -> GeneratorId:
        gid = parse_generator(name)
        if gid not in self._index:
            raise UnknownGenerator(f"{name} not in this algebra")
        return gid

    def element(self, coeffs: Mapping[str, object]) -> Element:
        """Build a sparse element from {generator name: coefficient}."""
        out: Element = {}
        for name, value in coeffs.items():
            c = Fraction(value)
            if c:
                out[self.generator(name)] = c
        return out

    def constants(self, x: GeneratorId, y: GeneratorId) -> Element:
        """Real coefficients c_Z of [x, y] = i * sum_Z c_Z * Z."""
        for g in (x, y):
            if g not in self._index:
                raise UnknownGenerator(str(g))
        return dict(self.table.get((x, y), {}))


def _put(table, x: GeneratorId, y: GeneratorId, result: Element) -> None:
    result = {g: c for g, c in result.items() if c}
    if not result:
        return
    table[(x, y)] = result
    table[(y, x)] = {g: -c for g, c in result.items()}


def build_algebra(N: int, dim: int, central: bool, with_ds: bool = False) -> AlgebraSpec:
    """Construct the full sparse table for the (N, dim) member of the family.

    Raises UnsupportedExtension when a central charge is requested outside
    the two admissible families (N odd / dim 3, N even / dim 2) or together
    with the space dilatation, and BadDimension for dim not in {2, 3}.
    """
    if dim not in (2, 3):
        raise BadDimension(f"dim must be 2 or 3, got {dim}")
    if not isinstance(N, int) or N < 1:
        raise BadDimension(f"N must be a positive integer, got {N}")
    if central:
        if with_ds:
            raise UnsupportedExtension(
                "the space dilatation must be dropped before extending centrally"
            )
        if not ((N % 2 == 1 and dim == 3) or (N % 2 == 0 and dim == 2)):
            raise UnsupportedExtension(
                f"no central extension for N={N}, dim={dim}; "
                "it exists only for N odd in dimension 3 or N even in dimension 2"
            )

    axes = range(1, dim + 1)
    gens: List[GeneratorId] = []
    if dim == 3:
        J = [GeneratorId("J", axis=a) for a in axes]
    else:
        J = [GeneratorId("J")]
    gens.extend(J)
    C = {(j, a): GeneratorId("C", axis=a, level=j) for j in range(N + 1) for a in axes}
    gens.extend(C[(j, a)] for j in range(N + 1) for a in axes)
    H, D, K = GeneratorId("H"), GeneratorId("D"), GeneratorId("K")
    gens.extend([H, D, K])
    M = GeneratorId("M") if central else None
    if M is not None:
        gens.append(M)
    Ds = GeneratorId("Ds") if with_ds else None
    if Ds is not None:
        gens.append(Ds)

    t: Dict[Tuple[GeneratorId, GeneratorId], Element] = {}
    half_N = Fraction(N, 2)

    if dim == 3:
        for i, k in combinations(axes, 2):
            _put(t, J[i - 1], J[k - 1], {J[l - 1]: Fraction(eps3(i, k, l))
                                         for l in axes if eps3(i, k, l)})
        for i in axes:
            for j in range(N + 1):
                for b in axes:
                    _put(t, J[i - 1], C[(j, b)],
                         {C[(j, d)]: Fraction(eps3(i, b, d))
                          for d in axes if eps3(i, b, d)})
    else:
        for j in range(N + 1):
            for a in axes:
                _put(t, J[0], C[(j, a)],
                     {C[(j, b)]: Fraction(eps2(a, b)) for b in axes if eps2(a, b)})

    _put(t, D, H, {H: Fraction(1)})
    _put(t, D, K, {K: Fraction(-1)})
    _put(t, K, H, {D: Fraction(2)})

    for j in range(N + 1):
        for a in axes:
            if j >= 1:
                _put(t, H, C[(j, a)], {C[(j - 1, a)]: Fraction(-j)})
            if half_N != j:
                _put(t, D, C[(j, a)], {C[(j, a)]: half_N - j})
            if j <= N - 1:
                _put(t, K, C[(j, a)], {C[(j + 1, a)]: Fraction(N - j)})
            if Ds is not None:
                _put(t, Ds, C[(j, a)], {C[(j, a)]: Fraction(1)})

    if central:
        # Mass rows: only opposite tower levels pair up, with factorial weights.
        for j in range(N + 1):
            k = N - j
            if j > k:
                continue
            fact = Fraction(math.factorial(j) * math.factorial(k))
            if dim == 3:
                sign = _sign_pow((k - j + 1) // 2)
                for a in axes:
                    if j == k:
                        continue  # same level, same axis: bracket vanishes
                    _put(t, C[(j, a)], C[(k, a)], {M: sign * fact})
            else:
                sign = _sign_pow((j - k) // 2)
                for a in axes:
                    for b in axes:
                        if j == k and a >= b:
                            continue
                        coeff = -eps2(a, b) * sign * fact
                        if coeff:
                            _put(t, C[(j, a)], C[(k, b)], {M: Fraction(coeff)})

    return AlgebraSpec(N=N, dim=dim, central=central, with_ds=with_ds,
                       generators=tuple(gens), table=t)


def bracket(alg: AlgebraSpec, X: Mapping[GeneratorId, object],
            Y: Mapping[GeneratorId, object]) -> Element:
    """Bilinear extension of the table; exact rational arithmetic throughout."""
    out: Element = {}
    for gx, cx in X.items():
        if gx not in alg.index:
            raise UnknownGenerator(str(gx))
        cx = Fraction(cx)
        for gy, cy in Y.items():
            if gy not in alg.index:
                raise UnknownGenerator(str(gy))
            row = alg.table.get((gx, gy))
            if not row:
                continue
            cxy = cx * Fraction(cy)
            for gz, cz in row.items():
                out[gz] = out.get(gz, Fraction(0)) + cxy * cz
    return {g: c for g, c in out.items() if c}


def _jacobi_defect(alg: AlgebraSpec, x, y, z) -> Fraction:
    ex, ey, ez = {x: Fraction(1)}, {y: Fraction(1)}, {z: Fraction(1)}
    total: Element = {}
    for a, b, c in ((ex, ey, ez), (ey, ez, ex), (ez, ex, ey)):
        for g, v in bracket(alg, a, bracket(alg, b, c)).items():
            total[g] = total.get(g, Fraction(0)) + v
    return max((abs(v) for v in total.values()), default=Fraction(0))


def jacobi_report(alg: AlgebraSpec) -> Fraction:
    """Maximum coefficient-wise Jacobi defect over all generator triples.

    Exact zero for every admissible algebra; any nonzero value indicates a
    corrupted table.
    """
    return jacobi_worst(alg)[0]


def jacobi_worst(alg: AlgebraSpec) -> Tuple[Fraction, Optional[Tuple[str, str, str]]]:
    """Like jacobi_report but also names the worst triple."""
    worst = Fraction(0)
    worst_triple = None
    for x, y, z in combinations(alg.generators, 3):
        d = _jacobi_defect(alg, x, y, z)
        if d > worst:
            worst, worst_triple = d, (x.name, y.name, z.name)
    return worst, worst_triple


def conformal_basis(h, d, k):
    """Map sl(2,R) dual components (h, d, k) to the triple (chi0, chi1, chi2).

    chi0 = (h + k)/2, chi1 = (k - h)/2, chi2 = d.  Exact when fed Fractions.
    """
    two = Fraction(2) if isinstance(h, (int, Fraction)) and isinstance(k, (int, Fraction)) else 2.0
    return ((h + k) / two, (k - h) / two, d)


def conformal_basis_inverse(chi):
    """Inverse of conformal_basis: (chi0, chi1, chi2) -> (h, d, k)."""
    chi0, chi1, chi2 = chi
    return (chi0 - chi1, chi2, chi0 + chi1)


def so21_basis(alg: AlgebraSpec) -> List[Element]:
    """The rotated sl(2,R) triple N^0=(H+K)/2, N^1=(K-H)/2, N^2=D as elements."""
    H, D, K = alg.generator("H"), alg.generator("D"), alg.generator("K")
    half = Fraction(1, 2)
    return [{H: half, K: half}, {H: -half, K: half}, {D: Fraction(1)}]


def dump_table(alg: AlgebraSpec) -> dict:
    """Documented JSON shape: every nonzero directed pair, exact coefficients.

    Both orders of each pair are emitted so antisymmetry is visible in the
    artifact itself.
    """
    rows = []
    for (x, y), res in alg.table.items():
        rows.append({
            "lhs": x.name,
            "rhs": y.name,
            "results": [{"gen": g.name, "num": c.numerator, "den": c.denominator}
                        for g, c in sorted(res.items(), key=lambda kv: alg.index[kv[0]])],
        })
    rows.sort(key=lambda r: (r["lhs"], r["rhs"]))
    return {
        "schema_version": 1,
        "N": alg.N,
        "dim": alg.dim,
        "central": alg.central,
        "with_ds": alg.with_ds,
        "brackets": rows,
    }


def dumps_table(alg: AlgebraSpec) -> str:
    return json.dumps(dump_table(alg), indent=2, sort_keys=True)
