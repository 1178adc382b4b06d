"""Dual-space points, coadjoint flows, orbit classification and Casimirs.

A dual vector collects the coefficients (j, c_j^a, h, d, k, m) of a point in
the dual of a centrally extended algebra.  One-parameter coadjoint flows are
available through two independent routes: closed forms transcribed from the
group action where they exist (the Schrodinger-case table for N=1 and the
tower translations for any N), and a generic route that exponentiates the
ad* matrix assembled from the structure constants.  The two routes are
cross-checked against each other in the verification suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraSpec, GeneratorId, _sign_pow
from .errors import (
    AmbiguousClass,
    ConvergenceFailure,
    LabelMismatch,
    ShapeMismatch,
    UnknownGenerator,
    UnsupportedClosedForm,
)

__all__ = [
    "DualVector",
    "OrbitClass",
    "OrbitLabel",
    "ORBIT_TAGS",
    "classify_orbit",
    "chi_for_class",
    "coad_generic",
    "coad_closed_form",
    "orbit_dual_vector",
    "parametrize",
    "casimir_values",
    "ad_star_matrix",
]

ORBIT_TAGS = ("HplusSigma", "HminusSigma", "Hplus0", "Hminus0",
              "HyperbolicSigma", "Origin")

_fact = math.factorial


def chi_interval(chi) -> float:
    """Invariant quadratic form chi0^2 - chi1^2 - chi2^2."""
    chi = np.asarray(chi, dtype=float)
    return float(chi[0] ** 2 - chi[1] ** 2 - chi[2] ** 2)


def _cross2(u, v) -> float:
    """Scalar cross product of 2-vectors, u^1 v^2 - u^2 v^1."""
    return float(u[0] * v[1] - u[1] * v[0])


def _eps_pair(u, v) -> float:
    """sum_{a,b} eps^{ab} u^b v^a for 2-vectors (equals -_cross2(u, v))."""
    return float(u[1] * v[0] - u[0] * v[1])


@dataclass
class DualVector:
    """Point of the dual space for a centrally extended (N, dim) algebra.

    j is a 3-vector in dimension 3 and a scalar in dimension 2; c has one
    row per tower level.
    """

    m: float
    h: float
    d: float
    k: float
    j: object
    c: np.ndarray

    def __post_init__(self):
        self.c = np.array(self.c, dtype=float)
        if self.c.ndim != 2 or self.c.shape[1] not in (2, 3):
            raise ShapeMismatch(f"c must be (N+1, dim), got {self.c.shape}")
        if self.dim == 3:
            self.j = np.array(self.j, dtype=float).reshape(3)
        else:
            self.j = float(np.asarray(self.j).reshape(()))

    @property
    def N(self) -> int:
        return self.c.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.c.shape[1]

    @property
    def chi(self) -> np.ndarray:
        return np.array([(self.h + self.k) / 2.0, (self.k - self.h) / 2.0, self.d])

    def copy(self) -> "DualVector":
        return DualVector(m=self.m, h=self.h, d=self.d, k=self.k,
                          j=np.copy(self.j) if self.dim == 3 else self.j,
                          c=self.c.copy())

    def to_json(self) -> dict:
        return {
            "m": self.m, "h": self.h, "d": self.d, "k": self.k,
            "j": list(np.atleast_1d(np.asarray(self.j, dtype=float))),
            "c": [list(row) for row in self.c],
        }

    @classmethod
    def from_json(cls, data: dict) -> "DualVector":
        c = np.array(data["c"], dtype=float)
        j = np.array(data["j"], dtype=float)
        if c.shape[1] == 2:
            j = float(j[0]) if j.size else 0.0
        return cls(m=float(data["m"]), h=float(data["h"]), d=float(data["d"]),
                   k=float(data["k"]), j=j, c=c)


def _check_shape(alg: AlgebraSpec, X: DualVector) -> None:
    if not alg.central:
        raise ShapeMismatch("dual vectors carry a mass component; "
                            "the algebra must be centrally extended")
    if X.N != alg.N or X.dim != alg.dim:
        raise ShapeMismatch(
            f"dual vector shaped for N={X.N}, dim={X.dim}; "
            f"algebra has N={alg.N}, dim={alg.dim}")


def dual_to_vector(alg: AlgebraSpec, X: DualVector) -> np.ndarray:
    _check_shape(alg, X)
    v = np.zeros(len(alg.generators))
    idx = alg.index
    if alg.dim == 3:
        for a in range(3):
            v[idx[GeneratorId("J", axis=a + 1)]] = X.j[a]
    else:
        v[idx[GeneratorId("J")]] = X.j
    for j in range(alg.N + 1):
        for a in range(alg.dim):
            v[idx[GeneratorId("C", axis=a + 1, level=j)]] = X.c[j, a]
    v[idx[GeneratorId("H")]] = X.h
    v[idx[GeneratorId("D")]] = X.d
    v[idx[GeneratorId("K")]] = X.k
    v[idx[GeneratorId("M")]] = X.m
    return v


def dual_from_vector(alg: AlgebraSpec, v: np.ndarray) -> DualVector:
    idx = alg.index
    c = np.zeros((alg.N + 1, alg.dim))
    for j in range(alg.N + 1):
        for a in range(alg.dim):
            c[j, a] = v[idx[GeneratorId("C", axis=a + 1, level=j)]]
    if alg.dim == 3:
        jj = np.array([v[idx[GeneratorId("J", axis=a + 1)]] for a in range(3)])
    else:
        jj = float(v[idx[GeneratorId("J")]])
    return DualVector(m=float(v[idx[GeneratorId("M")]]),
                      h=float(v[idx[GeneratorId("H")]]),
                      d=float(v[idx[GeneratorId("D")]]),
                      k=float(v[idx[GeneratorId("K")]]),
                      j=jj, c=c)


def ad_star_matrix(alg: AlgebraSpec, A) -> np.ndarray:
    """Matrix B with B[z, y] = coefficient of Z in [A, Y]/i.

    The coadjoint flow of exp(i*t*A) acts on dual coordinate vectors as
    exp(t*B)^T.
    """
    n = len(alg.generators)
    B = np.zeros((n, n))
    idx = alg.index
    for gx, cx in A.items():
        if gx not in idx:
            raise UnknownGenerator(str(gx))
        fx = float(cx)
        for gy in alg.generators:
            row = alg.table.get((gx, gy))
            if not row:
                continue
            iy = idx[gy]
            for gz, cz in row.items():
                B[idx[gz], iy] += fx * float(cz)
    return B


def _expm(mat: np.ndarray, term_tol: float = 1e-17, max_terms: int = 40) -> np.ndarray:
    """Matrix exponential: exact finite sum for nilpotent input, otherwise
    scaling-and-squaring with a certified series tail bound."""
    n = mat.shape[0]
    eye = np.eye(n)
    if not np.any(mat):
        return eye
    # Structure constants are exactly representable, so powers of a nilpotent
    # ad* matrix hit exact zero.
    power = mat.copy()
    out = eye + mat
    fact = 1.0
    for k in range(2, n + 2):
        power = power @ mat
        if not np.any(power):
            return out
        if float(np.max(np.abs(power))) > 1e120:
            break  # clearly not nilpotent; avoid overflowing the probe
        fact *= k
        out = out + power / fact
    # Not nilpotent: scale so the norm is at most 1/2, sum, square back.
    norm = float(np.linalg.norm(mat, np.inf))
    if not math.isfinite(norm):
        raise ConvergenceFailure("ad* matrix has non-finite entries")
    s = max(0, int(math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0)
    B = mat / (2.0 ** s)
    theta = min(0.5, float(np.linalg.norm(B, np.inf)))
    out = eye.copy()
    term = eye.copy()
    for k in range(1, max_terms + 1):
        term = term @ B / k
        out = out + term
        tail = theta ** (k + 1) / math.factorial(k + 1) / (1.0 - theta)
        if tail < term_tol:
            break
    else:
        raise ConvergenceFailure(
            f"series tail bound stuck above {term_tol} after {max_terms} terms")
    for _ in range(s):
        out = out @ out
    return out


def coad_generic(alg: AlgebraSpec, A, t: float, X: DualVector) -> DualVector:
    """Coadjoint action of exp(i*t*A) on X via the exponential of ad*.

    The sum is exact (finite) whenever ad*_A is nilpotent, which covers all
    tower translations; otherwise a scaled-and-squared series with a
    certified tail bound below 1e-12 is used.
    """
    B = ad_star_matrix(alg, A)
    flow = _expm(t * B).T
    return dual_from_vector(alg, flow @ dual_to_vector(alg, X))


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def _ctrans_dim3(N: int, x: np.ndarray, X: DualVector) -> DualVector:
    """Tower translation exp(i x_k^a C_k^a) on the dual, dimension 3, N odd."""
    m = X.m
    c = X.c
    halfN = N / 2.0
    jv = np.array(X.j, dtype=float)
    h, d, k = X.h, X.d, X.k
    cp = c.copy()
    for j in range(N + 1):
        f = _sign_pow(j - (N - 1) // 2) * _fact(j) * _fact(N - j)
        cp[j] = c[j] + m * f * x[N - j]
    for j in range(N + 1):
        g = _sign_pow(j - (N + 1) // 2) * _fact(j) * _fact(N - j)
        jv = jv - np.cross(x[j], c[j]) - (m / 2.0) * g * np.cross(x[N - j], x[j])
        d = d - (halfN - j) * float(x[j] @ c[j]) \
            + (m / 2.0) * (halfN - j) * g * float(x[j] @ x[N - j])
    for j in range(N):
        h = h + (j + 1) * float(x[j + 1] @ c[j])
        k = k - (N - j) * float(x[j] @ c[j + 1])
        k = k + (m / 2.0) * _sign_pow(j - (N - 1) // 2) \
            * _fact(j + 1) * _fact(N - j) * float(x[j] @ x[N - j - 1])
    for j in range(1, N + 1):
        h = h + (m / 2.0) * _sign_pow(j - (N + 1) // 2) \
            * _fact(j) * _fact(N - j + 1) * float(x[j] @ x[N - j + 1])
    return DualVector(m=m, h=h, d=d, k=k, j=jv, c=cp)


def _ctrans_dim2(N: int, x: np.ndarray, X: DualVector) -> DualVector:
    """Tower translation on the dual, dimension 2, N even.

    The quadratic term of the k row uses the orientation that follows from
    the central bracket (and matches the printed orbit parametrization).
    """
    m = X.m
    c = X.c
    halfN = N / 2.0
    js = float(X.j)
    h, d, k = X.h, X.d, X.k
    eps = np.array([[0.0, 1.0], [-1.0, 0.0]])  # eps[a, b] = eps^{ab}, 0-based
    cp = c.copy()
    for j in range(N + 1):
        f = _sign_pow((N - 2 * j) // 2) * _fact(j) * _fact(N - j)
        cp[j] = c[j] - m * f * (eps.T @ x[N - j])  # component b: eps^{ab} x^a
    for j in range(N + 1):
        g = _sign_pow((2 * j - N) // 2) * _fact(j) * _fact(N - j)
        js = js - _cross2(x[j], c[j]) + (m / 2.0) * g * float(x[j] @ x[N - j])
        d = d - (halfN - j) * float(x[j] @ c[j]) \
            + (m / 2.0) * (halfN - j) * g * _eps_pair(x[j], x[N - j])
    for j in range(N):
        h = h + (j + 1) * float(x[j + 1] @ c[j])
        k = k - (N - j) * float(x[j] @ c[j + 1])
        k = k - (m / 2.0) * _sign_pow((2 * j - N) // 2) \
            * _fact(j + 1) * _fact(N - j) * _eps_pair(x[j], x[N - j - 1])
    for j in range(1, N + 1):
        h = h + (m / 2.0) * _sign_pow((2 * j - N) // 2) \
            * _fact(j) * _fact(N - j + 1) * _eps_pair(x[j], x[N - j + 1])
    return DualVector(m=m, h=h, d=d, k=k, j=js, c=cp)


def ctrans(X: DualVector, x) -> DualVector:
    """Closed-form coadjoint action of a tower translation on X."""
    x = np.asarray(x, dtype=float)
    if x.shape != X.c.shape:
        raise ShapeMismatch(f"parameter array must be {X.c.shape}, got {x.shape}")
    if X.dim == 3:
        return _ctrans_dim3(X.N, x, X)
    return _ctrans_dim2(X.N, x, X)


def rotation_matrix(omega) -> np.ndarray:
    """Rotation applied to dual 3-vectors by the flow of exp(i omega.J)."""
    omega = np.asarray(omega, dtype=float)
    theta = float(np.linalg.norm(omega))
    if theta == 0.0:
        return np.eye(3)
    n = omega / theta
    nx = np.array([[0.0, -n[2], n[1]], [n[2], 0.0, -n[0]], [-n[1], n[0], 0.0]])
    # dual coordinates flow by exp(-theta [n]_x)
    return np.eye(3) - math.sin(theta) * nx + (1.0 - math.cos(theta)) * (nx @ nx)


def coad_closed_form(alg: AlgebraSpec, family: str, params, X: DualVector) -> DualVector:
    """Printed closed-form coadjoint flows.

    family "ctrans" works for any supported (N, dim) and takes an
    (N+1) x dim parameter array.  The one-parameter families "translation",
    "boost", "time", "dilation", "conformal" and "rotation" are the
    Schrodinger-case columns and require N=1, dim=3.  The mass component is
    invariant under every flow.
    """
    _check_shape(alg, X)
    if family == "ctrans":
        return ctrans(X, params)
    if (alg.N, alg.dim) != (1, 3):
        raise UnsupportedClosedForm(
            f"no printed closed form for family {family!r} at N={alg.N}, dim={alg.dim}")
    if family == "translation":
        a = np.asarray(params, dtype=float).reshape(3)
        return ctrans(X, np.array([a, np.zeros(3)]))
    if family == "boost":
        v = np.asarray(params, dtype=float).reshape(3)
        return ctrans(X, np.array([np.zeros(3), v]))
    if family == "time":
        tau = float(params)
        out = X.copy()
        out.c = X.c.copy()
        out.c[1] = X.c[1] + tau * X.c[0]
        out.d = X.d + tau * X.h
        out.k = X.k + 2.0 * tau * X.d + tau * tau * X.h
        return out
    if family == "dilation":
        lam = float(params)
        out = X.copy()
        out.c[0] = math.exp(lam / 2.0) * X.c[0]
        out.c[1] = math.exp(-lam / 2.0) * X.c[1]
        out.h = math.exp(lam) * X.h
        out.k = math.exp(-lam) * X.k
        return out
    if family == "conformal":
        u = float(params)
        out = X.copy()
        out.c[0] = X.c[0] + u * X.c[1]
        out.h = X.h + 2.0 * u * X.d + u * u * X.k
        out.d = X.d + u * X.k
        return out
    if family == "rotation":
        R = rotation_matrix(params)
        out = X.copy()
        out.j = R @ X.j
        out.c[0] = R @ X.c[0]
        out.c[1] = R @ X.c[1]
        return out
    raise UnsupportedClosedForm(f"unknown family {family!r}")


# ---------------------------------------------------------------------------
# orbits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitClass:
    """Orbit of the internal sl(2,R) variables; sigma is 0 except on the
    two-sheet (HplusSigma/HminusSigma) and one-sheet (HyperbolicSigma)
    hyperboloids."""

    tag: str
    sigma: float = 0.0

    def __post_init__(self):
        if self.tag not in ORBIT_TAGS:
            raise LabelMismatch(f"unknown orbit tag {self.tag!r}")
        if self.tag in ("Hplus0", "Hminus0", "Origin") and self.sigma != 0.0:
            raise LabelMismatch(f"{self.tag} requires sigma = 0")
        if self.sigma < 0:
            raise LabelMismatch("sigma must be nonnegative")


@dataclass(frozen=True)
class OrbitLabel:
    """Invariants naming a coadjoint orbit.

    s2 is the squared internal spin length in dimension 3 and the signed
    scalar spin in dimension 2.
    """

    m: float
    s2: float
    chi_class: OrbitClass

    def __post_init__(self):
        if not self.m > 0:
            raise LabelMismatch("orbit labels require m > 0")


def classify_orbit(chi, tol: float = 1e-9) -> OrbitClass:
    """Classify a chi triple by the invariant interval and the sign of chi0.

    Pass tol=0 for analytically constructed points.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    chi = np.asarray(chi, dtype=float).reshape(3)
    I = chi_interval(chi)
    if I > tol:
        s = math.sqrt(I)
        return OrbitClass("HplusSigma" if chi[0] > 0 else "HminusSigma", s)
    if I < -tol:
        return OrbitClass("HyperbolicSigma", math.sqrt(-I))
    if float(np.linalg.norm(chi)) <= tol:
        return OrbitClass("Origin")
    if chi[0] > tol:
        return OrbitClass("Hplus0")
    if chi[0] < -tol:
        return OrbitClass("Hminus0")
    raise AmbiguousClass(
        f"chi={chi.tolist()} sits within tol={tol} of the cone but is neither "
        "near the origin nor has a decisive chi0 sign")


def chi_for_class(cls: OrbitClass) -> np.ndarray:
    """A canonical chi representative for each orbit class."""
    s = cls.sigma
    return {
        "HplusSigma": np.array([s, 0.0, 0.0]),
        "HminusSigma": np.array([-s, 0.0, 0.0]),
        "Hplus0": np.array([1.0, 1.0, 0.0]),
        "Hminus0": np.array([-1.0, 1.0, 0.0]),
        "HyperbolicSigma": np.array([0.0, s, 0.0]),
        "Origin": np.zeros(3),
    }[cls.tag]


def orbit_dual_vector(m: float, s, chi, x_levels) -> DualVector:
    """Dual point with internal values (s, chi) moved by a tower translation.

    The base point has no tower components and (h, d, k) read off from chi;
    the external coordinates x_levels then produce the printed orbit
    parametrization.
    """
    x = np.asarray(x_levels, dtype=float)
    chi = np.asarray(chi, dtype=float).reshape(3)
    dim = x.shape[1]
    base = DualVector(
        m=m,
        h=float(chi[0] - chi[1]),
        d=float(chi[2]),
        k=float(chi[0] + chi[1]),
        j=np.asarray(s, dtype=float).reshape(3) if dim == 3 else float(s),
        c=np.zeros_like(x),
    )
    return ctrans(base, x)


def parametrize(label: OrbitLabel, s, chi, x_levels, tol: float = 1e-9) -> DualVector:
    """Orbit parametrization with label consistency enforced.

    Raises LabelMismatch unless (s, chi) actually lie on the orbits the
    label names: the spin invariant must match to 1e-12 and chi must
    classify into label.chi_class.
    """
    x = np.asarray(x_levels, dtype=float)
    dim = x.shape[1]
    if dim == 3:
        s = np.asarray(s, dtype=float).reshape(3)
        s_inv = float(s @ s)
    else:
        s_inv = float(s)
    if abs(s_inv - label.s2) > 1e-12 * max(1.0, abs(label.s2)):
        raise LabelMismatch(
            f"spin invariant {s_inv} does not match label value {label.s2}")
    cls = classify_orbit(chi, tol)
    if cls.tag != label.chi_class.tag:
        raise LabelMismatch(
            f"chi classifies as {cls.tag}, label says {label.chi_class.tag}")
    want = label.chi_class.sigma
    if abs(cls.sigma - want) > max(tol, 1e-9) * max(1.0, abs(want)):
        raise LabelMismatch(f"sigma {cls.sigma} does not match label value {want}")
    return orbit_dual_vector(label.m, s, chi, x)


# ---------------------------------------------------------------------------
# Casimir functions (classical evaluation)
# ---------------------------------------------------------------------------

def casimir_values(alg: AlgebraSpec, X: DualVector):
    """Classical Casimir triple (C1, C2, C3).

    All products are taken commutatively, so the symmetrized operator
    orderings collapse; on a parametrized orbit C2 equals m^2 s^2
    (dimension 3) or m s (dimension 2) and C3 equals twice m^2 times the
    chi interval.
    """
    _check_shape(alg, X)
    N, dim = X.N, X.dim
    m, c = X.m, X.c
    halfN = N / 2.0
    if dim == 3:
        w = np.zeros(3)
        A = B = Cq = 0.0
        for j in range(N + 1):
            alpha = _sign_pow(j - (N + 1) // 2) / (_fact(j) * _fact(N - j))
            w = w + 0.5 * alpha * np.cross(c[j], c[N - j])
            Cq += 0.5 * alpha * (j - halfN) * float(c[j] @ c[N - j])
            if j >= 1:
                A += 0.5 * _sign_pow(j - (N + 1) // 2) \
                    / (_fact(j - 1) * _fact(N - j)) * float(c[j - 1] @ c[N - j])
            if j <= N - 1:
                B -= 0.5 * _sign_pow(j - (N + 1) // 2) \
                    / (_fact(j) * _fact(N - j - 1)) * float(c[j + 1] @ c[N - j])
        vec = m * np.asarray(X.j, dtype=float) - w
        C2 = float(vec @ vec)
    else:
        acc = A = B = Cq = 0.0
        for j in range(N + 1):
            beta = _sign_pow((2 * j - N) // 2) / (_fact(j) * _fact(N - j))
            acc += 0.5 * beta * float(c[N - j] @ c[j])
            Cq += 0.5 * beta * (j - halfN) * _eps_pair(c[j], c[N - j])
            if j >= 1:
                A += 0.5 * _sign_pow((2 * j - N) // 2) \
                    / (_fact(j - 1) * _fact(N - j)) * _eps_pair(c[j - 1], c[N - j])
            if j <= N - 1:
                B -= 0.5 * _sign_pow((2 * j - N) // 2) \
                    / (_fact(j) * _fact(N - j - 1)) * _eps_pair(c[j + 1], c[N - j])
        C2 = m * float(X.j) - acc
    C3 = 2.0 * (m * X.h - A) * (m * X.k - B) - 2.0 * (m * X.d - Cq) ** 2
    return (m, C2, C3)
