"""Time evolution on an orbit.

The free Hamiltonian flow is linear with a nilpotent external part, so a
closed form exists and acts as the oracle for the fixed-step RK4 baseline.
The oscillator deformation of the Hamiltonian (h + sign * omega^2 * k,
supported for the N=1 Schrodinger case) is integrated numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .algebra import build_algebra
from .coadjoint import casimir_values
from .errors import BadStep, ShapeMismatch, TooFewSamples, UnsupportedHamiltonian
from .poisson import EPS2, PhasePoint, dual_vector_at, generators_at

__all__ = [
    "HamiltonianChoice",
    "PhaseTangent",
    "Trajectory",
    "time_derivative",
    "closed_form",
    "integrate",
    "verify_motion_order",
    "conditioning_threshold",
    "eval_state",
    "record_values",
    "trajectory_csv_text",
    "CSV_FLOAT_FORMAT",
    "FREE",
]

CSV_FLOAT_FORMAT = "%.17g"

_fact = math.factorial


@dataclass(frozen=True)
class HamiltonianChoice:
    """Free flow, or the Newton-Hooke deformation h + sign * omega^2 * k."""

    tag: str = "free"
    omega: float = 0.0
    sign: int = 1

    def __post_init__(self):
        if self.tag not in ("free", "newton_hooke"):
            raise UnsupportedHamiltonian(f"unknown Hamiltonian tag {self.tag!r}")
        if self.tag == "newton_hooke":
            if not self.omega > 0:
                raise UnsupportedHamiltonian("newton_hooke requires omega > 0")
            if self.sign not in (1, -1):
                raise UnsupportedHamiltonian("sign must be +1 or -1")

    @property
    def free(self) -> bool:
        return self.tag == "free"


FREE = HamiltonianChoice()


@dataclass
class PhaseTangent:
    q: np.ndarray
    p: np.ndarray
    s: object
    chi: np.ndarray


def _zero_spin_rate(pt: PhasePoint):
    return np.zeros(3) if pt.dim == 3 else 0.0


def time_derivative(pt: PhasePoint, ham: HamiltonianChoice = FREE) -> PhaseTangent:
    """Hamiltonian vector field at pt.

    Free flow: each q level feeds the one above, the top level is driven by
    the momentum block, momenta cascade downward with p_0 frozen, the spin
    is inert and chi turns inside its hyperboloid.
    """
    N, dim, m = pt.N, pt.dim, pt.m
    chi = pt.chi
    if ham.free:
        dq = np.zeros_like(pt.q)
        dp = np.zeros_like(pt.p)
        top = pt.q.shape[0] - 1
        for k in range(top):
            dq[k] = pt.q[k + 1]
        if dim == 3:
            dq[top] = pt.p[top] / m
        else:
            dq[top] = (EPS2.T @ pt.p[top - 1]) / m
        for k in range(1, pt.p.shape[0]):
            dp[k] = -pt.p[k - 1]
        dchi = np.array([chi[2], chi[2], chi[0] - chi[1]])
        return PhaseTangent(q=dq, p=dp, s=_zero_spin_rate(pt), chi=dchi)
    if (N, dim) != (1, 3):
        raise UnsupportedHamiltonian(
            "the Newton-Hooke flow is implemented for N=1 in dimension 3 only")
    w2 = ham.sign * ham.omega ** 2
    dq = pt.p / m
    dp = -w2 * m * pt.q
    # internal part of h + sign w^2 k is (1+w2) chi0 - (1-w2) chi1
    dchi = np.array([
        (1.0 - w2) * chi[2],
        (1.0 + w2) * chi[2],
        (1.0 - w2) * chi[0] - (1.0 + w2) * chi[1],
    ])
    return PhaseTangent(q=dq, p=dp, s=np.zeros(3), chi=dchi)


def _step_state(pt: PhasePoint, tang: PhaseTangent, h: float) -> PhasePoint:
    return PhasePoint(q=pt.q + h * tang.q, p=pt.p + h * tang.p,
                      s=pt.s + h * tang.s, chi=pt.chi + h * tang.chi, m=pt.m)


def _rk4_step(pt: PhasePoint, ham: HamiltonianChoice, dt: float) -> PhasePoint:
    k1 = time_derivative(pt, ham)
    k2 = time_derivative(_step_state(pt, k1, dt / 2.0), ham)
    k3 = time_derivative(_step_state(pt, k2, dt / 2.0), ham)
    k4 = time_derivative(_step_state(pt, k3, dt), ham)
    comb = PhaseTangent(
        q=(k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q) / 6.0,
        p=(k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p) / 6.0,
        s=(k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s) / 6.0,
        chi=(k1.chi + 2.0 * k2.chi + 2.0 * k3.chi + k4.chi) / 6.0,
    )
    return _step_state(pt, comb, dt)


def closed_form(pt: PhasePoint, t: float, ham: HamiltonianChoice = FREE) -> PhasePoint:
    """Exact free-flow state at time t.

    The external solution is the terminating polynomial of the nilpotent
    flow; chi is quadratic in t because chi0 - chi1 is conserved.
    """
    if not ham.free:
        raise UnsupportedHamiltonian("closed form available for the free flow only")
    N, dim, m = pt.N, pt.dim, pt.m
    q0, p0 = pt.q, pt.p
    np_levels = p0.shape[0]
    p_t = np.zeros_like(p0)
    for k in range(np_levels):
        acc = np.zeros(dim)
        for r in range(k + 1):
            acc += ((-t) ** r / _fact(r)) * p0[k - r]
        p_t[k] = acc
    q_t = np.zeros_like(q0)
    top = q0.shape[0] - 1
    for k in range(top + 1):
        acc = np.zeros(dim)
        for r in range(top - k + 1):
            acc += (t ** r / _fact(r)) * q0[k + r]
        if dim == 3:
            for r in range(np_levels):
                power = top - k + 1 + r
                acc += ((-1.0) ** r * t ** power / _fact(power)) * p0[np_levels - 1 - r] / m
        else:
            for r in range(np_levels):
                power = top - k + 1 + r
                acc += ((-1.0) ** r * t ** power / _fact(power)) \
                    * (EPS2.T @ p0[np_levels - 1 - r]) / m
        q_t[k] = acc
    e = pt.chi[0] - pt.chi[1]
    chi_t = np.array([
        pt.chi[0] + pt.chi[2] * t + e * t * t / 2.0,
        pt.chi[1] + pt.chi[2] * t + e * t * t / 2.0,
        pt.chi[2] + e * t,
    ])
    return PhasePoint(q=q_t, p=p_t, s=np.copy(pt.s) if dim == 3 else pt.s,
                      chi=chi_t, m=m)


@dataclass
class Trajectory:
    """Time-stamped states with recorded generator and Casimir values."""

    times: np.ndarray
    states: List[PhasePoint]
    recorded: Dict[str, np.ndarray] = field(default_factory=dict)
    dt: Optional[float] = None

    @property
    def N(self) -> int:
        return self.states[0].N

    @property
    def dim(self) -> int:
        return self.states[0].dim

    def q0_samples(self) -> np.ndarray:
        return np.array([st.q[0] for st in self.states])


def record_values(states: Sequence[PhasePoint]) -> Dict[str, np.ndarray]:
    """Generator and Casimir values for a sequence of states."""
    pt0 = states[0]
    alg = build_algebra(pt0.N, pt0.dim, central=True)
    names = ["h", "d", "k"]
    rec: Dict[str, List[float]] = {n: [] for n in names}
    rec["j"] = []
    for n in ("C1", "C2", "C3"):
        rec[n] = []
    for st in states:
        g = generators_at(st)
        for n in names:
            rec[n].append(g[n])
        rec["j"].append(np.atleast_1d(np.asarray(g["j"], dtype=float)))
        c1, c2, c3 = casimir_values(alg, dual_vector_at(st))
        rec["C1"].append(c1)
        rec["C2"].append(c2)
        rec["C3"].append(c3)
    return {n: np.array(v) for n, v in rec.items()}


def integrate(pt0: PhasePoint, ham: HamiltonianChoice, T: float, dt: float,
              method: str = "rk4", record: bool = True) -> Trajectory:
    """Sample the flow at t = 0, dt, ..., T.

    method "rk4" is the classical fixed-step integrator; "closed" evaluates
    the exact free solution at every sample.
    """
    if T < 0:
        raise BadStep("T must be nonnegative")
    if T > 0 and (dt <= 0 or dt > T * (1 + 1e-12)):
        raise BadStep(f"need 0 < dt <= T, got dt={dt}, T={T}")
    if method not in ("rk4", "closed"):
        raise BadStep(f"unknown method {method!r}")
    n_steps = 0 if T == 0 else int(round(T / dt))
    times = np.array([i * dt for i in range(n_steps + 1)]) if n_steps else np.array([0.0])
    states = [pt0.copy()]
    if method == "closed":
        for t in times[1:]:
            states.append(closed_form(pt0, float(t), ham))
    else:
        cur = pt0.copy()
        for _ in range(n_steps):
            cur = _rk4_step(cur, ham, dt)
            states.append(cur)
    rec = record_values(states) if record else {}
    return Trajectory(times=times, states=states, recorded=rec,
                      dt=dt if n_steps else None)


def _uniform_dt(traj: Trajectory) -> float:
    t = traj.times
    if len(t) < 2:
        raise TooFewSamples("need at least two samples")
    steps = np.diff(t)
    dt = float(steps[0])
    if float(np.max(np.abs(steps - dt))) > 1e-9 * max(dt, 1e-30):
        raise TooFewSamples("order check requires uniform sampling")
    return dt


def verify_motion_order(traj: Trajectory, N: Optional[int] = None):
    """Check that the base coordinate moves on a degree-N polynomial.

    Returns (fit_residual, scaled_diff): the max deviation from the
    least-squares degree-N fit of q_0 per axis, and the max (N+1)-th forward
    difference divided by dt^(N+1), taken on the coarsest subgrid that keeps
    N+3 samples (finer grids would only amplify rounding noise).
    """
    if N is None:
        N = traj.N
    n = len(traj.times)
    if n < N + 3:
        raise TooFewSamples(f"need at least {N + 3} samples, have {n}")
    dt = _uniform_dt(traj)
    y = traj.q0_samples()
    t = traj.times
    span = t[-1] - t[0]
    tt = (t - t[0]) / span * 2.0 - 1.0 if span > 0 else t * 0.0
    residual = 0.0
    for a in range(y.shape[1]):
        coeffs = np.polynomial.polynomial.polyfit(tt, y[:, a], N)
        fit = np.polynomial.polynomial.polyval(tt, coeffs)
        residual = max(residual, float(np.max(np.abs(fit - y[:, a]))))
    stride = max(1, (n - 1) // (N + 2))
    sub = y[::stride]
    dt_eff = dt * stride
    diffs = np.diff(sub, n=N + 1, axis=0) / dt_eff ** (N + 1)
    scaled = float(np.max(np.abs(diffs))) if diffs.size else 0.0
    return residual, scaled


def conditioning_threshold(traj: Trajectory, N: Optional[int] = None) -> float:
    """Noise level below which the (N+1)-th difference counts as zero.

    Model: each sample carries absolute noise of order
    128 * eps * n_samples * max(1, |q_0|), amplified by 2^(N+1) by the
    difference stencil and divided by dt_eff^(N+1) on the decimated grid.
    """
    if N is None:
        N = traj.N
    n = len(traj.times)
    dt = _uniform_dt(traj)
    stride = max(1, (n - 1) // (N + 2))
    dt_eff = dt * stride
    scale = max(1.0, float(np.max(np.abs(traj.q0_samples()))))
    noise = 128.0 * float(np.finfo(float).eps) * n * scale
    return float(2.0 ** (N + 1) * noise / dt_eff ** (N + 1))


def eval_state(traj: Trajectory, t: float) -> PhasePoint:
    """Local Lagrange interpolation of the stored states at time t.

    The window keeps N+2 nearest samples, which reproduces the polynomial
    free solution exactly up to integrator noise.
    """
    times = traj.times
    n = len(times)
    if n == 1:
        return traj.states[0].copy()
    w = min(n, max(4, traj.N + 2))
    center = int(np.searchsorted(times, t))
    lo = max(0, min(center - w // 2, n - w))
    idx = range(lo, lo + w)
    ts = times[lo:lo + w]
    weights = []
    for i, ti in enumerate(ts):
        wgt = 1.0
        for j2, tj in enumerate(ts):
            if i != j2:
                wgt *= (ti - tj)
        weights.append(1.0 / wgt)
    # barycentric form, exact hit fallback
    for i, ti in enumerate(ts):
        if t == ti:
            return traj.states[lo + i].copy()
    coef = np.array([weights[i] / (t - ts[i]) for i in range(w)])
    coef = coef / np.sum(coef)

    def blend(values):
        return sum(c * v for c, v in zip(coef, values))

    pts = [traj.states[i] for i in idx]
    return PhasePoint(
        q=blend([p.q for p in pts]),
        p=blend([p.p for p in pts]),
        s=blend([np.asarray(p.s, dtype=float) for p in pts]) if traj.dim == 3
        else float(blend([p.s for p in pts])),
        chi=blend([p.chi for p in pts]),
        m=traj.states[0].m,
    )


def _csv_header(N: int, dim: int) -> List[str]:
    cols = ["t"]
    for k in range((N + 1) // 2 if dim == 3 else N // 2 + 1):
        cols += [f"q{k}_{a + 1}" for a in range(dim)]
    for k in range((N + 1) // 2 if dim == 3 else N // 2):
        cols += [f"p{k}_{a + 1}" for a in range(dim)]
    cols += [f"s_{i + 1}" for i in range(3)] if dim == 3 else ["s"]
    cols += ["chi0", "chi1", "chi2", "h", "d", "k"]
    cols += [f"j_{i + 1}" for i in range(3)] if dim == 3 else ["j"]
    cols += ["C1", "C2", "C3"]
    return cols


def trajectory_csv_text(traj: Trajectory) -> str:
    """CSV body with a mandatory header row and 17 significant digits."""
    if not traj.recorded:
        raise ShapeMismatch("trajectory was integrated without recording")
    N, dim = traj.N, traj.dim
    lines = [",".join(_csv_header(N, dim))]
    fmt = CSV_FLOAT_FORMAT
    for i, st in enumerate(traj.states):
        row = [fmt % traj.times[i]]
        row += [fmt % v for v in st.q.reshape(-1)]
        row += [fmt % v for v in st.p.reshape(-1)]
        row += [fmt % v for v in np.atleast_1d(np.asarray(st.s, dtype=float))]
        row += [fmt % v for v in st.chi]
        row += [fmt % traj.recorded[n][i] for n in ("h", "d", "k")]
        row += [fmt % v for v in np.atleast_1d(traj.recorded["j"][i])]
        row += [fmt % traj.recorded[n][i] for n in ("C1", "C2", "C3")]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
