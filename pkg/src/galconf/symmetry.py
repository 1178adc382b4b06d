"""Explicitly time-dependent integrals of motion and finite symmetry maps.

Because the Hamiltonian sits inside the symmetry algebra, the conserved
generators depend on time: they are obtained by pulling every generator
function back along the free flow to time zero.  For the Schrodinger case
(N=1, dimension 3) the finite conformal and Galilei transformations of
solutions are implemented in closed form and map free solutions to free
solutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from .dynamics import Trajectory, closed_form, eval_state, record_values
from .errors import NonOrthogonalRotation, SingularTime, UnsupportedClosedForm
from .poisson import PhasePoint, generators_at, dual_vector_at

__all__ = [
    "integrals_of_motion",
    "schrodinger_integrals",
    "conformal_time",
    "conformal_transform",
    "GalileiParams",
    "galilei_transform",
    "ConformalMap",
    "GalileiMap",
    "map_trajectory",
]


def integrals_of_motion(pt: PhasePoint, t: float) -> Dict[str, object]:
    """Values at (state, t) of the time-dependent conserved generators.

    Every generator function is evaluated on the state pulled back along the
    free flow to time zero, which realizes the inverse of the automorphism
    the dynamics induces.  Constant along any free trajectory by
    construction.
    """
    back = closed_form(pt, -t)
    out: Dict[str, object] = dict(generators_at(back))
    X = dual_vector_at(back)
    for j in range(pt.N + 1):
        for a in range(pt.dim):
            out[f"c{j}_{a + 1}"] = X.c[j, a]
    return out


def schrodinger_integrals(pt: PhasePoint, t: float) -> Dict[str, object]:
    """The printed N=1 set: j, p, x - t p/m, h, d - t h, k - 2 t d + t^2 h.

    Kept as an independent cross-check of ``integrals_of_motion``.
    """
    if (pt.N, pt.dim) != (1, 3):
        raise UnsupportedClosedForm("printed integrals exist for N=1, dim 3 only")
    g = generators_at(pt)
    x, p = pt.q[0], pt.p[0]
    return {
        "j": g["j"],
        "p": p.copy(),
        "x_boost": x - t * p / pt.m,
        "h": g["h"],
        "d_shifted": g["d"] - t * g["h"],
        "k_shifted": g["k"] - 2.0 * t * g["d"] + t * t * g["h"],
    }


def conformal_time(t: float, c: float) -> float:
    """t' = t / (1 + c t); raises SingularTime at the pole."""
    denom = 1.0 + c * t
    if abs(denom) < 1e-14:
        raise SingularTime(f"conformal time map singular at t={t}, c={c}")
    return t / denom


def conformal_transform(x, p, t: float, c: float, m: float):
    """Finite conformal map of a Schrodinger-case state.

    x' = x/(1+ct), p' = p(1+ct) - m c x, t' = t/(1+ct).
    """
    denom = 1.0 + c * t
    if abs(denom) < 1e-14:
        raise SingularTime(f"conformal transform singular at t={t}, c={c}")
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    return x / denom, p * denom - m * c * x, t / denom


@dataclass(frozen=True)
class GalileiParams:
    """Rotation, boost, translation and time shift, composed in that order."""

    a: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    v: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    tau: float = 0.0
    R: object = None

    def rotation(self) -> np.ndarray:
        if self.R is None:
            return np.eye(3)
        R = np.asarray(self.R, dtype=float)
        if R.shape != (3, 3) or float(np.max(np.abs(R @ R.T - np.eye(3)))) > 1e-9:
            raise NonOrthogonalRotation("R must be orthogonal to 1e-9")
        return R


def galilei_transform(x, p, t: float, params: GalileiParams, m: float):
    """x' = Rx + a + vt, p' = Rp + mv, t' = t + tau."""
    R = params.rotation()
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    a = np.asarray(params.a, dtype=float)
    v = np.asarray(params.v, dtype=float)
    return R @ x + a + v * t, R @ p + m * v, t + params.tau


class ConformalMap:
    """Finite conformal transformation acting on Schrodinger-case curves."""

    def __init__(self, c: float, m: float):
        self.c = float(c)
        self.m = float(m)

    def time(self, t: float) -> float:
        return conformal_time(t, self.c)

    def inverse_time(self, tp: float) -> float:
        return conformal_time(tp, -self.c)

    def apply(self, x, p, t: float):
        return conformal_transform(x, p, t, self.c, self.m)


class GalileiMap:
    """Finite Galilei transformation acting on Schrodinger-case curves."""

    def __init__(self, params: GalileiParams, m: float):
        self.params = params
        self.m = float(m)
        params.rotation()  # validate eagerly

    def time(self, t: float) -> float:
        return t + self.params.tau

    def inverse_time(self, tp: float) -> float:
        return tp - self.params.tau

    def apply(self, x, p, t: float):
        return galilei_transform(x, p, t, self.params, self.m)


def map_trajectory(traj: Trajectory, transform) -> Trajectory:
    """Transform a Schrodinger-case trajectory and resample uniformly in t'.

    The source curve is evaluated by local polynomial interpolation, so a
    free solution maps to samples of the transformed free solution without
    assuming the result is one; the output must still pass the motion-order
    and conservation checks on its own.  Internal variables ride along
    untransformed.
    """
    if (traj.N, traj.dim) != (1, 3):
        raise UnsupportedClosedForm("finite transforms act on N=1, dim 3 trajectories")
    t0, t1 = float(traj.times[0]), float(traj.times[-1])
    tp0, tp1 = transform.time(t0), transform.time(t1)
    if not (math.isfinite(tp0) and math.isfinite(tp1)):
        raise SingularTime("time map not finite on the trajectory range")
    if isinstance(transform, ConformalMap):
        d0, d1 = 1.0 + transform.c * t0, 1.0 + transform.c * t1
        if d0 * d1 <= 0:
            raise SingularTime("conformal pole inside the trajectory range")
    n = len(traj.times)
    grid = np.linspace(tp0, tp1, n)
    states = []
    m = traj.states[0].m
    for tp in grid:
        t = transform.inverse_time(float(tp))
        src = eval_state(traj, t)
        x, p, _ = transform.apply(src.q[0], src.p[0], t)
        states.append(PhasePoint(q=[x], p=[p], s=src.s, chi=src.chi, m=m))
    dt = float(grid[1] - grid[0]) if n > 1 else None
    return Trajectory(times=grid, states=states, recorded=record_values(states), dt=dt)
