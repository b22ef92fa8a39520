"""Radial tour geometry for 1D projection bases.

A basis is a unit p-vector; projecting data onto it gives one score per
observation. The radial tour varies the magnitude of one variable's
contribution while keeping its direction: the basis rotates in the plane
spanned by the current basis and the manipulation direction (the unit
vector orthogonal to the basis along which the selected variable's axis
moves). All other variables' coefficients shrink or grow by a common
factor, so the projection keeps its interpretation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBasisError
from .scaling import ScaledMatrix
from .validation import as_vector, check_arity

ZERO_NORM_TOL = 1e-12
LONE_AXIS_TOL = 1e-9
ORTHO_TOL = 1e-10
DEFAULT_ANGLE_STEP = 0.05


@dataclass(frozen=True)
class Waypoints:
    """Frame indices of the tour's landmark bases."""

    start: int
    full: int
    zero: int
    ret: int


@dataclass(frozen=True)
class TourPath:
    """An ordered sweep of bases varying one variable's contribution."""

    manip_var: int
    angles: np.ndarray   # (n_frames,)
    bases: np.ndarray    # (n_frames, p)
    waypoints: Waypoints

    @property
    def n_frames(self) -> int:
        return len(self.angles)


def attribution_to_basis(v) -> np.ndarray:
    """Normalize an attribution row to a unit projection basis."""
    v = as_vector(v, "attribution")
    norm = float(np.linalg.norm(v))
    if norm < ZERO_NORM_TOL:
        raise DegenerateBasisError("attribution has no direction (zero vector)")
    return v / norm


def restrict_basis(b, include) -> np.ndarray:
    """Zero out coefficients outside `include` and renormalize."""
    b = as_vector(b, "basis")
    include = sorted({int(j) for j in include})
    if not include:
        raise DegenerateBasisError("include set is empty")
    if include[0] < 0 or include[-1] >= b.size:
        raise DegenerateBasisError(f"include indices out of range 0..{b.size - 1}")
    masked = np.zeros_like(b)
    masked[include] = b[include]
    norm = float(np.linalg.norm(masked))
    if norm < ZERO_NORM_TOL:
        raise DegenerateBasisError(
            "restricting to the selected variables leaves a zero basis"
        )
    return masked / norm


def manipulation_direction(b, k: int) -> np.ndarray:
    """Unit vector orthogonal to b along which variable k's axis rotates."""
    b = as_vector(b, "basis")
    if not 0 <= k < b.size:
        raise DegenerateBasisError(f"variable index {k} out of range 0..{b.size - 1}")
    bk = float(b[k])
    if abs(bk) >= 1.0 - LONE_AXIS_TOL:
        raise DegenerateBasisError(
            "basis is already entirely this variable; no radial direction exists"
        )
    m = -bk * b
    m[k] += 1.0
    return m / np.linalg.norm(m)


def rotate(b, m, theta: float) -> np.ndarray:
    """Rotate basis b by theta radians within the plane spanned by (b, m)."""
    b = as_vector(b, "basis")
    m = check_arity(as_vector(m, "direction"), b.size, "direction")
    if abs(float(b @ m)) > ORTHO_TOL:
        raise DegenerateBasisError("manipulation direction is not orthogonal to basis")
    return math.cos(theta) * b + math.sin(theta) * m


def radial_path(b, k: int, angle_step: float = DEFAULT_ANGLE_STEP) -> TourPath:
    """Sweep variable k's contribution: start -> full -> zero -> start.

    The sign of the starting contribution is preserved on the way to full
    contribution (positive when starting from exactly zero). Waypoint frames
    are exact even when off the angle grid.
    """
    if angle_step <= 0:
        raise DegenerateBasisError("angle_step must be positive")
    b = as_vector(b, "basis")
    m = manipulation_direction(b, k)
    bk = float(b[k])
    sk = math.sqrt(max(0.0, 1.0 - bk * bk))
    alpha = math.atan2(sk, bk)  # in (0, pi): contribution at angle t is cos(t - alpha)
    theta_full = alpha if bk >= 0 else alpha - math.pi
    theta_zero = alpha - math.pi / 2

    angles = [0.0]
    full_idx = zero_idx = 0
    for a, z in ((0.0, theta_full), (theta_full, theta_zero), (theta_zero, 0.0)):
        span = z - a
        if span == 0.0:  # only when the start contribution is already zero
            continue
        step = math.copysign(angle_step, span)
        count = int(abs(span) / angle_step)
        for i in range(1, count + 1):
            t = a + i * step
            if abs(t - a) < abs(span):
                angles.append(t)
        angles.append(z)
        if z == theta_full:
            full_idx = len(angles) - 1
        elif z == theta_zero:
            zero_idx = len(angles) - 1

    angles_arr = np.array(angles)
    bases = np.cos(angles_arr)[:, None] * b[None, :] + np.sin(angles_arr)[:, None] * m[None, :]
    bases[0] = b  # theta=0 exactly reproduces the start
    bases[-1] = b
    return TourPath(
        manip_var=int(k),
        angles=angles_arr,
        bases=bases,
        waypoints=Waypoints(start=0, full=full_idx, zero=zero_idx,
                            ret=len(angles) - 1),
    )


def project(xs, b) -> np.ndarray:
    """Projected score of each row onto the basis."""
    values = xs.values if isinstance(xs, ScaledMatrix) else np.asarray(xs, dtype=float)
    b = as_vector(b, "basis")
    check_arity(b, values.shape[1], "basis")
    return values @ b
