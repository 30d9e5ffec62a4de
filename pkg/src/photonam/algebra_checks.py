"""Numerical verification of the Poincare algebra on photon states.

Generators are realized as operators acting on wavefunctions, never as
matrices, and commutators are checked on smooth decaying test states.
Relations between pure multiplication operators hold to rounding; every
relation involving the covariant derivative carries an O(dk^2) stencil
residual that must fall by at least the second-order factor when the grid
is refined.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

import numpy as np

from . import photon_state
from .grids import _readonly, tree_sum

_AXES = {"x": 0, "y": 1, "z": 2}
_EPS = np.zeros((3, 3, 3))
_EPS[0, 1, 2] = _EPS[1, 2, 0] = _EPS[2, 0, 1] = 1.0
_EPS[0, 2, 1] = _EPS[2, 1, 0] = _EPS[1, 0, 2] = -1.0


@dataclass(frozen=True)
class OperatorTag:
    """One of the generators H, P_i, J_i, K_i or a covariant derivative D_i."""

    kind: str               # 'H', 'P', 'J', 'K', 'D'
    axis: int = None        # 0..2 for all kinds except 'H'

    @classmethod
    def parse(cls, label):
        m = re.fullmatch(r"(H)|([PJKD])([xyz])", label)
        if not m:
            raise ValueError(f"unknown operator label {label!r}")
        if m.group(1):
            return cls(kind="H")
        return cls(kind=m.group(2), axis=_AXES[m.group(3)])

    def __str__(self):
        return self.kind if self.kind == "H" else self.kind + "xyz"[self.axis]


@dataclass(frozen=True)
class CommutatorReport:
    """Residual of one commutation relation on one test state."""

    pair: str                   # e.g. "[Jx, Jy]"
    expected: str               # e.g. "i hbar Jz"
    residual: float             # scale-normalized, dimensionless
    residual_raw: float         # ||([A,B] - expected) psi|| / ||psi||
    grid_n: int
    dk: float
    exact: bool                 # True when no derivative is involved


def _as_tag(tag):
    return tag if isinstance(tag, OperatorTag) else OperatorTag.parse(tag)


def apply_generator(tag, wf, boundary="warn"):
    """Apply H = hbar w, P = hbar k, J = i hbar D x k + hbar chi n, K = i hbar w D."""
    tag = _as_tag(tag)
    grid = wf.grid
    hbar = grid.units.hbar

    if tag.kind == "H":
        f = hbar * grid.kfields.omega
        return replace(wf, gL=_readonly(f * wf.gL), gR=_readonly(f * wf.gR))
    if tag.kind == "P":
        f = hbar * grid.kvec[tag.axis]
        return replace(wf, gL=_readonly(f * wf.gL), gR=_readonly(f * wf.gR))

    D = photon_state.covariant_derivative(wf, boundary=boundary)
    i = tag.axis
    if tag.kind == "D":
        return D[i]
    if tag.kind == "K":
        f = 1j * hbar * grid.kfields.omega
        return replace(wf, gL=_readonly(f * D[i].gL), gR=_readonly(f * D[i].gR))
    if tag.kind == "J":
        a, b = (i + 1) % 3, (i + 2) % 3
        k = grid.kvec
        n_i = grid.kfields.nhat[i]
        out = {}
        for chi in photon_state.HELICITIES:
            g = wf.components[chi]
            cross_i = D[a].components[chi] * k[b] - D[b].components[chi] * k[a]
            out[chi] = 1j * hbar * cross_i + hbar * chi * n_i * g
        return replace(wf, gL=_readonly(out[+1]), gR=_readonly(out[-1]))
    raise ValueError(f"unknown operator kind {tag.kind}")


# expected commutators, canonical order; c = speed of light, h = hbar
def _expected(tagA, tagB, wf, boundary):
    """Return (label, wavefunction or None) for [A, B] in canonical order."""
    grid = wf.grid
    h = grid.units.hbar
    c = grid.units.c
    A, B = tagA, tagB

    def scaled(tag, factor):
        g = apply_generator(tag, wf, boundary=boundary)
        return replace(g, gL=_readonly(factor * g.gL), gR=_readonly(factor * g.gR))

    if {A.kind, B.kind} <= {"H", "P"}:
        return "0", None
    if A.kind == "H" and B.kind == "J":
        return "0", None
    if A.kind == "H" and B.kind == "K":
        return f"-i hbar c P{'xyz'[B.axis]}", scaled(OperatorTag("P", B.axis), -1j * h * c)
    if A.kind == "J" and B.kind == "J":
        if A.axis == B.axis:
            return "0", None
        l = 3 - A.axis - B.axis
        s = _EPS[A.axis, B.axis, l]
        return f"i hbar eps J{'xyz'[l]}", scaled(OperatorTag("J", l), 1j * h * s)
    if A.kind == "K" and B.kind == "K":
        if A.axis == B.axis:
            return "0", None
        l = 3 - A.axis - B.axis
        s = _EPS[A.axis, B.axis, l]
        return f"-i hbar c^2 eps J{'xyz'[l]}", scaled(OperatorTag("J", l), -1j * h * c * c * s)
    if A.kind == "J" and B.kind in ("P", "K"):
        if A.axis == B.axis:
            return "0", None
        l = 3 - A.axis - B.axis
        s = _EPS[A.axis, B.axis, l]
        return f"i hbar eps {B.kind}{'xyz'[l]}", scaled(OperatorTag(B.kind, l), 1j * h * s)
    if A.kind == "K" and B.kind == "P":
        if A.axis != B.axis:
            return "0", None
        return "i hbar H", scaled(OperatorTag("H"), 1j * h)
    return None


def check_commutator(tagA, tagB, wf, boundary="warn"):
    """Residual of [A, B] psi against the Poincare table (report, never raises)."""
    tagA, tagB = _as_tag(tagA), _as_tag(tagB)
    grid = wf.grid

    found = _expected(tagA, tagB, wf, boundary)
    sign = 1.0
    if found is None:
        found = _expected(tagB, tagA, wf, boundary)
        sign = -1.0
        if found is None:
            raise ValueError(f"no tabulated relation for [{tagA}, {tagB}]")
    label, expected_wf = found

    AB = apply_generator(tagA, apply_generator(tagB, wf, boundary), boundary)
    BA = apply_generator(tagB, apply_generator(tagA, wf, boundary), boundary)
    diff_L = AB.gL - BA.gL
    diff_R = AB.gR - BA.gR
    scale_states = [AB, BA]
    if expected_wf is not None:
        diff_L = diff_L - sign * expected_wf.gL
        diff_R = diff_R - sign * expected_wf.gR
        scale_states.append(expected_wf)

    norm_psi = photon_state.norm(wf)
    w = grid.w_invariant
    resid_norm = float(np.sqrt(tree_sum(w * (np.abs(diff_L) ** 2 + np.abs(diff_R) ** 2)).real))
    scale = max(photon_state.norm(s) for s in scale_states)
    scale = max(scale, 1e-300)

    exact = tagA.kind in ("H", "P") and tagB.kind in ("H", "P")
    if sign < 0:
        label = f"-({label})" if label != "0" else "0"
    return CommutatorReport(
        pair=f"[{tagA}, {tagB}]",
        expected=label,
        residual=resid_norm / scale,
        residual_raw=resid_norm / max(norm_psi, 1e-300),
        grid_n=grid.dims[0],
        dk=grid.dk[0],
        exact=exact,
    )


def check_curvature(wf, axes=(0, 1), boundary="warn"):
    """Residual of [D_i, D_j] = i chi eps_ijl n_l / |k|^2 on the state."""
    i, j = axes
    grid = wf.grid
    D = photon_state.covariant_derivative(wf, boundary=boundary)
    Di_of_Dj = photon_state.covariant_derivative(D[j], boundary="ignore")[i]
    Dj_of_Di = photon_state.covariant_derivative(D[i], boundary="ignore")[j]

    kmag2 = grid.kfields.kmag ** 2
    safe = np.where(kmag2 == 0.0, 1.0, kmag2)
    l = 3 - i - j
    s = _EPS[i, j, l]
    curv = s * grid.kfields.nhat[l] / safe

    res = {}
    for chi in photon_state.HELICITIES:
        comm = Di_of_Dj.components[chi] - Dj_of_Di.components[chi]
        res[chi] = comm - 1j * chi * curv * wf.components[chi]
    w = grid.w_invariant
    resid_norm = float(np.sqrt(tree_sum(w * (np.abs(res[+1]) ** 2 + np.abs(res[-1]) ** 2)).real))
    # scale: curvature term itself
    curv_norm = float(np.sqrt(tree_sum(w * (np.abs(curv * wf.gL) ** 2 + np.abs(curv * wf.gR) ** 2)).real))
    norm_psi = photon_state.norm(wf)
    return CommutatorReport(
        pair=f"[D{'xyz'[i]}, D{'xyz'[j]}]",
        expected=f"i chi eps n{'xyz'[l]} / k^2",
        residual=resid_norm / max(curv_norm, 1e-300),
        residual_raw=resid_norm / max(norm_psi, 1e-300),
        grid_n=grid.dims[0],
        dk=grid.dk[0],
        exact=False,
    )


#: a representative sample of every relation family
DEFAULT_SUITE = (
    ("Px", "Py"),
    ("H", "Px"),
    ("H", "Jz"),
    ("Jx", "Jy"),
    ("Jx", "Py"),
    ("Jx", "Ky"),
    ("Kx", "Px"),
    ("H", "Kx"),
    ("Kx", "Ky"),
)


def run_suite(wf, pairs=DEFAULT_SUITE, curvature=True, boundary="warn"):
    """Run the commutator suite plus the curvature relation on one state."""
    reports = [check_commutator(a, b, wf, boundary=boundary) for a, b in pairs]
    if curvature:
        reports.append(check_curvature(wf, boundary=boundary))
    return reports
