"""Numerical certification of the barrier differential inequalities.

On a space-time lattice covering the assembly's window, the parabolic
operators

    N1 = u_t - u_xx - u(1 - u - av)
    N2 = v_t - d v_xx - rv(1 - v - bu)

are evaluated from the blocks' analytic or ODE-backed derivatives. A super
pair (ū, v̲) needs N1 ≥ 0 and N2 ≤ 0; a sub pair (u̲, v̄) the reverse. The
inequalities hold only in the weak sense across interfaces, so lattice
points within a band of a few cells around each interface are skipped.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..config import CERT_LATTICE, CERTIFY_SLACK, INTERFACE_MARGIN_CELLS
from ..errors import CertificationFailed
from ..model import FloatArray
from .assembly import BarrierAssembly, PiecewiseField

logger = logging.getLogger(__name__)


@dataclass
class PieceMargin:
    """Worst (smallest) sign-corrected residual seen on one piece."""

    component: str
    piece: str
    worst: float = math.inf
    at: tuple[float, float] = (math.nan, math.nan)
    samples: int = 0

    def update(self, t: float, xs: FloatArray, margins: FloatArray) -> None:
        if margins.size == 0:
            return
        i = int(np.argmin(margins))
        self.samples += int(margins.size)
        if margins[i] < self.worst:
            self.worst = float(margins[i])
            self.at = (t, float(xs[i]))

    def as_dict(self) -> dict[str, Any]:
        return {
            "component": self.component,
            "piece": self.piece,
            "worst_margin": self.worst if self.samples else None,
            "at": list(self.at) if self.samples else None,
            "samples": self.samples,
        }


@dataclass
class ResidualReport:
    """Outcome of a certification run."""

    which: str
    certified: bool
    t_end: float
    lattice: tuple[int, int]
    slack: float
    band: float
    window: tuple[float, float]
    margins: list[PieceMargin] = field(default_factory=list)
    constants: dict[str, float] = field(default_factory=dict)
    failures: int = 0

    def worst(self) -> PieceMargin | None:
        sampled = [m for m in self.margins if m.samples]
        return min(sampled, key=lambda m: m.worst) if sampled else None

    def as_dict(self) -> dict[str, Any]:
        return {
            "which": self.which,
            "certified": self.certified,
            "t_end": self.t_end,
            "lattice": list(self.lattice),
            "slack": self.slack,
            "interface_band": self.band,
            "window": list(self.window),
            "failures": self.failures,
            "margins": [m.as_dict() for m in self.margins],
            "constants": dict(self.constants),
        }


def residuals(
    asm: BarrierAssembly, t: float, x: FloatArray
) -> tuple[FloatArray, FloatArray]:
    """(N1, N2) of the assembled pair at time t."""
    p = asm.params
    u, v = asm.evaluate(t, x)
    n1 = u.heat() - u.value * (1.0 - u.value - p.a * v.value)
    n2 = v.heat(p.d) - p.r * v.value * (1.0 - v.value - p.b * u.value)
    return n1, n2


def _away_from_interfaces(
    asm: BarrierAssembly, t: float, x: FloatArray, band: float
) -> np.ndarray:
    keep = np.ones(x.size, dtype=bool)
    for curve in asm.interfaces.values():
        keep &= np.abs(x - curve(t)) > band
    return keep


def _row(
    asm: BarrierAssembly, t: float, x: FloatArray, band: float
) -> tuple[FloatArray, FloatArray, FloatArray, np.ndarray, np.ndarray]:
    xs = x[_away_from_interfaces(asm, t, x, band)]
    n1, n2 = residuals(asm, t, xs)
    sign = 1.0 if asm.which.is_super else -1.0
    return xs, sign * n1, -sign * n2, asm.u.piece_index(t, xs), asm.v.piece_index(t, xs)


def _margins_for(component: str, f: PiecewiseField) -> list[PieceMargin]:
    return [PieceMargin(component, piece.name) for piece in f.pieces]


def certify_residuals(
    asm: BarrierAssembly,
    lattice: tuple[int, int] = CERT_LATTICE,
    t_end: float | None = None,
    margin_cells: float = INTERFACE_MARGIN_CELLS,
    slack: float = CERTIFY_SLACK,
    threads: int = 1,
    raise_on_failure: bool = False,
) -> ResidualReport:
    """Check the sign of (N1, N2) on a (time × space) lattice.

    Args:
        asm: Assembled barrier pair.
        lattice: Number of time and space samples.
        t_end: Final time; defaults to the assembly horizon.
        margin_cells: Half-width of the skipped band around interfaces, in
            lattice cells.
        slack: Allowed violation; margins must be ≥ -slack.
        threads: Worker threads for the time rows.
        raise_on_failure: Raise at the first violating point instead of
            reporting.

    Raises:
        CertificationFailed: With the piece, point and margin, if
            ``raise_on_failure`` is set and a margin is below -slack.
    """
    t_end = asm.horizon if t_end is None else t_end
    n_t, n_x = lattice
    lo, hi = asm.window(t_end)
    x = np.linspace(lo, hi, n_x)
    band = margin_cells * (hi - lo) / (n_x - 1)
    times = np.linspace(0.0, t_end, n_t)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        rows = list(pool.map(lambda t: _row(asm, float(t), x, band), times))

    u_margins = _margins_for("u", asm.u)
    v_margins = _margins_for("v", asm.v)
    failures = 0
    for t, (xs, m1, m2, iu, iv) in zip(times, rows):
        for margins, values, index in ((u_margins, m1, iu), (v_margins, m2, iv)):
            for i, margin in enumerate(margins):
                mask = index == i
                margin.update(float(t), xs[mask], values[mask])
            bad = values < -slack
            if np.any(bad):
                failures += int(bad.sum())
                if raise_on_failure:
                    j = int(np.argmax(bad))
                    piece = margins[int(index[j])]
                    raise CertificationFailed(
                        f"{piece.component}:{piece.piece}",
                        (float(t), float(xs[j])),
                        float(values[j]),
                    )

    report = ResidualReport(
        which=asm.which.value,
        certified=failures == 0,
        t_end=t_end,
        lattice=(n_t, n_x),
        slack=slack,
        band=band,
        window=(lo, hi),
        margins=u_margins + v_margins,
        constants=dict(asm.constants),
        failures=failures,
    )
    worst = report.worst()
    if worst is not None:
        verdict = "certified" if report.certified else "NOT certified"
        logger.info(
            f"{asm.which.value}: {verdict} on {n_t}x{n_x}, worst margin "
            f"{worst.worst:.3e} on {worst.component}:{worst.piece}"
        )
    return report


def interface_rows(
    asm: BarrierAssembly, times: FloatArray
) -> list[tuple[float, float, str]]:
    """(t, x, interface id) samples of every interface curve."""
    return [
        (float(t), curve(float(t)), curve.id.value)
        for curve in asm.interfaces.values()
        for t in times
    ]
