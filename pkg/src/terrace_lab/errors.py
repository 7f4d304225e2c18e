"""Custom exception hierarchy for terrace-lab.

Every error raised by the library derives from TerraceLabError, so callers
(and the CLI layer) can catch the whole family at once. Errors carry the
structured payload that explains them as attributes, not only as text.
"""

from __future__ import annotations

from typing import Any


class TerraceLabError(Exception):
    """Base exception for all terrace-lab errors.

    All custom exceptions inherit from this base class, making it easy
    to catch any terrace-lab-specific error.
    """

    pass


class OutOfRegime(TerraceLabError):
    """Model parameters fall outside the monostable regime.

    Raised when:
    - d or r is not strictly positive
    - a is not in (0, 1)
    - b is not greater than 1
    """

    def __init__(self, field: str, value: float, detail: str = "") -> None:
        self.field = field
        self.value = value
        super().__init__(detail or f"parameter {field}={value!r} is out of regime")


class DomainError(TerraceLabError):
    """A closed-form function was evaluated outside its domain.

    Raised when:
    - a discriminant is negative (speed below a minimal speed)
    - an inverse is asked for a value outside the range of the function
    - a block is built with constants outside their stated ranges
    """

    pass


class BoundaryCase(TerraceLabError):
    """Parameters sit on a boundary between regimes.

    Raised when:
    - 2√(rd) equals 2 or f(c_LLW) within the boundary tolerance
    """

    def __init__(self, detail: str) -> None:
        self.detail = detail
        super().__init__(detail)


class GridMismatch(TerraceLabError):
    """Two states or trajectories do not live on the same grid or time.

    Raised when:
    - comparing StatePairs on different grids or at different times
    - a field array does not match the grid size
    """

    pass


class CflViolation(TerraceLabError):
    """The time step exceeds the stability limit of the explicit scheme.

    Raised when:
    - dt > cfl_limit(grid, params)
    """

    def __init__(self, dt: float, limit: float) -> None:
        self.dt = dt
        self.limit = limit
        super().__init__(f"dt={dt:.6g} exceeds the CFL limit {limit:.6g}")


class DomainEscape(TerraceLabError):
    """A tracked front came too close to the edge of the truncated domain.

    Raised when:
    - a front monitor reports a position within 10·dx of a boundary
    """

    def __init__(self, t: float, position: float, detail: str = "") -> None:
        self.t = t
        self.position = position
        super().__init__(
            detail or f"front at x={position:.4g} reached the domain edge at t={t:.4g}"
        )


class SupportOutsideGrid(TerraceLabError):
    """A seed's declared support does not fit inside the grid.

    Raised when:
    - a bump interval or a Heaviside edge lies outside [x_min, x_max]
    """

    pass


class NotAdmissible(TerraceLabError):
    """A speed pair is not in the interior of the admissible region.

    Raised when:
    - a terrace seed or barrier is requested for a boundary or violated pair
    """

    def __init__(self, c1: float, c2: float, klass: str) -> None:
        self.c1 = c1
        self.c2 = c2
        self.klass = klass
        super().__init__(f"speed pair (c1={c1:g}, c2={c2:g}) is {klass}")


class TooFewSamples(TerraceLabError):
    """Too few samples to fit a front speed.

    Raised when:
    - the fit window holds fewer than the minimum number of samples
    - the track times are not strictly increasing
    """

    pass


class EmptyWedge(TerraceLabError):
    """The geometric wedge of the hair-trigger check is empty.

    Raised when:
    - (c_lo + eps) t >= (c_hi - eps) t at the final time
    """

    pass


class NoConvergence(TerraceLabError):
    """An iterative solve failed to converge.

    Raised when:
    - Newton iterations stall or exceed their budget
    - solve_bvp or a bisection cannot meet its tolerance
    """

    def __init__(self, detail: str, last_residual: float = float("nan")) -> None:
        self.last_residual = last_residual
        super().__init__(f"{detail} (last residual {last_residual:.3e})")


class SubcriticalSpeed(TerraceLabError):
    """A traveling wave was requested below the minimal speed.

    Raised when:
    - c is smaller than the minimal wave speed of the (perturbed) system
    """

    pass


class BandTooNarrow(TerraceLabError):
    """A decay fit band is unusable.

    Raised when:
    - the band reaches within 10% of the truncation edges
    - the band holds fewer than two usable nodes
    """

    pass


class NoBracket(TerraceLabError):
    """A root finder could not bracket an interface.

    Raised when:
    - the blocks do not change order within the bracketing bounds
    - the crossing has the wrong orientation
    """

    def __init__(self, interface: str, detail: str) -> None:
        self.interface = interface
        super().__init__(f"{interface}: {detail}")


class HypothesisViolated(TerraceLabError):
    """A precondition of a barrier construction does not hold.

    Raised when:
    - δ is too large for the construction
    - κ, ζ or the speeds break the construction's assumptions
    """

    def __init__(self, condition: str) -> None:
        self.condition = condition
        super().__init__(f"hypothesis violated: {condition}")


class CertificationFailed(TerraceLabError):
    """A sampled residual has the wrong sign.

    Raised when:
    - a super-solution margin is negative beyond the slack
    - a sub-solution margin is positive beyond the slack
    """

    def __init__(self, piece: str, point: tuple[float, float], value: float) -> None:
        self.piece = piece
        self.point = point
        self.value = value
        t, x = point
        super().__init__(f"piece {piece}: margin {value:.3e} at (t={t:.4g}, x={x:.4g})")


class DeltaTooLarge(TerraceLabError):
    """The perturbation δ breaks one of the perturbed-speed conditions.

    Raised when:
    - a terrace condition on c2^δ fails
    - the compact-support root bracket fails
    """

    def __init__(self, delta: float, condition: str) -> None:
        self.delta = delta
        self.condition = condition
        super().__init__(f"delta={delta:g} too large: {condition}")


class ConfigError(TerraceLabError):
    """Scenario parsing or validation failed.

    Raised when:
    - the scenario file cannot be read or parsed
    - a field is missing or has the wrong type or range
    """

    def __init__(self, field: str, detail: str, context: Any = None) -> None:
        self.field = field
        self.context = context
        super().__init__(f"{field}: {detail}")
