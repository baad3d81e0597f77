"""Single tolerance block shared by every module and exposed on the CLI."""
from __future__ import annotations

from dataclasses import asdict, dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances and search bounds.

    Attributes
    ----------
    eps_geom : float
        Geometric tolerance relative to the curve diameter.
    theta_min : float
        Minimal admissible crossing angle in radians.
    eps_jet : float
        Relative tolerance for germ (jet) equality.
    eps_quad : float
        Absolute quadrature tolerance per unit curve length.
    eps_laurent : float
        Bound on negative Laurent coefficients counted as zero.
    eps_tail : float
        Tolerance of the moment tail identity at large ``|t|``.
    word_length : int
        Maximal word length explored by the orbit search.
    jet_order : int
        Number of Taylor coefficients kept beyond the value.
    eps_disc : float
        Relative distance to a discriminant point treated as "on" it.
    step_floor : float
        Smallest tracking step before giving up.
    group_cap : int
        Maximal number of group elements enumerated.
    """

    eps_geom: float = 1e-9
    theta_min: float = 1e-3
    eps_jet: float = 1e-8
    eps_quad: float = 1e-10
    eps_laurent: float = 1e-8
    eps_tail: float = 1e-8
    word_length: int = 8
    jet_order: int = 8
    eps_disc: float = 1e-9
    step_floor: float = 1e-12
    group_cap: int = 10080

    def with_(self, **kw) -> "Tolerances":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT = Tolerances()
