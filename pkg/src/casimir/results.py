"""Result container shared by the particle and half-space force routines."""
from dataclasses import dataclass, field

__all__ = ["ForceResult", "sign_label"]


def sign_label(value, threshold=0.0):
    """``"attractive"`` for negative values, ``"repulsive"`` for positive ones.

    Values with ``|value| <= threshold`` are reported as ``"zero"``.
    """
    if abs(value) <= threshold:
        return "zero"
    return "attractive" if value < 0 else "repulsive"


@dataclass
class ForceResult:
    """A signed force with its convergence record.

    Negative ``value`` means attraction (the force acts to reduce the
    separation), positive means repulsion. ``reduced`` is the same number in
    the natural scale of the problem (``f a**4 / hbar_c`` for plates), when
    such a scale exists.
    """

    value: float
    sign: str
    abs_error: float = 0.0
    converged: bool = True
    reduced: float | None = None
    diagnostics: dict = field(default_factory=dict, repr=False)
