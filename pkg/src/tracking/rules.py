"""Focus-tracker update rule and rejection discounting on single marginals."""

from collections.abc import Mapping

import numpy as np

from src.entities.marginal import TOLERANCE, Marginal
from src.errors import CedmError
from src.ontology.models import NONE_VALUE


class TrackingError(CedmError):
    """Raised on invalid tracker inputs."""
    pass


def focus_rule_update(prior: Marginal, evidence: Mapping[str, float]) -> Marginal:
    """
    Apply ``b'(v) = e(v) + (1 - sum(e)) * b(v)`` to every value, NONE included.

    Args:
        prior: Current marginal
        evidence: Turn-level confidence per value (summed over the n-best list)

    Returns:
        Updated marginal; normalised whenever ``prior`` is

    Raises:
        TrackingError: On negative confidences, a total above 1 or unknown values
    """
    if not evidence:
        return prior
    e = np.zeros(len(prior.domain))
    for value, confidence in evidence.items():
        if confidence < 0.0:
            raise TrackingError(f"negative confidence {confidence} for '{value}'")
        if value not in prior:
            raise TrackingError(f"value '{value}' is outside the domain {prior.domain}")
        e[prior.index(value)] += confidence
    total = float(e.sum())
    if total > 1.0 + TOLERANCE:
        raise TrackingError(f"evidence confidences sum to {total!r} > 1")
    return prior.with_probs(e + (1.0 - min(total, 1.0)) * prior.probs)


def apply_rejection_discount(prior: Marginal, rejected: str, confidence: float) -> Marginal:
    """
    Scale the mass of ``rejected`` by ``1 - confidence`` and move what was removed to NONE.

    Raises:
        TrackingError: On an unknown value or a confidence outside [0, 1]
    """
    if not 0.0 <= confidence <= 1.0:
        raise TrackingError(f"rejection confidence {confidence} outside [0, 1]")
    if rejected not in prior or rejected == NONE_VALUE:
        raise TrackingError(f"cannot reject '{rejected}' in domain {prior.domain}")
    probs = prior.probs.copy()
    index = prior.index(rejected)
    removed = probs[index] * confidence
    probs[index] -= removed
    probs[prior.index(NONE_VALUE)] += removed
    return prior.with_probs(probs)
