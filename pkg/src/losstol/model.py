"""Shared error-model and result-report types."""
from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

EXACT = "exact"
MONTE_CARLO = "monte-carlo"


def _check_prob(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {value}")


@dataclass(frozen=True)
class ErrorModel:
    """Independent per-qubit noise: located loss, Pauli errors, and a
    per-measurement outcome-flip rate used by the tree and parity
    calculators."""

    p_loss: float = 0.0
    p_x: float = 0.0
    p_y: float = 0.0
    p_z: float = 0.0
    p_local: float = 0.0

    def __post_init__(self) -> None:
        for name in ("p_loss", "p_x", "p_y", "p_z", "p_local"):
            _check_prob(name, getattr(self, name))
        if self.p_x + self.p_y + self.p_z > 1.0 + 1e-12:
            raise ValueError("p_x + p_y + p_z must not exceed 1")

    @classmethod
    def depolarizing(cls, p: float, *, p_loss: float = 0.0,
                     p_local: float = 0.0) -> "ErrorModel":
        """Each Pauli with probability p/3 (total error probability p)."""
        _check_prob("p", p)
        return cls(p_loss=p_loss, p_x=p / 3, p_y=p / 3, p_z=p / 3,
                   p_local=p_local)

    @property
    def total_pauli(self) -> float:
        return self.p_x + self.p_y + self.p_z

    @property
    def x_measure_flip(self) -> float:
        """Probability a Pauli error flips an X-basis outcome (Z or Y)."""
        return self.p_z + self.p_y

    @property
    def z_measure_flip(self) -> float:
        """Probability a Pauli error flips a Z-basis outcome (X or Y)."""
        return self.p_x + self.p_y


@dataclass(frozen=True)
class RateReport:
    """Effective rates for one scheme evaluation.

    ``effective_error`` is the probability that the operation completes
    and leaves a wrong/depolarized result (the joint rate);
    ``error_given_success`` conditions on completion.  Sampled reports
    carry Wilson confidence half-widths, the seed, and the sample count.
    """

    effective_loss: float
    effective_error: float
    method: str
    error_given_success: float | None = None
    error_by_pauli: Mapping[str, float] | None = None
    ci_half_width: float | None = None
    loss_ci_half_width: float | None = None
    seed: int | None = None
    samples: int | None = None
    details: Mapping[str, float] | None = None

    def __post_init__(self) -> None:
        if self.method not in (EXACT, MONTE_CARLO):
            raise ValueError(f"unknown method tag {self.method!r}")
        _check_prob("effective_loss", self.effective_loss)
        _check_prob("effective_error", self.effective_error)
        if self.error_given_success is not None:
            _check_prob("error_given_success", self.error_given_success)
        sampled = self.method == MONTE_CARLO
        if sampled != (self.ci_half_width is not None):
            raise ValueError("ci_half_width must be present exactly for "
                             "monte-carlo reports")
        if sampled and self.seed is None:
            raise ValueError("sampled reports must record their seed")
        if self.error_by_pauli is not None:
            object.__setattr__(self, "error_by_pauli",
                               MappingProxyType(dict(self.error_by_pauli)))
        if self.details is not None:
            object.__setattr__(self, "details",
                               MappingProxyType(dict(self.details)))

    def as_dict(self) -> dict:
        out = {
            "effective_loss": self.effective_loss,
            "effective_error": self.effective_error,
            "method": self.method,
        }
        if self.error_given_success is not None:
            out["error_given_success"] = self.error_given_success
        if self.error_by_pauli is not None:
            out["error_by_pauli"] = dict(self.error_by_pauli)
        if self.ci_half_width is not None:
            out["ci_half_width"] = self.ci_half_width
        if self.loss_ci_half_width is not None:
            out["loss_ci_half_width"] = self.loss_ci_half_width
        if self.seed is not None:
            out["seed"] = self.seed
        if self.samples is not None:
            out["samples"] = self.samples
        if self.details is not None:
            out["details"] = dict(self.details)
        return out
