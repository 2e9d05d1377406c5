"""Weak-value error bound under a miscalibrated interaction.

If the interaction generator H is replaced by H_e with ||H - H_e||_1 <= delta,
every measured weak value moves by at most delta/m, where m is the minimum of
the pairwise products {p,q,r,s} x {p,q,r,s} = (min diagonal)^2. This module
draws random trace-norm-bounded perturbations and checks the bound
empirically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qmat
from .protocol import (
    TAU_DEN,
    TAU_DIAG,
    WeakHamiltonian,
    build_hamiltonian,
    exact_weak_value,
)
from .states import TwoQubitState


class RankDeficientError(ValueError):
    """State has a vanishing diagonal, so the bound's m is undefined."""


@dataclass(frozen=True, eq=False)
class Perturbation:
    """Hermitian 16x16 error term with trace norm ``delta``."""

    matrix: np.ndarray
    delta: float


@dataclass(frozen=True)
class RobustnessReport:
    """Worst observed weak-value deviation per outcome against the bound."""

    delta: float
    m: float
    bound: float
    trials: int
    deviations: dict[int, float]
    margin: float
    violations: int

    def to_json_dict(self) -> dict:
        return {
            "delta": self.delta,
            "m": self.m,
            "bound": self.bound,
            "trials": self.trials,
            "deviations": {str(k): v for k, v in sorted(self.deviations.items())},
            "margin": self.margin,
            "violations": self.violations,
        }

    def csv_rows(self) -> list[list]:
        return [
            [self.delta, k, self.deviations[k], self.bound]
            for k in sorted(self.deviations)
        ]


def random_perturbation(delta: float, seed) -> Perturbation:
    """Random Hermitian 16x16 rescaled to trace norm exactly ``delta``."""
    if delta < 0:
        raise ValueError("delta must be non-negative")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    g = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
    herm = (g + g.conj().T) / 2
    if delta == 0.0:
        return Perturbation(np.zeros((16, 16), dtype=complex), 0.0)
    return Perturbation(herm * (delta / qmat.trace_norm(herm)), delta)


def coupling_miscalibration(eta: float) -> Perturbation:
    """Structured error H_e = (1 + eta) H, i.e. P = -eta H with
    ||P||_1 = 16 |eta| (H has sixteen unit-magnitude eigenvalues)."""
    h = build_hamiltonian().matrix
    return Perturbation(-eta * h, 16.0 * abs(eta))


def weak_value_deviation(
    rho: TwoQubitState,
    hamiltonian: WeakHamiltonian,
    perturbation: Perturbation,
    k: int,
) -> float:
    """|weak value under H - weak value under H_e| with H_e = H - P."""
    clean = exact_weak_value(rho, hamiltonian, k)
    perturbed = exact_weak_value(rho, hamiltonian.matrix - perturbation.matrix, k)
    return abs(clean - perturbed)


def _deviations_all(joint: np.ndarray, perturbation: Perturbation) -> dict[int, float]:
    """Deviations for every outcome with signal, in one matrix product.

    The weak-value difference under H vs H - P is <u_k| P (rho x rho) |u_k>
    over the post-selection probability; batching the 16 outcomes this way
    is algebraically identical to calling weak_value_deviation per outcome.
    """
    numerators = np.abs(np.diag(perturbation.matrix @ joint))
    out: dict[int, float] = {}
    for k in range(1, 17):
        den = float(joint[k - 1, k - 1].real)
        if den > TAU_DEN:
            out[k] = float(numerators[k - 1]) / den
    return out


def bound_check(
    rho: TwoQubitState,
    delta: float,
    trials: int,
    seed: int,
) -> RobustnessReport:
    """Draw ``trials`` random perturbations of trace norm ``delta`` and check
    every defined outcome's deviation against delta/m.

    Requires all diagonals above TAU_DIAG (otherwise m = 0 and the bound is
    vacuous); per-trial generators derive deterministically from ``seed``.
    """
    diag = rho.diagonal()
    if min(diag) <= TAU_DIAG:
        raise RankDeficientError(
            f"diagonal {diag} has a vanishing entry; delta/m bound undefined"
        )
    m_from_min = min(diag) ** 2
    m_cross = min(a * b for a in diag for b in diag)
    if abs(m_from_min - m_cross) > 1e-15 * m_from_min:  # pragma: no cover
        raise AssertionError("cross-product minimum disagrees with (min diagonal)^2")
    bound = delta / m_cross

    joint = np.kron(rho.matrix, rho.matrix)
    worst: dict[int, float] = {}
    violations = 0
    streams = np.random.SeedSequence(seed).spawn(trials)
    for stream in streams:
        perturbation = random_perturbation(delta, np.random.default_rng(stream))
        for k, dev in _deviations_all(joint, perturbation).items():
            if dev > bound:
                violations += 1
            if dev > worst.get(k, 0.0):
                worst[k] = dev
    margin = min((bound - dev for dev in worst.values()), default=bound)
    return RobustnessReport(
        delta=delta,
        m=m_cross,
        bound=bound,
        trials=trials,
        deviations=worst,
        margin=margin,
        violations=violations,
    )
