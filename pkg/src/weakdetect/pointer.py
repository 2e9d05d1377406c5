"""Gaussian-pointer readout of weak values.

A 1-d pointer prepared in a Gaussian is coupled to the two-copy system by
exp(-i epsilon H (x) P), then the system is post-selected in the
computational basis. The surviving pointer's mean position and momentum
shifts encode the real and imaginary parts of the weak value:

    Re A = (  <x>_post - <x>_in) / epsilon
    Im A = (  <p>_post - <p>_in) / (2 epsilon Var_in(p)),  Var_in(p) = 1/(4 sigma^2)

The evolution is exact, not first order: the system mixture is split into
its eigen-ensemble (at most 16 pure branches), each branch is expanded in
the +/-1 eigenspaces of H, and the pointer is translated by +/-epsilon
spectrally (multiplication by exp(-i epsilon p) in the Fourier domain, which
is exact for waves with negligible boundary tails). hbar = 1 throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .protocol import NoSignalError, TAU_DEN, WeakHamiltonian, build_hamiltonian
from .states import TwoQubitState


@dataclass(frozen=True)
class PointerGrid:
    """Uniform position grid x_j = -L + j dx, j = 0..n-1, dx = 2L/n."""

    n: int
    half_extent: float

    def __post_init__(self) -> None:
        if self.n < 256 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"grid size must be a power of two >= 256, got {self.n}")
        if not self.half_extent > 0:
            raise ValueError("half_extent must be positive")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_extent / self.n

    @property
    def positions(self) -> np.ndarray:
        return -self.half_extent + self.dx * np.arange(self.n)

    @property
    def momenta(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)


@dataclass(frozen=True, eq=False)
class PointerWave:
    """Normalized wavefunction sampled on a PointerGrid."""

    grid: PointerGrid
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.amplitudes.shape != (self.grid.n,):
            raise ValueError("amplitude array does not match the grid")
        norm = float(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.dx)
        if not np.isfinite(norm) or abs(norm - 1.0) > 1e-10:
            raise ValueError(f"wave norm is {norm!r}, expected 1")
        self.amplitudes.setflags(write=False)

    def mean_position(self) -> float:
        density = np.abs(self.amplitudes) ** 2 * self.grid.dx
        return float(np.sum(self.grid.positions * density))

    def position_variance(self) -> float:
        density = np.abs(self.amplitudes) ** 2 * self.grid.dx
        mean = float(np.sum(self.grid.positions * density))
        return float(np.sum((self.grid.positions - mean) ** 2 * density))

    def _momentum_density(self) -> np.ndarray:
        transform = np.fft.fft(self.amplitudes)
        dp = 2.0 * np.pi / (self.grid.n * self.grid.dx)
        return np.abs(transform) ** 2 * (self.grid.dx**2 / (2.0 * np.pi)) * dp

    def mean_momentum(self) -> float:
        return float(np.sum(self.grid.momenta * self._momentum_density()))

    def momentum_variance(self) -> float:
        density = self._momentum_density()
        mean = float(np.sum(self.grid.momenta * density))
        return float(np.sum((self.grid.momenta - mean) ** 2 * density))


@dataclass(frozen=True)
class SimConfig:
    """Weak-measurement simulation parameters.

    ``epsilon`` is the dimensionless coupling; the weak regime cap is
    enforced. epsilon = 0 is allowed (no coupling) for probability checks,
    but readout needs epsilon > 0.
    """

    epsilon: float
    sigma: float
    grid: PointerGrid

    def __post_init__(self) -> None:
        if not 0.0 <= self.epsilon <= 0.1:
            raise ValueError(f"epsilon must be in [0, 0.1], got {self.epsilon}")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class PointerMoments:
    """First and second moments of the (generally mixed) post-selected pointer."""

    mean_x: float
    mean_p: float
    var_x: float
    var_p: float


@dataclass(frozen=True)
class WeakReadout:
    k: int
    estimate: complex
    postselect_prob: float


def default_grid() -> PointerGrid:
    return PointerGrid(n=4096, half_extent=40.0)


def default_config(epsilon: float = 1e-3, sigma: float = 1.0) -> SimConfig:
    return SimConfig(epsilon=epsilon, sigma=sigma, grid=default_grid())


def gaussian_pointer(sigma: float, grid: PointerGrid) -> PointerWave:
    """Gaussian exp(-x^2/(4 sigma^2)) normalized on the grid (Var(x) = sigma^2)."""
    if grid.half_extent < 10.0 * sigma:
        raise ValueError(
            f"grid half-extent {grid.half_extent} too small for sigma {sigma} "
            "(need >= 10 sigma to keep boundary tails negligible)"
        )
    x = grid.positions
    amp = np.exp(-(x**2) / (4.0 * sigma**2)).astype(complex)
    amp /= np.sqrt(np.sum(np.abs(amp) ** 2) * grid.dx)
    return PointerWave(grid, amp)


def translate(wave: PointerWave, delta: float) -> PointerWave:
    """Shift the wave by delta via the Fourier domain (exact for clean tails)."""
    shifted = np.fft.ifft(np.fft.fft(wave.amplitudes) * np.exp(-1j * wave.grid.momenta * delta))
    return PointerWave(wave.grid, shifted)


def _ensemble(joint: np.ndarray, cutoff: float = 1e-14) -> list[tuple[float, np.ndarray]]:
    """Eigen-ensemble of the two-copy density matrix, largest weight first."""
    weights, vectors = np.linalg.eigh((joint + joint.conj().T) / 2)
    branches = [
        (float(weights[i]), vectors[:, i])
        for i in range(len(weights) - 1, -1, -1)
        if weights[i] > cutoff
    ]
    return branches


def _evolve_sums(
    rho: TwoQubitState,
    hamiltonian: WeakHamiltonian,
    cfg: SimConfig,
    k: int,
) -> tuple[float, float, float, float, float]:
    """Post-selection probability and unnormalized pointer moment sums."""
    if not 1 <= k <= 16:
        raise ValueError(f"outcome index must be in 1..16, got {k}")
    h = hamiltonian.matrix
    joint = np.kron(rho.matrix, rho.matrix)
    branches = _ensemble(joint)
    phi_in = gaussian_pointer(cfg.sigma, cfg.grid)
    phi_plus = translate(phi_in, +cfg.epsilon)
    phi_minus = translate(phi_in, -cfg.epsilon)

    grid = cfg.grid
    x = grid.positions
    p = grid.momenta
    dp = 2.0 * np.pi / (grid.n * grid.dx)
    momentum_weight = grid.dx**2 / (2.0 * np.pi) * dp

    prob = 0.0
    sum_x = sum_x2 = sum_p = sum_p2 = 0.0
    idx = k - 1
    for weight, psi in branches:
        flipped = h @ psi
        a_plus = 0.5 * (psi[idx] + flipped[idx])
        a_minus = 0.5 * (psi[idx] - flipped[idx])
        chi = a_plus * phi_plus.amplitudes + a_minus * phi_minus.amplitudes
        density = np.abs(chi) ** 2 * grid.dx
        prob += weight * float(np.sum(density))
        sum_x += weight * float(np.sum(x * density))
        sum_x2 += weight * float(np.sum(x**2 * density))
        momentum_density = np.abs(np.fft.fft(chi)) ** 2 * momentum_weight
        sum_p += weight * float(np.sum(p * momentum_density))
        sum_p2 += weight * float(np.sum(p**2 * momentum_density))
    return prob, sum_x, sum_x2, sum_p, sum_p2


def evolve_and_postselect(
    rho: TwoQubitState,
    hamiltonian: WeakHamiltonian,
    cfg: SimConfig,
    k: int,
    *,
    tau_den: float = TAU_DEN,
) -> tuple[float, PointerMoments]:
    """Exact coupled evolution followed by post-selection on outcome k.

    Returns the total post-selection probability and the moments of the
    post-selected pointer mixture. Raises NoSignalError when the
    probability falls below ``tau_den``.
    """
    prob, sum_x, sum_x2, sum_p, sum_p2 = _evolve_sums(rho, hamiltonian, cfg, k)
    if prob < tau_den:
        raise NoSignalError(f"outcome {k} has post-selection probability {prob:.3e}")
    mean_x = sum_x / prob
    mean_p = sum_p / prob
    moments = PointerMoments(
        mean_x=mean_x,
        mean_p=mean_p,
        var_x=sum_x2 / prob - mean_x**2,
        var_p=sum_p2 / prob - mean_p**2,
    )
    return prob, moments


def readout_weak_value(
    phi_in: PointerWave,
    post: PointerMoments,
    epsilon: float,
    sigma: float,
) -> complex:
    """Complex weak value from the post-selected pointer's moment shifts."""
    if not epsilon > 0:
        raise ValueError("readout needs epsilon > 0")
    var_p_in = 1.0 / (4.0 * sigma**2)
    real = (post.mean_x - phi_in.mean_position()) / epsilon
    imag = (post.mean_p - phi_in.mean_momentum()) / (2.0 * epsilon * var_p_in)
    return complex(real, imag)


def estimate_weak_values(
    rho: TwoQubitState,
    cfg: SimConfig,
    *,
    hamiltonian: WeakHamiltonian | None = None,
) -> list[WeakReadout]:
    """Pointer-simulated weak values for every outcome that carries signal.

    Outcomes are screened on the pre-interaction probability
    <u_k| rho x rho |u_k> (the "no signal before coupling" check), since
    silent outcomes pick up O(epsilon^2) probability from the exact
    evolution without carrying a weak value.
    """
    h = hamiltonian if hamiltonian is not None else build_hamiltonian()
    phi_in = gaussian_pointer(cfg.sigma, cfg.grid)
    joint = np.kron(rho.matrix, rho.matrix)
    readouts: list[WeakReadout] = []
    for k in range(1, 17):
        if float(joint[k - 1, k - 1].real) <= TAU_DEN:
            continue
        try:
            prob, post = evolve_and_postselect(rho, h, cfg, k)
        except NoSignalError:  # pragma: no cover - screened above
            continue
        estimate = readout_weak_value(phi_in, post, cfg.epsilon, cfg.sigma)
        readouts.append(
            WeakReadout(k=k, estimate=estimate, postselect_prob=min(max(prob, 0.0), 1.0))
        )
    return readouts


def postselection_probability(
    rho: TwoQubitState,
    hamiltonian: WeakHamiltonian,
    cfg: SimConfig,
    k: int,
) -> float:
    """Post-selection probability alone (defined even for silent outcomes)."""
    return _evolve_sums(rho, hamiltonian, cfg, k)[0]


def dump_wave_csv(wave: PointerWave, path) -> None:
    """Write the wave as CSV rows (x, re, im) for external plotting."""
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("x,re,im\n")
        for xj, aj in zip(wave.grid.positions, wave.amplitudes):
            handle.write(f"{float(xj)!r},{float(aj.real)!r},{float(aj.imag)!r}\n")
