"""Dyadic (Littlewood-Paley) partitions of the frequency lattice.

Two partition kinds share one radial profile ``chi``:

* ``parabolic`` partitions the space-time lattice with respect to the
  anisotropic distance ``rho(xi, tau) = |xi| + |2 pi tau|^{1/2}``, so the
  shells respect the scaling ``(xi, tau) -> (2 xi, 4 tau)``;
* ``spatial`` partitions the spatial lattice with respect to ``|xi|``.

The profile ``chi : [0, inf) -> [0, 1]`` is smooth, supported in
``(1/2, 2)``, equals 1 at ``r = 1`` and telescopes: ``chi(r) + chi(2 r) = 1``
for ``r in [1/2, 1]``, hence ``sum_i chi(2^{-i} r) = 1`` for every ``r > 0``.
Shell ``i`` is ``phi_i(rho) = chi(2^{-i} rho)``, supported in
``(2^{i-1}, 2^{i+1})``; the low block is ``psi = 1 - sum_{i>=1} phi_i``,
which makes the partition identity hold exactly by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from parafields.lattice import Field, GridSpec, SpatialField, Spectrum, forward, inverse, spatial_forward, spatial_inverse

__all__ = [
    "BumpProfile",
    "DEFAULT_PROFILE",
    "ALTERNATE_PROFILE",
    "Partition",
    "SecondOrderBlocks",
    "build_partition",
    "block_project",
    "second_order_blocks",
    "truncation_energy",
    "smooth_step",
]

PartitionKind = Literal["parabolic", "spatial"]


def _exp_bump(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def _exp_bump_sq(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos] ** 2)
    return out


def smooth_step(x: np.ndarray, generator: Callable[[np.ndarray], np.ndarray] = _exp_bump) -> np.ndarray:
    """Smooth 0-to-1 step on [0, 1]: ``s(x) / (s(x) + s(1-x))``."""
    x = np.asarray(x, dtype=float)
    a = generator(x)
    b = generator(1.0 - x)
    denom = np.where(a + b > 0, a + b, 1.0)
    return np.where(x <= 0, 0.0, np.where(x >= 1, 1.0, a / denom))


@dataclass(frozen=True)
class BumpProfile:
    """Radial transition profile generating a dyadic partition of unity."""

    generator: Callable[[np.ndarray], np.ndarray] = _exp_bump
    name: str = "exp"

    def eta(self, r: np.ndarray) -> np.ndarray:
        """Smooth plateau: 1 for ``r <= 1``, 0 for ``r >= 2``."""
        return smooth_step(2.0 - np.asarray(r, dtype=float), self.generator)

    def chi(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return self.eta(r) - self.eta(2.0 * r)


DEFAULT_PROFILE = BumpProfile()
ALTERNATE_PROFILE = BumpProfile(generator=_exp_bump_sq, name="exp_sq")


@dataclass(frozen=True)
class SecondOrderBlocks:
    """Enlarged blocks that are flat (= 1) on the core dyadic blocks.

    ``low`` covers the psi block together with shells 1 and 2;
    ``enlarged[i]`` covers shells ``i-1, i, i+1`` and equals 1 on the
    support of shell ``i`` (for ``i >= 2``).
    """

    partition: "Partition"
    low: np.ndarray
    enlarged: dict[int, np.ndarray]


@dataclass(frozen=True)
class Partition:
    """Dyadic partition of unity on the frequency lattice.

    ``phi_hats[i - 1]`` is shell ``i`` for ``i = 1..I_max``; ``psi_hat`` is
    the complementary low-frequency block.  Arrays live on the full
    lattice for the parabolic kind and on the spatial lattice otherwise.
    """

    spec: GridSpec
    kind: PartitionKind
    profile: BumpProfile
    psi_hat: np.ndarray
    phi_hats: list[np.ndarray] = field(repr=False)
    I_max: int = 0

    @property
    def rho(self) -> np.ndarray:
        return self.spec.parabolic_rho if self.kind == "parabolic" else self.spec.spatial_rho

    @property
    def rho_max(self) -> float:
        return float(np.max(self.rho))

    @property
    def guard_threshold(self) -> float:
        """Start of the top half-shell (last octave) of the lattice."""
        return self.rho_max / 2.0

    @property
    def guard_mask(self) -> np.ndarray:
        return self.rho > self.guard_threshold

    def block(self, i: int) -> np.ndarray:
        if not 0 <= i <= self.I_max:
            raise ValueError(f"block index {i} out of range 0..{self.I_max}")
        return self.psi_hat if i == 0 else self.phi_hats[i - 1]


def build_partition(
    spec: GridSpec, kind: PartitionKind, profile: BumpProfile = DEFAULT_PROFILE
) -> Partition:
    """Construct the dyadic partition hosted by the lattice.

    ``I_max`` is the largest shell index with lattice support; every block
    above it vanishes identically on the grid.  Raises if the grid hosts
    fewer than 3 shells.
    """
    if kind not in ("parabolic", "spatial"):
        raise ValueError(f"unknown partition kind {kind!r}")
    rho = spec.parabolic_rho if kind == "parabolic" else spec.spatial_rho
    rho_max = float(np.max(rho))
    I_max = 0
    while 2.0 ** float(I_max) < rho_max:
        I_max += 1
    if I_max < 3:
        raise ValueError(
            f"grid too coarse for a {kind} partition: only {I_max} dyadic shells "
            f"(max lattice frequency distance {rho_max:g}); need at least 3"
        )
    phi_hats = [profile.chi(2.0 ** (-i) * rho) for i in range(1, I_max + 1)]
    psi_hat = 1.0 - sum(phi_hats)
    return Partition(spec=spec, kind=kind, profile=profile, psi_hat=psi_hat, phi_hats=phi_hats, I_max=I_max)


def block_project(partition: Partition, i: int, f: Field | SpatialField) -> Field | SpatialField:
    """Frequency-localize ``f`` to block ``i`` (``i = 0`` is the psi block).

    Blocks resum to the identity: ``sum_i block_project(i, f) == f``.
    """
    arr = partition.block(i)
    if isinstance(f, SpatialField):
        if partition.kind != "spatial":
            raise ValueError("spatial fields need a spatial partition")
        return spatial_inverse(f.spec, arr * spatial_forward(f))
    if partition.kind != "parabolic":
        raise ValueError("space-time fields need a parabolic partition")
    sp = forward(f)
    return inverse(Spectrum(f.spec, sp.coeffs * arr))


def second_order_blocks(partition: Partition) -> SecondOrderBlocks:
    """Build the enlarged spatial family flat on each core block.

    ``enlarged[i] = chi(2^{-i+1} rho) + chi(2^{-i} rho) + chi(2^{-i-1} rho)``
    equals 1 wherever shell ``i`` is supported (``i >= 2``), because the
    three neighboring shells are the only ones meeting that support.
    """
    if partition.kind != "spatial":
        raise ValueError("second-order blocks are defined for the spatial partition")
    rho = partition.rho
    chi = partition.profile.chi
    low = partition.psi_hat + chi(2.0**-1 * rho) + chi(2.0**-2 * rho)
    enlarged = {}
    for i in range(1, partition.I_max + 1):
        enlarged[i] = chi(2.0 ** (-i + 1) * rho) + chi(2.0 ** (-i) * rho) + chi(2.0 ** (-i - 1) * rho)
    return SecondOrderBlocks(partition=partition, low=low, enlarged=enlarged)


def truncation_energy(partition: Partition, f: Field | SpatialField) -> float:
    """Fraction of the field's spectral energy inside the Nyquist guard
    (the top half-shell of the lattice)."""
    if isinstance(f, SpatialField):
        coeffs = spatial_forward(f)
    else:
        coeffs = forward(f).coeffs
    total = float(np.sum(np.abs(coeffs) ** 2))
    if total == 0.0:
        return 0.0
    guarded = float(np.sum(np.abs(coeffs[partition.guard_mask]) ** 2))
    return guarded / total
