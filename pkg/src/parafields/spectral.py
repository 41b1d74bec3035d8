"""Fourier multiplier operators and the named symbol catalog.

A :class:`Symbol` is a complex-valued function on the frequency lattice.
Space-time symbols live on the full ``(tau, xi)`` lattice; spatial symbols
live on the ``xi`` lattice only and broadcast over the time axis when
applied to a space-time field.

Symbols singular at the origin (Riesz, time Hilbert, ``|2 pi tau|^{1/2}``
ratios) take the value 0 at the zero frequency: constants are annihilated,
matching the principal-value convention.  Complex powers use the principal
branch; the parabolic weight ``1 + 4 pi^2 |xi|^2 + 2 pi i tau`` has strictly
positive real part, so the branch cut is never approached.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from parafields.lattice import (
    Field,
    GridSpec,
    SpatialField,
    forward,
    inverse,
    spatial_forward,
    spatial_inverse,
)

__all__ = [
    "Symbol",
    "MultiplierEstimate",
    "apply_symbol",
    "bessel_potential",
    "half_time_derivative_spectral",
    "dx",
    "dt",
    "laplacian_slicewise",
    "dx_slicewise",
    "estimate_multiplier_norm",
    "bessel_symbol",
    "dx_symbol",
    "dt_symbol",
    "half_dt_symbol",
    "hilbert_time_symbol",
    "riesz_symbol",
    "mu1_symbol",
    "mu2_symbol",
    "nu1_symbol",
    "nu2_symbol",
    "nu3_symbol",
    "iteration_kernel_symbol",
    "heat_symbol",
    "rho_heat_block_symbol",
    "resolve_symbol",
]

Axes = Literal["spacetime", "spatial"]


@dataclass(frozen=True)
class Symbol:
    """A named complex multiplier on the frequency lattice."""

    spec: GridSpec
    values: np.ndarray
    name: str
    axes: Axes = "spacetime"

    def __post_init__(self):
        expected = self.spec.shape if self.axes == "spacetime" else self.spec.spatial_shape
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != expected:
            raise ValueError(f"symbol {self.name!r} has shape {vals.shape}, expected {expected}")
        if not np.all(np.isfinite(vals)):
            raise ValueError(f"symbol {self.name!r} contains non-finite entries")
        object.__setattr__(self, "values", vals)


def _parabolic_weight(spec: GridSpec) -> np.ndarray:
    """``1 + 4 pi^2 |xi|^2 + 2 pi i tau`` on the full lattice."""
    return 1.0 + 4 * np.pi**2 * spec.xi_sq_mesh + 2j * np.pi * spec.tau_mesh


def _zero_at(values: np.ndarray, mask: np.ndarray) -> np.ndarray:
    out = np.array(values, dtype=complex)
    out[mask] = 0.0
    return out


def bessel_symbol(spec: GridSpec, alpha: float) -> Symbol:
    """Parabolic Bessel weight ``(1 + 4 pi^2 |xi|^2 + 2 pi i tau)^(-alpha/2)``."""
    vals = _parabolic_weight(spec) ** (-alpha / 2.0)
    return Symbol(spec, vals, f"bessel:{alpha:g}")


def dx_symbol(spec: GridSpec, k: int, order: int = 1) -> Symbol:
    if not 1 <= k <= spec.n:
        raise ValueError(f"axis k must be in 1..{spec.n}")
    vals = (2j * np.pi * spec.xi_meshes[k - 1]) ** order
    name = f"dx:{k}" if order == 1 else f"dx:{k}^{order}"
    return Symbol(spec, vals, name)


def dt_symbol(spec: GridSpec, order: int = 1) -> Symbol:
    vals = (2j * np.pi * spec.tau_mesh) ** order
    return Symbol(spec, vals, "dt" if order == 1 else f"dt^{order}")


def half_dt_symbol(spec: GridSpec) -> Symbol:
    """Half time derivative: ``|2 pi tau|^{1/2}``."""
    vals = np.sqrt(np.abs(2 * np.pi * spec.tau_mesh)).astype(complex)
    return Symbol(spec, vals, "half_dt")


def hilbert_time_symbol(spec: GridSpec) -> Symbol:
    """Time Hilbert transform, signed so that composing it with two half
    time derivatives reproduces the full time derivative."""
    vals = 1j * np.sign(spec.tau_mesh).astype(complex)
    return Symbol(spec, vals, "hilbert")


def riesz_symbol(spec: GridSpec, k: int) -> Symbol:
    """Spatial Riesz transform ``-i xi_k / |xi|`` (0 at ``xi = 0``)."""
    if not 1 <= k <= spec.n:
        raise ValueError(f"axis k must be in 1..{spec.n}")
    norm = np.sqrt(spec.xi_sq_mesh)
    zero = norm == 0
    vals = _zero_at(-1j * spec.xi_meshes[k - 1] / np.where(zero, 1.0, norm), zero)
    return Symbol(spec, vals, f"riesz:{k}")


def mu1_symbol(spec: GridSpec, k: int) -> Symbol:
    """First-order ratio ``2 pi i xi_k * weight^{-1/2}`` (bounded)."""
    vals = 2j * np.pi * spec.xi_meshes[k - 1] * _parabolic_weight(spec) ** -0.5
    return Symbol(spec, vals, f"mu1:{k}")


def mu2_symbol(spec: GridSpec) -> Symbol:
    """``|2 pi tau|^{1/2} * weight^{-1/2}`` (bounded)."""
    vals = np.sqrt(np.abs(2 * np.pi * spec.tau_mesh)) * _parabolic_weight(spec) ** -0.5
    return Symbol(spec, vals, "mu2")


def nu1_symbol(spec: GridSpec) -> Symbol:
    vals = np.sqrt(np.abs(2 * np.pi * spec.tau_mesh)) / _parabolic_weight(spec)
    return Symbol(spec, vals, "nu1")


def nu2_symbol(spec: GridSpec, k: int) -> Symbol:
    vals = 2j * np.pi * spec.xi_meshes[k - 1] / _parabolic_weight(spec)
    return Symbol(spec, vals, f"nu2:{k}")


def nu3_symbol(spec: GridSpec, k: int) -> Symbol:
    vals = (
        2j * np.pi * spec.xi_meshes[k - 1]
        * np.sqrt(np.abs(2 * np.pi * spec.tau_mesh))
        / _parabolic_weight(spec)
    )
    return Symbol(spec, vals, f"nu3:{k}")


def iteration_kernel_symbol(spec: GridSpec) -> Symbol:
    """``weight^{1/2} / (1 + |xi| + |2 pi tau|^{1/2})`` (bounded both ways)."""
    denom = 1.0 + np.sqrt(spec.xi_sq_mesh) + np.sqrt(np.abs(2 * np.pi * spec.tau_mesh))
    vals = _parabolic_weight(spec) ** 0.5 / denom
    return Symbol(spec, vals, "K")


def heat_symbol(spec: GridSpec, t: float) -> Symbol:
    """Heat semigroup at time ``t``: spatial symbol ``exp(-4 pi^2 t |xi|^2)``."""
    if t < 0:
        raise ValueError("heat symbol requires t >= 0")
    vals = np.exp(-4 * np.pi**2 * t * spec.spatial_xi_sq).astype(complex)
    return Symbol(spec, vals, f"heat:{t:g}", axes="spatial")


def rho_heat_block_symbol(spec: GridSpec, t: float, i: int, enlarged_block: np.ndarray) -> Symbol:
    """Heat-damped enlarged dyadic block ``Phi'_i(xi) exp(-t |xi|^2)``.

    ``enlarged_block`` is the flat-on-shell-``i`` spatial array produced by
    the dyadic module's second-order family.
    """
    vals = enlarged_block * np.exp(-t * spec.spatial_xi_sq)
    return Symbol(spec, vals.astype(complex), f"rho:{t:g}:{i}", axes="spatial")


def apply_symbol(symbol: Symbol, field: Field | SpatialField) -> Field | SpatialField:
    """Pointwise frequency multiplication: ``inverse(symbol * forward(field))``.

    Spatial symbols applied to space-time fields broadcast over the time
    axis (they act slice by slice).
    """
    if symbol.spec != field.spec:
        raise ValueError("symbol and field live on different grids")
    if isinstance(field, SpatialField):
        if symbol.axes != "spatial":
            raise ValueError(f"symbol {symbol.name!r} is not spatial")
        return spatial_inverse(field.spec, symbol.values * spatial_forward(field))
    sp = forward(field)
    vals = symbol.values if symbol.axes == "spacetime" else symbol.values[np.newaxis, ...]
    return inverse(type(sp)(field.spec, sp.coeffs * vals))


def bessel_potential(field: Field, alpha: float) -> Field:
    """Apply the parabolic Bessel weight of order ``alpha``.

    Composition adds the orders: ``bessel_potential(bessel_potential(f, a), b)
    == bessel_potential(f, a + b)`` up to rounding.
    """
    return apply_symbol(bessel_symbol(field.spec, alpha), field)


def half_time_derivative_spectral(field: Field) -> Field:
    return apply_symbol(half_dt_symbol(field.spec), field)


def dx(field: Field, k: int, order: int = 1) -> Field:
    return apply_symbol(dx_symbol(field.spec, k, order), field)


def dt(field: Field, order: int = 1) -> Field:
    return apply_symbol(dt_symbol(field.spec, order), field)


def _spatial_multiplier_slicewise(values: np.ndarray, spec: GridSpec, mult: np.ndarray) -> np.ndarray:
    """Apply a spatial frequency multiplier to every time slice of a slab."""
    axes = tuple(range(1, values.ndim))
    shifted = np.fft.ifftshift(values, axes=axes)
    coeffs = np.fft.fftshift(np.fft.fftn(shifted, axes=axes), axes=axes)
    coeffs *= mult[np.newaxis, ...]
    out = np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(coeffs, axes=axes), axes=axes), axes=axes)
    return out


def dx_slicewise(values: np.ndarray, spec: GridSpec, beta: tuple[int, ...]) -> np.ndarray:
    """``D_X^beta`` applied per time slice of a slab of spatial slices."""
    mult = np.ones(spec.spatial_shape, dtype=complex)
    for axis, order in enumerate(beta):
        if order:
            mult = mult * (2j * np.pi * spec.spatial_xi_meshes[axis]) ** order
    return _spatial_multiplier_slicewise(values, spec, mult)


def laplacian_slicewise(values: np.ndarray, spec: GridSpec, power: int = 1) -> np.ndarray:
    """Spatial Laplacian (to an integer power) applied per time slice."""
    mult = (-4 * np.pi**2 * spec.spatial_xi_sq).astype(complex) ** power
    return _spatial_multiplier_slicewise(values, spec, mult)


@dataclass(frozen=True)
class MultiplierEstimate:
    """Empirical bracket for an L^p multiplier norm.

    ``lower_bound`` comes from probing (pure modes realize ``|symbol|``
    exactly, so the symbol sup is always included); ``l1_kernel_upper`` is
    the L^1 norm of the symbol's inverse transform, an upper bound for
    every p by Young's inequality.  The operator norm of the discretized
    operator lies in ``[lower_bound, l1_kernel_upper]``.
    """

    name: str
    p: float
    probe_count: int
    lower_bound: float
    l1_kernel_upper: float


def _lp(values: np.ndarray, cellvol: float, p: float) -> float:
    if p == np.inf:
        return float(np.max(np.abs(values)))
    return float((np.sum(np.abs(values) ** p) * cellvol) ** (1.0 / p))


def _kernel_l1(symbol: Symbol) -> float:
    spec = symbol.spec
    if symbol.axes == "spatial":
        kern = spatial_inverse(spec, symbol.values)
        return _lp(kern.values, spec.spatial_cell_volume, 1.0)
    shifted = np.fft.ifftshift(symbol.values)
    kern = np.fft.fftshift(np.fft.ifftn(shifted)) / spec.cell_volume
    return _lp(kern, spec.cell_volume, 1.0)


def estimate_multiplier_norm(
    symbol: Symbol, p: float, probes: int = 16, seed: int = 0, band: float = 0.5
) -> MultiplierEstimate:
    """Bracket the L^p -> L^p norm of the multiplier operator.

    Probes are random band-limited fields (spectrum restricted to the
    ``band`` fraction of the frequency lattice) plus every pure lattice
    mode; a pure mode is an eigenvector, so mode probing contributes
    ``max |symbol|`` exactly, for any p.
    """
    if probes < 1:
        raise ValueError("need at least one probe")
    if not (1 <= p <= np.inf):
        raise ValueError(f"p must lie in [1, inf], got {p}")
    spec = symbol.spec
    lower = float(np.max(np.abs(symbol.values)))  # all pure modes at once
    rng = np.random.default_rng(seed)
    spatial = symbol.axes == "spatial"
    shape = spec.spatial_shape if spatial else spec.shape
    cellvol = spec.spatial_cell_volume if spatial else spec.cell_volume
    rho = spec.spatial_rho if spatial else spec.parabolic_rho
    mask = rho <= band * float(np.max(rho))
    mode_count = int(np.prod(shape))
    for _ in range(probes):
        coeffs = (rng.normal(size=shape) + 1j * rng.normal(size=shape)) * mask
        if spatial:
            f = spatial_inverse(spec, coeffs)
            g = spatial_inverse(spec, symbol.values * coeffs)
        else:
            from parafields.lattice import Spectrum

            f = inverse(Spectrum(spec, coeffs))
            g = inverse(Spectrum(spec, symbol.values * coeffs))
        denom = _lp(f.values, cellvol, p)
        if denom > 0:
            lower = max(lower, _lp(g.values, cellvol, p) / denom)
    upper = _kernel_l1(symbol)
    return MultiplierEstimate(
        name=symbol.name,
        p=float(p),
        probe_count=probes + mode_count,
        lower_bound=lower,
        l1_kernel_upper=upper,
    )


def resolve_symbol(spec: GridSpec, name: str) -> Symbol:
    """Look up a catalog symbol by its CLI name.

    Recognized forms: ``bessel:a``, ``dx:k``, ``dt``, ``half_dt``,
    ``hilbert``, ``riesz:k``, ``mu1:k``, ``mu2``, ``nu1``, ``nu2:k``,
    ``nu3:k``, ``K``, ``heat:t``, ``rho:t:i``.
    """
    parts = name.split(":")
    head = parts[0]
    try:
        if head == "bessel":
            return bessel_symbol(spec, float(parts[1]))
        if head == "dx":
            return dx_symbol(spec, int(parts[1]))
        if head == "dt":
            return dt_symbol(spec)
        if head == "half_dt":
            return half_dt_symbol(spec)
        if head == "hilbert":
            return hilbert_time_symbol(spec)
        if head == "riesz":
            return riesz_symbol(spec, int(parts[1]))
        if head == "mu1":
            return mu1_symbol(spec, int(parts[1]))
        if head == "mu2":
            return mu2_symbol(spec)
        if head == "nu1":
            return nu1_symbol(spec)
        if head == "nu2":
            return nu2_symbol(spec, int(parts[1]))
        if head == "nu3":
            return nu3_symbol(spec, int(parts[1]))
        if head == "K":
            return iteration_kernel_symbol(spec)
        if head == "heat":
            return heat_symbol(spec, float(parts[1]))
        if head == "rho":
            from parafields.dyadic import build_partition, second_order_blocks

            t, i = float(parts[1]), int(parts[2])
            blocks = second_order_blocks(build_partition(spec, "spatial"))
            return rho_heat_block_symbol(spec, t, i, blocks.enlarged[i])
    except (IndexError, ValueError) as exc:
        raise ValueError(f"cannot parse symbol name {name!r}: {exc}") from exc
    raise ValueError(f"unknown symbol {name!r}")
