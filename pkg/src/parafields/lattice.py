"""Discrete space-time torus: grids, sampled fields, Fourier transforms.

The computational domain is the torus ``[-Lx/2, Lx/2)^n x [-Lt/2, Lt/2)``
sampled on a regular lattice with ``Nx`` points per spatial axis and ``Nt``
points on the time axis.  The matching frequency lattice is centered:
``xi in {-Nx/2, ..., Nx/2 - 1}/Lx`` per spatial axis and
``tau in {-Nt/2, ..., Nt/2 - 1}/Lt``.

Transform convention: the forward kernel is ``exp(-2*pi*i*(X.xi + t*tau))``
and the discrete transform is normalized by the lattice cell volume, so
spectra approximate continuum Fourier integrals.  With this convention the
spatial derivative corresponds to the multiplier ``2*pi*i*xi_k`` and the
time derivative to ``2*pi*i*tau``.

Arrays are laid out row-major with time slowest: a space-time field has
shape ``(Nt, Nx, ..., Nx)``; a spatial field drops the time axis.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

__all__ = [
    "GridSpec",
    "Field",
    "SpatialField",
    "CylinderSlab",
    "Spectrum",
    "make_grid",
    "sample",
    "sample_spatial",
    "forward",
    "inverse",
    "spatial_forward",
    "spatial_inverse",
    "restrict_to_cylinder",
    "save_field",
    "load_field",
]


def _is_power_of_two(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Geometry of the space-time lattice.

    Parameters
    ----------
    n : spatial dimension, 1 or 2.
    Nx : samples per spatial axis (power of two, >= 8).
    Nt : samples on the time axis (power of two, >= 8).
    Lx : spatial period.
    Lt : time period.
    T : half-cylinder time cutoff, ``0 < T <= Lt/2``, an integer number
        of time samples.
    """

    n: int
    Nx: int
    Nt: int
    Lx: float
    Lt: float
    T: float

    @property
    def hx(self) -> float:
        return self.Lx / self.Nx

    @property
    def ht(self) -> float:
        return self.Lt / self.Nt

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.Nt,) + (self.Nx,) * self.n

    @property
    def spatial_shape(self) -> tuple[int, ...]:
        return (self.Nx,) * self.n

    @property
    def cell_volume(self) -> float:
        return self.hx**self.n * self.ht

    @property
    def spatial_cell_volume(self) -> float:
        return self.hx**self.n

    @property
    def num_cylinder_slices(self) -> int:
        return int(round(self.T / self.ht))

    @cached_property
    def x_axis(self) -> np.ndarray:
        return -self.Lx / 2 + self.hx * np.arange(self.Nx)

    @cached_property
    def t_axis(self) -> np.ndarray:
        return -self.Lt / 2 + self.ht * np.arange(self.Nt)

    @cached_property
    def xi_axis(self) -> np.ndarray:
        """Centered spatial frequencies, one axis."""
        return (np.arange(self.Nx) - self.Nx // 2) / self.Lx

    @cached_property
    def tau_axis(self) -> np.ndarray:
        """Centered time frequencies."""
        return (np.arange(self.Nt) - self.Nt // 2) / self.Lt

    @cached_property
    def xi_meshes(self) -> tuple[np.ndarray, ...]:
        """Spatial frequency meshes broadcast over the full lattice shape."""
        axes = np.meshgrid(*([self.xi_axis] * self.n), indexing="ij")
        return tuple(a[np.newaxis, ...] * np.ones(self.shape) for a in axes)

    @cached_property
    def tau_mesh(self) -> np.ndarray:
        reshape = (self.Nt,) + (1,) * self.n
        return self.tau_axis.reshape(reshape) * np.ones(self.shape)

    @cached_property
    def xi_sq_mesh(self) -> np.ndarray:
        """``|xi|^2`` over the full lattice."""
        return sum(m**2 for m in self.xi_meshes)

    @cached_property
    def spatial_xi_meshes(self) -> tuple[np.ndarray, ...]:
        axes = np.meshgrid(*([self.xi_axis] * self.n), indexing="ij")
        return tuple(axes)

    @cached_property
    def spatial_xi_sq(self) -> np.ndarray:
        return sum(m**2 for m in self.spatial_xi_meshes)

    @cached_property
    def parabolic_rho(self) -> np.ndarray:
        """Anisotropic distance ``|xi| + |2*pi*tau|^(1/2)`` on the lattice."""
        return np.sqrt(self.xi_sq_mesh) + np.sqrt(np.abs(2 * np.pi * self.tau_mesh))

    @cached_property
    def spatial_rho(self) -> np.ndarray:
        """Isotropic distance ``|xi|`` on the spatial frequency lattice."""
        return np.sqrt(self.spatial_xi_sq)

    def with_cutoff(self, T: float) -> "GridSpec":
        return make_grid(self.n, self.Nx, self.Nt, self.Lx, self.Lt, T)


def make_grid(n: int, Nx: int, Nt: int, Lx: float, Lt: float, T: float) -> GridSpec:
    """Build a validated :class:`GridSpec`.

    Raises ``ValueError`` for non-power-of-two sizes, a cutoff that is not
    an integer number of time samples, or ``T > Lt/2``.
    """
    if n not in (1, 2):
        raise ValueError(f"spatial dimension must be 1 or 2, got {n}")
    if Nx < 8 or not _is_power_of_two(Nx):
        raise ValueError(f"Nx must be a power of two >= 8, got {Nx}")
    if Nt < 8 or not _is_power_of_two(Nt):
        raise ValueError(f"Nt must be a power of two >= 8, got {Nt}")
    if not (Lx > 0 and Lt > 0):
        raise ValueError("periods must be positive")
    if not (0 < T <= Lt / 2):
        raise ValueError(f"cutoff must satisfy 0 < T <= Lt/2, got T={T}, Lt={Lt}")
    ht = Lt / Nt
    slices = T / ht
    if abs(slices - round(slices)) > 1e-9:
        raise ValueError(f"cutoff T={T} is not an integer number of time samples (ht={ht})")
    return GridSpec(n=n, Nx=Nx, Nt=Nt, Lx=float(Lx), Lt=float(Lt), T=float(T))


def _check_values(values: np.ndarray, shape: tuple[int, ...], what: str) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    if values.shape != shape:
        raise ValueError(f"{what} has shape {values.shape}, expected {shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{what} contains non-finite entries")
    return values


@dataclass(frozen=True)
class Field:
    """Complex samples on the space-time lattice, time axis first."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _check_values(self.values, self.spec.shape, "field"))

    def scaled(self, c: complex) -> "Field":
        return Field(self.spec, self.values * c)


@dataclass(frozen=True)
class SpatialField:
    """Complex samples on a single time slice (spatial lattice only)."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "values", _check_values(self.values, self.spec.spatial_shape, "spatial field")
        )

    def scaled(self, c: complex) -> "SpatialField":
        return SpatialField(self.spec, self.values * c)


@dataclass(frozen=True)
class Spectrum:
    """Fourier coefficients on the centered frequency lattice."""

    spec: GridSpec
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _check_values(self.coeffs, self.spec.shape, "spectrum"))


@dataclass(frozen=True)
class CylinderSlab:
    """Time slices of a field with ``0 <= t < T`` (left-closed cylinder)."""

    spec: GridSpec
    T: float
    values: np.ndarray  # shape (num_slices,) + spatial_shape

    @property
    def num_slices(self) -> int:
        return self.values.shape[0]


def sample(spec: GridSpec, closed_form: Callable[..., np.ndarray]) -> Field:
    """Evaluate ``closed_form(x1[, x2], t)`` at every lattice point.

    The callable receives broadcastable coordinate meshes and must return
    finite values; a non-finite result raises an error naming the
    offending lattice point.
    """
    spatial = np.meshgrid(*([spec.x_axis] * spec.n), indexing="ij")
    t = spec.t_axis.reshape((spec.Nt,) + (1,) * spec.n)
    args = [s[np.newaxis, ...] for s in spatial] + [t]
    values = np.asarray(closed_form(*args), dtype=complex) * np.ones(spec.shape)
    bad = ~np.isfinite(values)
    if np.any(bad):
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        t_bad = spec.t_axis[idx[0]]
        x_bad = tuple(float(spec.x_axis[i]) for i in idx[1:])
        raise ValueError(f"closed form is non-finite at X={x_bad}, t={t_bad}")
    return Field(spec, values)


def sample_spatial(spec: GridSpec, closed_form: Callable[..., np.ndarray]) -> SpatialField:
    """Spatial-slice analogue of :func:`sample`; callable gets ``x1[, x2]``."""
    spatial = np.meshgrid(*([spec.x_axis] * spec.n), indexing="ij")
    values = np.asarray(closed_form(*spatial), dtype=complex) * np.ones(spec.spatial_shape)
    bad = ~np.isfinite(values)
    if np.any(bad):
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        x_bad = tuple(float(spec.x_axis[i]) for i in idx)
        raise ValueError(f"closed form is non-finite at X={x_bad}")
    return SpatialField(spec, values)


def forward(field: Field) -> Spectrum:
    """Forward transform, normalized so coefficients approximate the
    continuum Fourier integral of the periodic extension."""
    shifted = np.fft.ifftshift(field.values)
    coeffs = np.fft.fftshift(np.fft.fftn(shifted)) * field.spec.cell_volume
    return Spectrum(field.spec, coeffs)


def inverse(spectrum: Spectrum) -> Field:
    shifted = np.fft.ifftshift(spectrum.coeffs)
    values = np.fft.fftshift(np.fft.ifftn(shifted)) / spectrum.spec.cell_volume
    return Field(spectrum.spec, values)


def spatial_forward(field: SpatialField) -> np.ndarray:
    """Spatial-only transform; returns the centered coefficient array."""
    shifted = np.fft.ifftshift(field.values)
    return np.fft.fftshift(np.fft.fftn(shifted)) * field.spec.spatial_cell_volume


def spatial_inverse(spec: GridSpec, coeffs: np.ndarray) -> SpatialField:
    shifted = np.fft.ifftshift(coeffs)
    values = np.fft.fftshift(np.fft.ifftn(shifted)) / spec.spatial_cell_volume
    return SpatialField(spec, values)


def restrict_to_cylinder(field: Field, T: float | None = None) -> CylinderSlab:
    """Keep the time slices with ``0 <= t < T``.

    The left-closed convention makes the slice count exactly ``T/ht``
    (e.g. half of all slices for ``T = Lt/2``) and matches the rectangle
    quadrature used by the cylinder norms.
    """
    spec = field.spec
    if T is None:
        T = spec.T
    ht = spec.ht
    slices = T / ht
    if not (0 < T <= spec.Lt / 2) or abs(slices - round(slices)) > 1e-9:
        raise ValueError(f"cutoff T={T} is not aligned with the time lattice")
    start = spec.Nt // 2  # index of t = 0
    count = int(round(slices))
    return CylinderSlab(spec=spec, T=float(T), values=field.values[start : start + count])


# Binary field format, version 1.
#
# 48-byte little-endian header followed by float64 (re, im) pairs:
#   bytes  0-3   magic "PFLD"
#   bytes  4-7   version (uint32, = 1)
#   bytes  8-11  n (uint32)
#   bytes 12-15  Nx (uint32)
#   bytes 16-19  Nt (uint32)
#   bytes 20-23  payload kind (uint32): 0 = space-time, 1 = spatial slice
#   bytes 24-31  Lx (float64)
#   bytes 32-39  Lt (float64)
#   bytes 40-47  T (float64)
# Payload: row-major with time slowest; Nx^n * Nt points for kind 0,
# Nx^n points for kind 1.

_MAGIC = b"PFLD"
_HEADER = struct.Struct("<4sIIIIIddd")
_VERSION = 1


def save_field(path, field: Field | SpatialField) -> None:
    spec = field.spec
    kind = 1 if isinstance(field, SpatialField) else 0
    header = _HEADER.pack(_MAGIC, _VERSION, spec.n, spec.Nx, spec.Nt, kind, spec.Lx, spec.Lt, spec.T)
    flat = np.ascontiguousarray(field.values, dtype=complex).reshape(-1)
    payload = np.empty(2 * flat.size, dtype="<f8")
    payload[0::2] = flat.real
    payload[1::2] = flat.imag
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes())


def load_field(path) -> Field | SpatialField:
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        if len(raw) != _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, version, n, Nx, Nt, kind, Lx, Lt, T = _HEADER.unpack(raw)
        if magic != _MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        if version != _VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        spec = make_grid(n, Nx, Nt, Lx, Lt, T)
        expected = Nx**n * (1 if kind == 1 else Nt)
        payload = np.frombuffer(fh.read(), dtype="<f8")
        if payload.size != 2 * expected:
            raise ValueError(f"{path}: payload has {payload.size // 2} points, expected {expected}")
    values = payload[0::2] + 1j * payload[1::2]
    if kind == 1:
        return SpatialField(spec, values.reshape(spec.spatial_shape))
    return Field(spec, values.reshape(spec.shape))
