"""Weighted Sobolev norms on sinograms and solenoidal fields.

Both norms are weighted quadratic forms on angular Fourier coefficients of
the relevant Fourier transform, indexed by a smoothness/weight triple
``(r, s, t)``:

* sinogram norm (requires ``t > -1/2``), with ``m`` the parity rank and
  ``tilde`` multiplication by ``sin^m(theta)``:

      ||psi||^2 = (1/4pi) * sum_l (1+l^2)^r *
                  integral_R |q|^(2t) (1+q^2)^(s-t) |(tilde psi)hat_l(q)|^2 dq

* field norm on solenoidal rank-``m`` fields (requires ``t > -1``):

      ||f||^2 = (1/2pi) * sum_l (1+l^2)^r *
                integral_0^inf q^(2t+1) (1+q^2)^(s-t) |(fhat_m)_l(q)|^2 dq

Under the ``"lemma"`` transform convention the forward ray transform is an
isometry from the field norm at ``(r, s, t)`` to the sinogram norm at
``(r, s+1/2, t+1/2)``; :func:`reshetnyak_check` measures the ratio, which is
``sqrt(2*pi)`` instead of 1 under the ``"fst"`` convention.

Radial integrals use the midpoint rule on node sets that avoid ``q = 0``,
where the weight is singular but integrable for admissible ``t``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .fields import (
    TensorField2D,
    component_spectrum_polar,
    relative_divergence_residual,
)
from .grids import PolarFrequencyGrid, angular_coefficient_matrix
from .ray import Sinogram, forward
from .slices import tilde_coefficients, transform_sinogram

__all__ = [
    "SobolevParams",
    "TruncationWarning",
    "field_harmonics",
    "sinogram_tilde_harmonics",
    "weighted_norm_sq",
    "sinogram_norm",
    "field_norm",
    "reshetnyak_check",
    "reshetnyak_ratios",
]

_TAIL_FRACTION = 1e-6


class TruncationWarning(UserWarning):
    """Angular or radial truncation carries non-negligible weighted energy."""


@dataclass(frozen=True)
class SobolevParams:
    """Smoothness/weight triple ``(r, s, t)``.

    ``r`` weights angular harmonics by ``(1+l^2)^r``, ``s`` and ``t`` set the
    radial weight ``|q|^(2t) (1+q^2)^(s-t)`` (sinograms) or
    ``q^(2t+1) (1+q^2)^(s-t)`` (fields).  Admissibility: ``t > -1/2`` on
    sinograms, ``t > -1`` on fields.
    """

    r: float
    s: float
    t: float

    def __post_init__(self) -> None:
        for name in ("r", "s", "t"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")

    def shifted(self) -> "SobolevParams":
        """The sinogram-side indices paired with these field-side indices."""
        return SobolevParams(self.r, self.s + 0.5, self.t + 0.5)

    def require_sinogram_admissible(self) -> None:
        if self.t <= -0.5:
            raise ValueError(f"sinogram norm needs t > -1/2, got t = {self.t}")

    def require_field_admissible(self) -> None:
        if self.t <= -1.0:
            raise ValueError(f"field norm needs t > -1, got t = {self.t}")


def field_harmonics(
    f: TensorField2D,
    nq: int = 512,
    qmax: float | None = None,
    ntheta: int = 128,
    oversample: int = 12,
) -> tuple[np.ndarray, np.ndarray]:
    """Radial nodes and coefficients ``(fhat_m)_l(q_k)`` of the last component.

    Returns ``(qs, coeffs)`` with ``coeffs[l + lmax, k]`` for
    ``lmax = ntheta//2 - 1`` on the positive midpoint nodes.
    """
    if qmax is None:
        qmax = f.grid.radius
    pgrid = PolarFrequencyGrid(nq=nq, qmax=qmax, ntheta=ntheta)
    values = component_spectrum_polar(f, f.m, pgrid, oversample=oversample)
    coeffs = angular_coefficient_matrix(values, ntheta // 2 - 1).T
    return pgrid.radial_nodes(), coeffs


def sinogram_tilde_harmonics(
    psi: Sinogram,
    m: int | None = None,
    convention: str = "lemma",
    nq: int = 512,
    qmax: float | None = None,
    lmax: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric radial nodes and coefficients ``(tilde psi)hat_l(q_k)``."""
    if m is None:
        m = psi.m
    spectral = transform_sinogram(psi, convention, nq=nq, qmax=qmax, lmax=lmax)
    return np.asarray(spectral.qs), tilde_coefficients(spectral.coefficients, m)


def weighted_norm_sq(
    qs: np.ndarray,
    coeffs: np.ndarray,
    params: SobolevParams,
    radial_exponent_offset: float,
    prefactor: float,
    warn_context: str | None = None,
) -> float:
    """Weighted quadratic form shared by both norms.

    ``sum_l (1+l^2)^r * sum_k dq * |q|^(2t + offset) (1+q^2)^(s-t) |c_lk|^2``
    times ``prefactor``; ``offset`` is 0 for sinograms and 1 for fields.
    When ``warn_context`` is given, emits :class:`TruncationWarning` if the
    top-quarter harmonics or the outer 5% of radial nodes carry more than
    ``1e-6`` of the total weighted energy.
    """
    qs = np.asarray(qs, dtype=float)
    dq = np.abs(qs[1] - qs[0])
    lmax = (coeffs.shape[0] - 1) // 2
    ls = np.arange(-lmax, lmax + 1)
    radial = np.abs(qs) ** (2.0 * params.t + radial_exponent_offset) * (1.0 + qs**2) ** (
        params.s - params.t
    )
    angular = (1.0 + ls.astype(float) ** 2) ** params.r
    cells = angular[:, None] * radial[None, :] * np.abs(coeffs) ** 2 * dq
    total = float(cells.sum())

    if warn_context is not None and total > 0.0:
        top_l = np.abs(ls) > 0.75 * lmax
        if lmax > 0 and cells[top_l, :].sum() > _TAIL_FRACTION * total:
            warnings.warn(
                f"{warn_context}: top-quarter angular harmonics carry more than "
                f"{_TAIL_FRACTION:g} of the weighted energy; increase ntheta",
                TruncationWarning,
                stacklevel=3,
            )
        ntail = max(1, qs.size // 20)
        tail = np.argsort(np.abs(qs))[-ntail:]
        if cells[:, tail].sum() > _TAIL_FRACTION * total:
            warnings.warn(
                f"{warn_context}: outer radial nodes carry more than "
                f"{_TAIL_FRACTION:g} of the weighted energy; increase qmax",
                TruncationWarning,
                stacklevel=3,
            )
    return prefactor * total


def sinogram_norm(
    psi: Sinogram,
    params: SobolevParams,
    m: int | None = None,
    convention: str = "lemma",
    nq: int = 512,
    qmax: float | None = None,
    lmax: int | None = None,
) -> float:
    """Weighted Sobolev norm of a sinogram (see the module docstring).

    ``m`` defaults to the sinogram's own rank and sets the ``sin^m(theta)``
    factor applied before the transform.
    """
    params.require_sinogram_admissible()
    qs, coeffs = sinogram_tilde_harmonics(psi, m, convention, nq=nq, qmax=qmax, lmax=lmax)
    norm_sq = weighted_norm_sq(
        qs, coeffs, params, radial_exponent_offset=0.0,
        prefactor=1.0 / (4.0 * np.pi), warn_context="sinogram norm",
    )
    return float(np.sqrt(norm_sq))


def field_norm(
    f: TensorField2D,
    params: SobolevParams,
    nq: int = 512,
    qmax: float | None = None,
    ntheta: int = 128,
    oversample: int = 12,
) -> float:
    """Weighted Sobolev norm of a solenoidal field (see the module docstring).

    The quadratic form involves only the last component, which determines a
    solenoidal field; it is a norm only on solenoidal inputs, so fields with
    relative divergence residual above ``1e-6`` are rejected.
    """
    params.require_field_admissible()
    if f.m >= 1:
        residual = relative_divergence_residual(f)
        if residual > 1e-6:
            raise ValueError(
                f"the field norm is defined on solenoidal fields only; relative "
                f"divergence residual {residual:.3e} > 1e-06"
            )
    qs, coeffs = field_harmonics(f, nq=nq, qmax=qmax, ntheta=ntheta, oversample=oversample)
    norm_sq = weighted_norm_sq(
        qs, coeffs, params, radial_exponent_offset=1.0,
        prefactor=1.0 / (2.0 * np.pi), warn_context="field norm",
    )
    return float(np.sqrt(norm_sq))


def reshetnyak_check(
    f: TensorField2D,
    params: SobolevParams,
    convention: str = "lemma",
    num_p: int | None = None,
    ntheta: int = 128,
    nq: int = 512,
    qmax: float | None = None,
    oversample: int = 12,
    sinogram: Sinogram | None = None,
) -> float:
    """Ratio of the sinogram norm at shifted indices to the field norm.

    ``||I_m f||_(r, s+1/2, t+1/2) / ||f||_(r, s, t)`` — equal to 1 under the
    ``"lemma"`` convention and to ``sqrt(2*pi)`` under ``"fst"``, up to
    discretization error.  Raises on fields with vanishing norm.
    """
    return reshetnyak_ratios(
        f, [params], convention,
        num_p=num_p, ntheta=ntheta, nq=nq, qmax=qmax,
        oversample=oversample, sinogram=sinogram,
    )[0]


def reshetnyak_ratios(
    f: TensorField2D,
    params_list: list[SobolevParams],
    convention: str = "lemma",
    num_p: int | None = None,
    ntheta: int = 128,
    nq: int = 512,
    qmax: float | None = None,
    oversample: int = 12,
    sinogram: Sinogram | None = None,
) -> list[float]:
    """Isometry ratios for several parameter triples on one field.

    The two spectral decompositions are computed once and reweighted per
    triple, so sweeping parameters costs almost nothing beyond the first
    ratio.
    """
    for params in params_list:
        params.require_field_admissible()
        params.shifted().require_sinogram_admissible()
    if num_p is None:
        num_p = f.grid.n + 1
    if qmax is None:
        qmax = f.grid.radius

    f_qs, f_coeffs = field_harmonics(f, nq=nq, qmax=qmax, ntheta=ntheta, oversample=oversample)
    if sinogram is None:
        sinogram = forward(f, num_p=num_p, ntheta=ntheta)
    s_qs, s_coeffs = sinogram_tilde_harmonics(sinogram, f.m, convention, nq=nq, qmax=qmax)

    ratios = []
    for params in params_list:
        field_sq = weighted_norm_sq(
            f_qs, f_coeffs, params, radial_exponent_offset=1.0,
            prefactor=1.0 / (2.0 * np.pi), warn_context="field norm",
        )
        if field_sq == 0.0:
            raise ValueError("field norm vanishes; the isometry ratio is undefined")
        sino_sq = weighted_norm_sq(
            s_qs, s_coeffs, params.shifted(), radial_exponent_offset=0.0,
            prefactor=1.0 / (4.0 * np.pi), warn_context="sinogram norm",
        )
        ratios.append(float(np.sqrt(sino_sq / field_sq)))
    return ratios
