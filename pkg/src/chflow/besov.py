"""Discrete Littlewood-Paley analysis on the periodic grid.

A smooth radial low-pass profile chi (equal to 1 for |k| <= 3/4, vanishing
for |k| >= 4/3) generates the annular profile phi(k) = chi(k/2) - chi(k),
supported in 3/4 <= |k| <= 8/3.  The block multipliers are phi(2^{-j} k)
for j >= 0 and chi itself for the low block j = -1; by telescoping they sum
to one on every resolved frequency, so block decompositions reconstruct the
field to round-off.  Norms aggregate the per-block quantities

    a_j = 2^{j s} || block_j u ||_{L^p}

in l^r over j = -1 .. j_max, with j_max set by the grid Nyquist.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .fields import EulerianField, Grid1D, trapezoid_lp


def _smooth_step(x: np.ndarray) -> np.ndarray:
    """C-infinity ramp from 0 (x <= 0) to 1 (x >= 1) via the exp(-1/x) glue."""
    x = np.asarray(x, dtype=float)
    f = np.zeros_like(x)
    pos = x > 0
    f[pos] = np.exp(-1.0 / x[pos])
    g = np.zeros_like(x)
    neg = x < 1
    g[neg] = np.exp(-1.0 / (1.0 - x[neg]))
    return f / (f + g)


def lowpass_profile(k: np.ndarray) -> np.ndarray:
    """chi: 1 on |k| <= 3/4, 0 on |k| >= 4/3, smooth and radial in between."""
    return 1.0 - _smooth_step((np.abs(k) - 0.75) / (4.0 / 3.0 - 0.75))


@dataclass(frozen=True, eq=False)
class FilterBank:
    """Sampled block multipliers for one grid."""

    grid: Grid1D
    chi: np.ndarray            # low block multiplier on the rfft bins
    phis: np.ndarray           # shape (j_max+1, bins), annular multipliers
    j_max: int

    @property
    def block_count(self) -> int:
        return self.j_max + 2

    @property
    def js(self) -> np.ndarray:
        return np.arange(-1, self.j_max + 1)


def build_filter_bank(grid: Grid1D) -> FilterBank:
    """Construct the multipliers; fails if the grid hosts fewer than 3 blocks."""
    k = grid.wavenumbers
    k_max = float(k[-1])
    j_max = int(math.floor(math.log2(k_max / 0.75)))
    if j_max < 1:
        raise ValueError("grid too small to host at least 3 dyadic blocks")
    chi = lowpass_profile(k)
    phis = np.empty((j_max + 1, k.size))
    for j in range(j_max + 1):
        scaled = k / 2.0**j
        phis[j] = lowpass_profile(scaled / 2.0) - lowpass_profile(scaled)
    return FilterBank(grid=grid, chi=chi, phis=phis, j_max=j_max)


def _values_of(field_or_values) -> np.ndarray:
    if isinstance(field_or_values, EulerianField):
        return field_or_values.u
    return np.asarray(field_or_values, dtype=float)


def block_decompose(field_or_values, bank: FilterBank) -> np.ndarray:
    """All dyadic blocks of the field, shape (j_max+2, N); row 0 is block -1."""
    values = _values_of(field_or_values)
    spec = np.fft.rfft(values)
    n = bank.grid.count
    blocks = np.empty((bank.block_count, n))
    blocks[0] = np.fft.irfft(bank.chi * spec, n=n)
    for j in range(bank.j_max + 1):
        blocks[j + 1] = np.fft.irfft(bank.phis[j] * spec, n=n)
    return blocks


@dataclass(frozen=True, eq=False)
class BesovProfile:
    """Per-block weighted L^p sizes and their l^r aggregate."""

    s: float
    p: float
    r: float
    js: np.ndarray
    a: np.ndarray
    norm: float


def besov_norm(field_or_values, s: float, p: float, r: float,
               bank: Optional[FilterBank] = None,
               grid: Optional[Grid1D] = None) -> BesovProfile:
    """The B^s_{p,r} norm as the l^r size of (2^{js} ||block_j||_{L^p})_j."""
    if not 1 <= p < np.inf:
        raise ValueError("p must satisfy 1 <= p < inf")
    if not (r >= 1):
        raise ValueError("r must satisfy 1 <= r <= inf")
    if bank is None:
        if isinstance(field_or_values, EulerianField):
            grid = field_or_values.grid
        if grid is None:
            raise ValueError("besov_norm needs a bank or a grid")
        bank = build_filter_bank(grid)
    blocks = block_decompose(field_or_values, bank)
    h = bank.grid.spacing
    js = bank.js
    a = np.array([
        2.0 ** (j * s) * trapezoid_lp(block, h, p)
        for j, block in zip(js, blocks)
    ])
    if np.isinf(r):
        norm = float(np.max(a))
    else:
        norm = float(np.sum(a**r) ** (1.0 / r))
    return BesovProfile(s=s, p=p, r=r, js=js, a=a, norm=norm)


def sobolev_norm(field_or_values, s: float, grid: Grid1D) -> float:
    """H^s by the Fourier-integral multiplier (1+k^2)^{s/2}, the r=2 oracle."""
    values = _values_of(field_or_values)
    spec = np.fft.rfft(values)
    k = grid.wavenumbers
    weights = np.full(k.size, 2.0)
    weights[0] = 1.0
    if grid.count % 2 == 0:
        weights[-1] = 1.0
    # Parseval with the trapezoid L^2 convention: ||u||^2 = (h/N) sum |u_hat|^2
    total = np.sum(weights * (1.0 + k**2) ** s * np.abs(spec) ** 2)
    return float(np.sqrt(grid.spacing / grid.count * total))


def random_corpus(grid: Grid1D, count: int, seed: int,
                  k_cap_fraction: float = 1.0 / 3.0) -> List[np.ndarray]:
    """Random band-limited mixtures with comparable energy in every block.

    Spectra are capped at k_cap_fraction of the Nyquist so that pointwise
    products stay resolved; per-block amplitudes are drawn log-uniformly.
    """
    rng = np.random.default_rng(seed)
    bank = build_filter_bank(grid)
    k = grid.wavenumbers
    k_cap = k_cap_fraction * grid.nyquist
    members = []
    for _ in range(count):
        spec = np.zeros(k.size, dtype=complex)
        for j in range(-1, bank.j_max + 1):
            lo = 0.0 if j < 0 else 0.75 * 2.0**j
            hi = min((4.0 / 3.0) * 2.0**j if j >= 0 else 4.0 / 3.0, k_cap)
            sel = (k >= lo) & (k <= hi) & (k > 0)
            if not np.any(sel):
                continue
            scale = 10.0 ** rng.uniform(-1.0, 0.5)
            coeff = rng.normal(size=sel.sum()) + 1j * rng.normal(size=sel.sum())
            # normalise so each block contributes O(scale) to the L^2 size
            spec[sel] += scale * coeff / np.sqrt(sel.sum())
        values = np.fft.irfft(spec * grid.count / grid.length, n=grid.count)
        sup = np.max(np.abs(values))
        if sup > 0:
            values = values / sup * 10.0 ** rng.uniform(-0.5, 0.5)
        members.append(values)
    return members


@dataclass(frozen=True)
class AuditRow:
    inequality: str
    param_set: str
    empirical_c: float


def inequality_audit(corpus: Sequence[np.ndarray], bank: FilterBank,
                     epsilon: float = 0.5) -> List[AuditRow]:
    """Empirical constants for the interpolation, product and Moser estimates.

    Every row reports max over the corpus of LHS / RHS-with-C=1.  The first
    interpolation inequality is constant-free and must audit to <= 1; every
    other estimate just has to come out finite.
    """
    grid = bank.grid
    rows: List[AuditRow] = []

    def nb(values, s, p, r):
        return besov_norm(values, s, p, r, bank=bank).norm

    nonzero = [u for u in corpus if np.max(np.abs(u)) > 0]

    # interpolation, exact form: lambda-weighted geometric mean bound
    for (s1, s2) in ((0.0, 1.0), (0.5, 1.5), (-0.5, 0.5), (1.0, 2.0)):
        for lam in (0.25, 0.5, 0.75):
            for (p, r) in ((2.0, 1.0), (3.0, 2.0)):
                s_mid = lam * s1 + (1 - lam) * s2
                ratios = []
                for u in nonzero:
                    denom = nb(u, s1, p, r) ** lam * nb(u, s2, p, r) ** (1 - lam)
                    if denom > 0:
                        ratios.append(nb(u, s_mid, p, r) / denom)
                rows.append(AuditRow(
                    "interpolation_exact",
                    f"s1={s1},s2={s2},lam={lam},p={p},r={r}",
                    float(np.max(ratios)),
                ))

    # interpolation, second form: l^1 mid norm from l^inf endpoint norms
    for (s1, s2, lam, p) in ((0.0, 1.0, 0.5, 2.0), (0.5, 1.5, 0.25, 2.0)):
        s_mid = lam * s1 + (1 - lam) * s2
        prefactor = (1.0 / (s2 - s1)) * (1.0 / lam + 1.0 / (1 - lam))
        ratios = []
        for u in nonzero:
            denom = prefactor * nb(u, s1, p, np.inf) ** lam * nb(u, s2, p, np.inf) ** (1 - lam)
            if denom > 0:
                ratios.append(nb(u, s_mid, p, 1.0) / denom)
        rows.append(AuditRow(
            "interpolation_linf_to_l1",
            f"s1={s1},s2={s2},lam={lam},p={p}",
            float(np.max(ratios)),
        ))

    # logarithmic interpolation
    for (s, p) in ((0.5, 2.0), (1.0, 3.0)):
        ratios = []
        for u in nonzero:
            low = nb(u, s, p, np.inf)
            high = nb(u, s + epsilon, p, np.inf)
            if low > 0:
                ratios.append(nb(u, s, p, 1.0) / (low * np.log(np.e + high / low)))
        rows.append(AuditRow(
            "log_interpolation",
            f"s={s},p={p},eps={epsilon}",
            float(np.max(ratios)),
        ))

    # algebra estimate ||uv|| <= C(||u||_inf ||v|| + ||u|| ||v||_inf)
    pairs = list(zip(nonzero[0::2], nonzero[1::2]))
    for (s, p, r) in ((1.0, 2.0, 1.0), (1.5, 2.0, 2.0), (1.0, 3.0, 1.0)):
        ratios = []
        for u, v in pairs:
            denom = (np.max(np.abs(u)) * nb(v, s, p, r)
                     + nb(u, s, p, r) * np.max(np.abs(v)))
            if denom > 0:
                ratios.append(nb(u * v, s, p, r) / denom)
        rows.append(AuditRow("product_algebra", f"s={s},p={p},r={r}",
                             float(np.max(ratios))))

    # transport-style estimate ||u dv|| <= C(||u||_{s+1} ||v||_inf + ||u||_inf ||dv||_s)
    for (s, p, r) in ((0.5, 2.0, 1.0),):
        ratios = []
        for u, v in pairs:
            dv = np.fft.irfft(np.fft.rfft(v) * 1j * grid.wavenumbers, n=grid.count)
            denom = (nb(u, s + 1, p, r) * np.max(np.abs(v))
                     + np.max(np.abs(u)) * nb(dv, s, p, r))
            if denom > 0:
                ratios.append(nb(u * dv, s, p, r) / denom)
        rows.append(AuditRow("product_transport", f"s={s},p={p},r={r}",
                             float(np.max(ratios))))

    # two-index product law ||uv||_{s1} <= C ||u||_{s1} ||v||_{s2}
    for (s1, s2, p, r) in ((0.5, 1.0, 2.0, 1.0), (0.0, 0.75, 2.0, 1.0)):
        ratios = []
        for u, v in pairs:
            denom = nb(u, s1, p, r) * nb(v, s2, p, r)
            if denom > 0:
                ratios.append(nb(u * v, s1, p, r) / denom)
        rows.append(AuditRow("product_two_index", f"s1={s1},s2={s2},p={p},r={r}",
                             float(np.max(ratios))))

    # Moser estimate in the critical scaling
    for p in (2.0, 3.0):
        s1 = s2 = 1.0 / p + 0.5
        ratios = []
        for u, v in pairs:
            denom = nb(u, s1, p, 1.0) * nb(v, s2, p, 1.0)
            if denom > 0:
                ratios.append(nb(u * v, s1 + s2 - 1.0 / p, p, 1.0) / denom)
        rows.append(AuditRow("moser", f"s1={s1},s2={s2},p={p}",
                             float(np.max(ratios))))

    return rows


def write_audit_csv(rows: Sequence[AuditRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["inequality", "param_set", "empirical_C"])
        for row in rows:
            writer.writerow([row.inequality, row.param_set,
                             f"{row.empirical_c:.17g}"])
