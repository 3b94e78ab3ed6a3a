"""Core domain types: mixture definitions, compositions, forces, fluxes."""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import NegativeConcentration, NonPositiveTotal

if TYPE_CHECKING:
    from .thermo import ThermoModel

#: Tolerance on |sum(x) - 1| for a valid composition.
SUM_TOL = 1e-12

#: Concentrations below -CLAMP_REL * total are treated as genuine model
#: violations; anything in (-CLAMP_REL * total, 0) is numerical noise and
#: gets clamped to zero.
CLAMP_REL = 1e-10


def _frozen_array(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SpecIssue:
    """One violated mixture-spec invariant."""
    code: str
    detail: str


@dataclass(frozen=True)
class MixtureSpec:
    """Species labels, the symmetric matrix of pairwise diffusivities
    (length^2/time), and an optional thermodynamic model.

    The diagonal of ``dmat`` is unused and stored as 0.  Construction is
    lenient; use :func:`validate_spec` to collect invariant violations.
    """
    names: tuple[str, ...]
    dmat: np.ndarray
    thermo: "ThermoModel | None" = None

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(str(s) for s in self.names))
        object.__setattr__(self, "dmat", _frozen_array(self.dmat))

    @property
    def n(self) -> int:
        return len(self.names)


def validate_spec(spec: MixtureSpec) -> list[SpecIssue]:
    """Check every MixtureSpec invariant and return all violations.

    An empty list means the spec is valid.
    """
    issues: list[SpecIssue] = []
    n = spec.n
    d = spec.dmat
    if n < 2:
        issues.append(SpecIssue("BadDimension", f"need >= 2 species, got {n}"))
    if d.ndim != 2 or d.shape != (n, n):
        issues.append(SpecIssue(
            "BadDimension", f"dmat shape {d.shape} does not match {n} species"))
        return issues  # remaining checks assume a square matrix
    asym = np.argwhere(d != d.T)
    if asym.size:
        i, j = asym[0]
        issues.append(SpecIssue(
            "AsymmetricD", f"dmat[{i},{j}]={d[i, j]!r} != dmat[{j},{i}]={d[j, i]!r}"))
    off = ~np.eye(n, dtype=bool)
    if np.any(d[off] <= 0):
        issues.append(SpecIssue("NonPositiveD", "off-diagonal diffusivities must be > 0"))
    if np.any(np.diag(d) != 0):
        issues.append(SpecIssue("NonZeroDiagonal", "diagonal entries are unused; store 0"))
    return issues


@dataclass(frozen=True)
class Composition:
    """Mole-fraction vector on the simplex plus the total molar
    concentration (mol/length^3)."""
    x: np.ndarray
    c_tot: float

    def __post_init__(self):
        x = _frozen_array(self.x)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "c_tot", float(self.c_tot))
        if x.ndim != 1 or x.size < 2:
            raise ValueError(f"x must be a vector of >= 2 fractions, got shape {x.shape}")
        if np.any(x < 0):
            raise ValueError(f"mole fractions must be nonnegative: {x}")
        if abs(x.sum() - 1.0) > SUM_TOL:
            raise ValueError(f"mole fractions must sum to 1, got {x.sum()!r}")
        if self.c_tot <= 0:
            raise ValueError(f"c_tot must be positive, got {self.c_tot!r}")

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def c(self) -> np.ndarray:
        """Species concentrations c_i = x_i * c_tot."""
        return self.x * self.c_tot


def mole_fractions(c) -> Composition:
    """Composition from a concentration vector.

    Tiny negative entries (within -1e-10 of the total) are clamped to
    zero; larger negatives raise ``NegativeConcentration``.
    """
    c = np.asarray(c, dtype=float)
    total = float(c.sum())
    if total <= 0:
        raise NonPositiveTotal(f"sum of concentrations is {total!r}")
    if np.any(c < -CLAMP_REL * total):
        bad = int(np.argmin(c))
        raise NegativeConcentration(f"c[{bad}]={c[bad]!r} with total {total!r}")
    c = np.clip(c, 0.0, None)
    total = float(c.sum())
    return Composition(x=c / total, c_tot=total)


def _check_zero_sum(v: np.ndarray, what: str) -> None:
    scale = np.max(np.abs(v)) if v.size else 0.0
    if scale and abs(v.sum()) > 1e-12 * scale:
        raise ValueError(f"{what} must sum to zero: sum={v.sum()!r}, max={scale!r}")


@dataclass(frozen=True)
class DrivingForce:
    """Thermodynamic driving forces (1/length); sums to zero by
    Gibbs-Duhem."""
    d: np.ndarray

    def __post_init__(self):
        d = _frozen_array(self.d)
        object.__setattr__(self, "d", d)
        _check_zero_sum(d, "driving forces")


@dataclass(frozen=True)
class FluxSet:
    """Molar diffusive fluxes (mol/(length^2 time)); sums to zero."""
    J: np.ndarray

    def __post_init__(self):
        J = _frozen_array(self.J)
        object.__setattr__(self, "J", J)
        _check_zero_sum(J, "fluxes")
