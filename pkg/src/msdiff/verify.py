"""Independent oracles and global diagnostics: the entropy/Lyapunov
ledger, the binary filtration-equation reference solver, ternary
closed-form checks, and cross-diffusion phenomenon detectors."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import NonMonotoneFlux
from .mixture import MixtureSpec
from .mskernel import assemble_B
from .solver import Field, Grid1D, Trajectory, face_fluxes
from .thermo import ThermoModel

#: Pointwise dissipation tolerance, relative to |V(0)|.
W_TOL_REL = 1e-10

#: Lyapunov-balance slack, relative to |V(0)| (explicit-stepping error).
LYAP_TOL_REL = 1e-6


@dataclass
class EntropyLedger:
    """Entropy V, dissipation W, and the cumulative dissipation integral
    per checkpoint, with the Lyapunov-couple verdict.

    Invariants checked: W >= -1e-10 |V(0)| at every checkpoint, and
    V(t) + integral_0^t W ds <= V(0) + 1e-6 |V(0)|.
    """
    times: np.ndarray
    entropy: np.ndarray
    dissipation: np.ndarray
    cumulative_dissipation: np.ndarray
    ok: bool
    violations: list[str] = dc_field(default_factory=list)

    @property
    def balance_defect(self) -> np.ndarray:
        """V(t) + integral W - V(0); nonpositive up to stepping error."""
        return self.entropy + self.cumulative_dissipation - self.entropy[0]


def entropy_ledger(trajectory: Trajectory, model: ThermoModel | None = None) -> EntropyLedger:
    """Build the Lyapunov ledger from a trajectory's checkpoints.

    Uses the V and W recorded per checkpoint together with the solver's
    per-step trapezoid integral of W (checkpoint-level quadrature would
    alias steep transients); reports every violated invariant with the
    first offending checkpoint.
    """
    t = trajectory.times
    v = np.array([cp.entropy for cp in trajectory.checkpoints])
    w = np.array([cp.dissipation for cp in trajectory.checkpoints])
    cum = np.array([cp.cumulative_dissipation for cp in trajectory.checkpoints])
    v0 = abs(v[0])
    violations: list[str] = []
    neg = np.nonzero(w < -W_TOL_REL * v0)[0]
    if neg.size:
        k = int(neg[0])
        violations.append(
            f"dissipation W = {w[k]!r} < 0 at checkpoint {k} (t = {t[k]!r})")
    excess = np.nonzero(v + cum > v[0] + LYAP_TOL_REL * v0)[0]
    if excess.size:
        k = int(excess[0])
        violations.append(
            f"Lyapunov balance violated at checkpoint {k} (t = {t[k]!r}): "
            f"V + int W - V0 = {v[k] + cum[k] - v[0]!r}")
    return EntropyLedger(times=t, entropy=v, dissipation=w,
                         cumulative_dissipation=cum,
                         ok=not violations, violations=violations)


def _binary_margules_a(model: ThermoModel | None) -> float:
    if model is None or model.is_ideal:
        return 0.0
    a = model.interactions(2)
    return float(a[0, 1])


def filtration_oracle(c0, model: ThermoModel | None, d12: float, grid: Grid1D,
                      t_end: float, c_tot: float | None = None,
                      cfl_safety: float = 0.3) -> np.ndarray:
    """Scalar reference solver for the exact binary reduction
    d_t c = Lap(phi(c)) with zero-flux walls.

    For the ideal model phi(c) = d12 * c (heat equation); for the binary
    two-suffix model with interaction a the flux derivative is
    phi'(c) = d12 (1 - 2 a x (1 - x)) with x = c / c_tot.  Raises
    ``NonMonotoneFlux`` when phi' <= 0 on the traversed range.
    """
    c = np.array(c0, dtype=float)
    if c.ndim != 1 or c.size != grid.ncells:
        raise ValueError(f"profile shape {c.shape} does not match grid {grid.ncells}")
    a = _binary_margules_a(model)
    if a != 0.0 and c_tot is None:
        raise ValueError("c_tot is required for the nonideal binary flux")
    ct = float(c_tot) if c_tot is not None else 1.0

    def phi(s):
        if a == 0.0:
            return d12 * s
        return d12 * (s - a * s**2 / ct + (2.0 * a / 3.0) * s**3 / ct**2)

    def phi_prime(s):
        if a == 0.0:
            return np.full_like(s, d12)
        x = s / ct
        return d12 * (1.0 - 2.0 * a * x * (1.0 - x))

    h = grid.h
    t = 0.0
    while t < t_end * (1.0 - 1e-12):
        dp = phi_prime(c)
        if np.any(dp <= 0):
            k = int(np.argmin(dp))
            raise NonMonotoneFlux(
                f"phi'({c[k]!r}) = {dp[k]!r} <= 0: chemical potential not "
                "increasing in concentration (phase-splitting regime)")
        dt = min(cfl_safety * h * h / (2.0 * float(dp.max())), t_end - t)
        p = phi(c)
        lap = np.empty_like(c)
        lap[1:-1] = p[2:] - 2.0 * p[1:-1] + p[:-2]
        lap[0] = p[1] - p[0]      # zero-flux ghost: mirror edge value
        lap[-1] = p[-2] - p[-1]
        c = c + (dt / (h * h)) * lap
        t += dt
    return c


@dataclass(frozen=True)
class CrossDiffusionEvent:
    """One detected cross-diffusion occurrence at a face."""
    kind: str       # "uphill" (J aligned with grad c) or "osmotic" (J without grad)
    time: float
    face: int       # interior-face index, 0-based from the leftmost interior face
    species: int
    flux: float
    grad_c: float


def detect_uphill(obj, spec: MixtureSpec, model: ThermoModel | None = None,
                  rel_tol: float = 1e-10) -> list[CrossDiffusionEvent]:
    """Scan a field or trajectory for uphill diffusion (flux with a
    positive component along the species' own gradient) and osmotic
    diffusion (flux where the gradient vanishes).

    An empty report is a valid outcome; binary ideal systems always
    produce one.
    """
    if isinstance(obj, Trajectory):
        fields = [Field(c=cp.c, grid=obj.grid, time=cp.time) for cp in obj.checkpoints]
    else:
        fields = [obj]
    events: list[CrossDiffusionEvent] = []
    for fld in fields:
        jf = face_fluxes(fld, spec, model)[1:-1]
        grad = (fld.c[1:] - fld.c[:-1]) / fld.grid.h
        fscale = float(np.max(np.abs(jf))) if jf.size else 0.0
        gscale = float(np.max(np.abs(grad))) if grad.size else 0.0
        if fscale == 0.0:
            continue
        for face in range(jf.shape[0]):
            for sp in range(jf.shape[1]):
                j, g = float(jf[face, sp]), float(grad[face, sp])
                if abs(g) <= rel_tol * gscale and abs(j) > rel_tol * fscale:
                    events.append(CrossDiffusionEvent(
                        "osmotic", fld.time, face, sp, j, g))
                elif j * g > rel_tol * fscale * gscale:
                    events.append(CrossDiffusionEvent(
                        "uphill", fld.time, face, sp, j, g))
    return events


@dataclass(frozen=True)
class TernaryReport:
    """Closed-form det/trace of the reduced ternary matrix and the
    sector certificate for its inverse's spectrum."""
    det_b: float
    tr_b: float
    matches_assembly: bool
    sector_ok: bool


def ternary_closed_forms(x, dmat) -> TernaryReport:
    """Closed forms for n = 3:

        det B = x1/(D12 D13) + x2/(D12 D23) + x3/(D13 D23)
        tr  B = (x1+x2)/D12 + (x1+x3)/D13 + (x2+x3)/D23

    compared against the assembled B to 1e-12 relative; sector_ok
    requires (tr B)^2 >= 3 det B and the eigenvalues of B^{-1} within
    angle pi/6 of the positive real axis.
    """
    x = np.asarray(getattr(x, "x", x), dtype=float)
    d = np.asarray(dmat, dtype=float)
    if x.size != 3 or d.shape != (3, 3):
        raise ValueError("ternary closed forms require exactly 3 species")
    d12, d13, d23 = d[0, 1], d[0, 2], d[1, 2]
    det_cf = x[0] / (d12 * d13) + x[1] / (d12 * d23) + x[2] / (d13 * d23)
    tr_cf = (x[0] + x[1]) / d12 + (x[0] + x[2]) / d13 + (x[1] + x[2]) / d23
    b = assemble_B(x, d)
    det_as = float(np.linalg.det(b))
    tr_as = float(np.trace(b))
    matches = (abs(det_as - det_cf) <= 1e-12 * abs(det_cf)
               and abs(tr_as - tr_cf) <= 1e-12 * abs(tr_cf))
    # eigenvalues of B^{-1} have the same argument magnitudes as those of B
    eig = np.linalg.eigvals(b)
    sector = (tr_cf**2 >= 3.0 * det_cf * (1.0 - 1e-12)
              and bool(np.all(np.abs(np.angle(eig)) < np.pi / 6)))
    return TernaryReport(det_b=det_cf, tr_b=tr_cf,
                         matches_assembly=matches, sector_ok=sector)
