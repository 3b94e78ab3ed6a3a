"""1-D finite-volume simulator for isobaric, isothermal multicomponent
reaction-diffusion with zero-flux boundaries.

The species equations dc/dt + div J = r are discretized on a uniform
grid; fluxes at interior faces come from the flux-force inversion in
:mod:`msdiff.mskernel` evaluated at arithmetic-mean face compositions,
and time stepping is explicit Euler with an adaptive step bounded by the
spectral radius of the effective diffusion operator.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.special import xlogy

from .errors import MaxStepsExceeded, NotConvex, PositivityViolation
from .mixture import MixtureSpec
from .mskernel import (_diffusion_matrix_reduced, _fluxes_projected,
                       floor_composition)
from .thermo import IDEAL, ThermoModel, gamma_matrix, ln_activity_coeffs

#: Relative tolerance on per-cell total-concentration uniformity.
ISOBARIC_TOL = 1e-8

#: Negatives beyond -POSITIVITY_REL * c_tot are violations; smaller ones
#: are clamped to zero as arithmetic noise.
POSITIVITY_REL = 1e-10


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1-D grid with zero-flux boundary faces."""
    ncells: int
    length: float

    def __post_init__(self):
        if self.ncells < 2:
            raise ValueError(f"need >= 2 cells, got {self.ncells}")
        if self.length <= 0:
            raise ValueError(f"domain length must be positive, got {self.length!r}")

    @property
    def h(self) -> float:
        return self.length / self.ncells

    @property
    def cell_centers(self) -> np.ndarray:
        return (np.arange(self.ncells) + 0.5) * self.h


@dataclass(frozen=True)
class Field:
    """Per-cell concentration vectors at one instant."""
    c: np.ndarray
    grid: Grid1D
    time: float = 0.0

    def __post_init__(self):
        c = np.array(self.c, dtype=float)
        if c.ndim != 2 or c.shape[0] != self.grid.ncells:
            raise ValueError(f"c must be (ncells, nspecies), got {c.shape}")
        if np.any(c < 0):
            raise ValueError("concentrations must be nonnegative")
        totals = c.sum(axis=1)
        ref = totals.mean()
        if np.max(np.abs(totals - ref)) > ISOBARIC_TOL * ref:
            raise ValueError("per-cell total concentration must be uniform")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def nspecies(self) -> int:
        return self.c.shape[1]

    @property
    def c_tot(self) -> float:
        """Per-cell total concentration (uniform by construction)."""
        return float(self.c.sum(axis=1).mean())


@dataclass(frozen=True)
class Reaction:
    """One mass-action reaction: rate = k * prod_i c_i^reactants_i."""
    reactants: np.ndarray
    products: np.ndarray
    rate_constant: float

    def __post_init__(self):
        r = np.array(self.reactants, dtype=float)
        p = np.array(self.products, dtype=float)
        if r.shape != p.shape or r.ndim != 1:
            raise ValueError("reactant/product stoichiometries must be equal-length vectors")
        if np.any(r < 0) or np.any(p < 0):
            raise ValueError("stoichiometric coefficients must be nonnegative")
        if self.rate_constant < 0:
            raise ValueError("rate constant must be nonnegative")
        if p.sum() != r.sum():
            raise ValueError(
                "reaction must conserve total moles (isobaric constraint): "
                f"{r} -> {p}")
        r.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "reactants", r)
        object.__setattr__(self, "products", p)

    @property
    def net(self) -> np.ndarray:
        return self.products - self.reactants


@dataclass(frozen=True)
class ReactionNetwork:
    """Mole-conserving mass-action network; the induced rate function is
    quasi-positive by construction."""
    reactions: tuple[Reaction, ...]

    def __post_init__(self):
        object.__setattr__(self, "reactions", tuple(self.reactions))

    def rates(self, c: np.ndarray) -> np.ndarray:
        """Net production rates f(c), batched over leading axes."""
        c = np.asarray(c, dtype=float)
        f = np.zeros_like(c)
        for rx in self.reactions:
            rate = rx.rate_constant * np.prod(
                np.power(c, rx.reactants), axis=-1, keepdims=True)
            f = f + rate * rx.net
        return f


NO_REACTIONS = ReactionNetwork(reactions=())


@dataclass(frozen=True)
class SimConfig:
    """Time-stepping and checkpointing controls."""
    t_end: float
    cfl_safety: float = 0.4
    checkpoint_interval: float | None = None  # default t_end / 50
    max_steps: int = 10_000_000
    floor_eps: float = 1e-12
    dt_refresh_steps: int = 10  # stable_dt recomputed every this many steps

    def __post_init__(self):
        if self.t_end <= 0:
            raise ValueError("t_end must be positive")
        if not 0 < self.cfl_safety <= 1:
            raise ValueError("cfl_safety must be in (0, 1]")
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")

    @property
    def cp_interval(self) -> float:
        return self.checkpoint_interval if self.checkpoint_interval else self.t_end / 50


def _model_of(spec: MixtureSpec, model: ThermoModel | None) -> ThermoModel:
    if model is not None:
        return model
    return spec.thermo if spec.thermo is not None else IDEAL


def _face_states(field: Field, floor: float):
    """Face compositions (arithmetic mean, renormalized, floored),
    mole-fraction jumps across faces, and face totals."""
    c = field.c
    totals = c.sum(axis=1, keepdims=True)
    x = c / totals
    xf = 0.5 * (x[:-1] + x[1:])
    xf /= xf.sum(axis=1, keepdims=True)
    xf = floor_composition(xf, floor)
    grad = (x[1:] - x[:-1]) / field.grid.h
    ctf = 0.5 * (totals[:-1, 0] + totals[1:, 0])
    return xf, grad, ctf


def face_fluxes(field: Field, spec: MixtureSpec, model: ThermoModel | None = None,
                floor: float = 1e-12) -> np.ndarray:
    """Fluxes at all ncells+1 faces; the two boundary faces carry zero
    flux (Neumann walls)."""
    model = _model_of(spec, model)
    xf, grad, ctf = _face_states(field, floor)
    g = gamma_matrix(model, xf)
    d = np.einsum("fij,fj->fi", g, grad)
    d -= d.mean(axis=1, keepdims=True)
    j = _fluxes_projected(xf, spec.dmat, d, ctf)
    out = np.zeros((field.grid.ncells + 1, field.nspecies))
    out[1:-1] = j
    return out


def stable_dt(field: Field, spec: MixtureSpec, model: ThermoModel | None = None,
              reactions: ReactionNetwork = NO_REACTIONS,
              cfl_safety: float = 0.4, floor: float = 1e-12) -> float:
    """Explicit-Euler step bound: cfl * h^2 / (2 lambda_max) with
    lambda_max the largest diffusion-operator eigenvalue over all faces,
    further capped so reactions change no concentration by more than 10%
    per step.

    Raises ``NotConvex`` if the operator loses positivity at any face.
    """
    model = _model_of(spec, model)
    xf, _, _ = _face_states(field, floor)
    m = _diffusion_matrix_reduced(xf, spec.dmat, model)
    w = np.linalg.eigvals(m)
    lam_min = float(w.real.min())
    if lam_min <= 0:
        raise NotConvex(f"diffusion operator eigenvalue {lam_min!r} <= 0 at a face")
    lam_max = float(w.real.max())
    h = field.grid.h
    dt = cfl_safety * h * h / (2.0 * lam_max)
    if reactions.reactions:
        f = reactions.rates(field.c)
        ct = field.c_tot
        consuming = f < 0
        if np.any(consuming):
            dt = min(dt, float(0.1 * np.min(field.c[consuming] / -f[consuming])))
        producing = f > 0
        if np.any(producing):
            dt = min(dt, float(0.1 * ct / np.max(f[producing])))
    return dt


def step(field: Field, spec: MixtureSpec, model: ThermoModel | None = None,
         reactions: ReactionNetwork = NO_REACTIONS, dt: float = 0.0,
         floor: float = 1e-12) -> Field:
    """One explicit Euler update c += dt (div-free flux balance + r(c)).

    Per-cell totals are preserved exactly up to roundoff because fluxes
    sum to zero over species and reactions conserve moles.  Negatives
    beyond the noise threshold raise ``PositivityViolation``; tiny ones
    are clamped to zero.
    """
    jf = face_fluxes(field, spec, model, floor)
    return _advance(field, jf, reactions, dt)


def _advance(field: Field, jf: np.ndarray, reactions: ReactionNetwork,
             dt: float) -> Field:
    h = field.grid.h
    rhs = (jf[:-1] - jf[1:]) / h
    if reactions.reactions:
        rhs = rhs + reactions.rates(field.c)
    cn = field.c + dt * rhs
    ct = field.c_tot
    if np.any(cn < -POSITIVITY_REL * ct):
        cell, sp = np.unravel_index(np.argmin(cn), cn.shape)
        raise PositivityViolation(
            f"c[{cell},{sp}] = {cn[cell, sp]!r} at t = {field.time + dt!r} "
            "(CFL or model breach)")
    np.clip(cn, 0.0, None, out=cn)
    return Field(c=cn, grid=field.grid, time=field.time + dt)


@dataclass(frozen=True)
class Checkpoint:
    """Immutable trajectory snapshot with conserved-quantity and entropy
    diagnostics."""
    time: float
    c: np.ndarray
    masses: np.ndarray          # per-species global mass, sum_cells c * h
    entropy: float              # V = sum_cells G(c) h, RT units
    dissipation: float          # W = -sum_faces sum_i J_i dmu_i >= 0
    cumulative_dissipation: float  # int_0^t W ds, per-step trapezoid
    min_concentration: float


@dataclass
class Trajectory:
    """Checkpointed simulation history."""
    grid: Grid1D
    names: tuple[str, ...]
    c_tot0: float
    checkpoints: list[Checkpoint] = dc_field(default_factory=list)

    @property
    def times(self) -> np.ndarray:
        return np.array([cp.time for cp in self.checkpoints])

    def final(self) -> Checkpoint:
        return self.checkpoints[-1]


def _entropy_of(field: Field, model: ThermoModel, floor: float) -> float:
    c = field.c
    totals = c.sum(axis=1, keepdims=True)
    x = c / totals
    lng = ln_activity_coeffs(model, x)
    return float((np.sum(c * lng) + np.sum(xlogy(c, x))) * field.grid.h)


def _dissipation_from(jf: np.ndarray, field: Field, model: ThermoModel,
                      floor: float) -> float:
    """W = -sum over interior faces of J_i (mu_i,R - mu_i,L); the cell
    width cancels against the gradient."""
    c = field.c
    totals = c.sum(axis=1, keepdims=True)
    x = np.maximum(c / totals, floor)
    mu = ln_activity_coeffs(model, x) + np.log(x)
    return float(-np.sum(jf[1:-1] * (mu[1:] - mu[:-1])))


def _dissipation_of(field: Field, spec: MixtureSpec, model: ThermoModel,
                    floor: float) -> float:
    jf = face_fluxes(field, spec, model, floor)
    return _dissipation_from(jf, field, model, floor)


def _checkpoint(field: Field, spec: MixtureSpec, model: ThermoModel,
                floor: float, w: float, cum_w: float) -> Checkpoint:
    c = np.array(field.c)
    c.setflags(write=False)
    return Checkpoint(
        time=field.time,
        c=c,
        masses=c.sum(axis=0) * field.grid.h,
        entropy=_entropy_of(field, model, floor),
        dissipation=w,
        cumulative_dissipation=cum_w,
        min_concentration=float(c.min()),
    )


def simulate(initial: Field, spec: MixtureSpec, model: ThermoModel | None = None,
             reactions: ReactionNetwork = NO_REACTIONS,
             config: SimConfig | None = None) -> Trajectory:
    """Run the explicit finite-volume scheme to ``config.t_end``.

    Strictly positive initial concentrations are recommended; exact
    zeros are handled through the composition floor.  Raises
    ``MaxStepsExceeded``, ``PositivityViolation``, or ``NotConvex``.
    """
    if config is None:
        raise ValueError("a SimConfig is required")
    model = _model_of(spec, model)
    floor = config.floor_eps
    field = initial
    jf = face_fluxes(field, spec, model, floor)
    w = _dissipation_from(jf, field, model, floor)
    cum_w = 0.0
    traj = Trajectory(grid=initial.grid, names=spec.names, c_tot0=initial.c_tot)
    traj.checkpoints.append(_checkpoint(field, spec, model, floor, w, cum_w))

    interval = config.cp_interval
    next_cp = interval
    tiny = 1e-12 * config.t_end
    steps = 0
    dt_bound = stable_dt(field, spec, model, reactions, config.cfl_safety, floor)
    while field.time < config.t_end - tiny:
        if steps and steps % config.dt_refresh_steps == 0:
            dt_bound = stable_dt(field, spec, model, reactions,
                                 config.cfl_safety, floor)
        dt = min(dt_bound, config.t_end - field.time, next_cp - field.time)
        field = _advance(field, jf, reactions, dt)
        jf = face_fluxes(field, spec, model, floor)
        w_new = _dissipation_from(jf, field, model, floor)
        cum_w += 0.5 * (w + w_new) * dt
        w = w_new
        steps += 1
        if steps > config.max_steps:
            raise MaxStepsExceeded(f"{steps} steps at t = {field.time!r}")
        if field.time >= next_cp - tiny:
            traj.checkpoints.append(_checkpoint(field, spec, model, floor, w, cum_w))
            next_cp += interval
    if traj.checkpoints[-1].time < field.time - tiny:
        traj.checkpoints.append(_checkpoint(field, spec, model, floor, w, cum_w))
    return traj
