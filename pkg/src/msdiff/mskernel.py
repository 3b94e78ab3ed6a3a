"""Flux-force matrices, singular solves on the zero-sum subspace, and
spectral certificates.

The flux-force relations are solved as A J = c_tot d on
E = {v : sum(v) = 0}, where A has off-diagonal entries x_i / D_ij and
diagonal -s_i with s_i = sum_{k != i} x_k / D_ik.  A is quasi-positive,
has null vector x, range orthogonal to ones, and (after symmetrization
by X^{-1/2} A X^{1/2}) a real spectrum contained in (-inf, -delta] u {0}
with delta = min_{i != j} 1 / D_ij.

Three independent solve routes are provided: orthonormal projection onto
E (primary), the reduced (n-1)x(n-1) system via the B matrix, and the
bordered matrix A - mu (x (x) e) used as a test oracle.

Array arguments may be batched along leading axes; the public wrappers
take the domain types from :mod:`msdiff.mixture`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DegenerateComposition, EigSolverFailure, NotConvex, SingularSystem
from .linalg import project_zero_sum, simplex_basis
from .mixture import Composition, DrivingForce, FluxSet
from .thermo import ThermoModel, convexity_check, gamma_matrix

#: Compositions are floored at this value (then renormalized) inside
#: matrix assembly, keeping A irreducible at simplex boundaries.
X_FLOOR = 1e-12


def _as_x(x) -> np.ndarray:
    if isinstance(x, Composition):
        return x.x
    return np.asarray(x, dtype=float)


def floor_composition(x, floor: float = X_FLOOR) -> np.ndarray:
    """Raise entries below ``floor`` to ``floor`` and renormalize."""
    x = np.maximum(_as_x(x), floor)
    return x / x.sum(axis=-1, keepdims=True)


def _inverse_diffusivities(dmat) -> np.ndarray:
    """1 / D_ij off the diagonal, 0 on it."""
    d = np.asarray(dmat, dtype=float)
    off = ~np.eye(d.shape[0], dtype=bool)
    inv = np.zeros_like(d)
    inv[off] = 1.0 / d[off]
    return inv


def assemble_A(x, dmat) -> np.ndarray:
    """Flux-force matrix A(x): off-diagonal x_i / D_ij, diagonal -s_i.

    The composition is floored and renormalized first.
    """
    x = floor_composition(x)
    inv = _inverse_diffusivities(dmat)
    n = inv.shape[0]
    a = x[..., :, None] * inv
    s = np.einsum("ik,...k->...i", inv, x)
    idx = np.arange(n)
    a[..., idx, idx] = -s
    return a


def assemble_A_sym(x, dmat) -> np.ndarray:
    """Symmetrized form A_S = X^{-1/2} A X^{1/2}: off-diagonal
    sqrt(x_i x_j) / D_ij, same diagonal as A.  Null vector sqrt(x)."""
    x = floor_composition(x)
    inv = _inverse_diffusivities(dmat)
    n = inv.shape[0]
    rx = np.sqrt(x)
    a = rx[..., :, None] * rx[..., None, :] * inv
    s = np.einsum("ik,...k->...i", inv, x)
    idx = np.arange(n)
    a[..., idx, idx] = -s
    return a


def assemble_B(x, dmat) -> np.ndarray:
    """Reduced (n-1)x(n-1) matrix B of the system B J' = -c_tot d'
    obtained by eliminating the last flux.

    B_ij = x_i (1/D_in - 1/D_ij) for i != j and
    B_ii = x_i / D_in + sum_{k != i} x_k / D_ik, with x_n = 1 - sum x_m.
    """
    x = _as_x(x)
    inv = _inverse_diffusivities(dmat)
    n = inv.shape[0]
    m = n - 1
    col_n = inv[:m, n - 1]
    b = x[..., :m, None] * (col_n[:, None] - inv[:m, :m])
    s = np.einsum("ik,...k->...i", inv, x)[..., :m]
    idx = np.arange(m)
    b[..., idx, idx] = x[..., :m] * col_n + s
    return b


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalues of A (descending), the gap bound delta, and whether
    the spectral inclusion sigma(A) in (-inf, -delta] u {0} holds."""
    eigenvalues: np.ndarray
    delta: float
    gap_ok: bool


def spectral_gap_delta(dmat) -> float:
    """delta = min_{i != j} 1 / D_ij."""
    d = np.asarray(dmat, dtype=float)
    off = ~np.eye(d.shape[0], dtype=bool)
    return float(1.0 / d[off].max())


def spectrum(x, dmat) -> SpectrumReport:
    """Eigenvalues of A via the symmetric similar matrix A_S."""
    a_sym = assemble_A_sym(x, dmat)
    try:
        w = np.linalg.eigvalsh(a_sym)
    except np.linalg.LinAlgError as exc:
        raise EigSolverFailure(str(exc)) from exc
    w = w[::-1]  # descending
    delta = spectral_gap_delta(dmat)
    norm = float(np.linalg.norm(a_sym))
    gap_ok = bool(
        abs(w[0]) <= 1e-10 * norm and w[1] <= -delta * (1.0 - 1e-10))
    w.setflags(write=False)
    return SpectrumReport(eigenvalues=w, delta=delta, gap_ok=gap_ok)


def _fluxes_projected(x, dmat, d, c_tot) -> np.ndarray:
    """Batched solve of A J = c_tot d by projection onto the zero-sum
    subspace.  ``x``/``d`` shaped (..., n); ``c_tot`` scalar or (...)."""
    n = x.shape[-1]
    p = simplex_basis(n)
    a = assemble_A(x, dmat)
    k = p.T @ a @ p
    rhs = (np.asarray(c_tot)[..., None] * d) @ p
    y = np.linalg.solve(k, rhs[..., None])[..., 0]
    return y @ p.T


def _fluxes_reduced(x, dmat, d, c_tot) -> np.ndarray:
    """Batched solve via the reduced B system; last flux from the
    zero-sum constraint."""
    b = assemble_B(x, dmat)
    rhs = -(np.asarray(c_tot)[..., None] * d)[..., :-1]
    jr = np.linalg.solve(b, rhs[..., None])[..., 0]
    jn = -jr.sum(axis=-1, keepdims=True)
    return np.concatenate([jr, jn], axis=-1)


def _as_d(d) -> np.ndarray:
    if isinstance(d, DrivingForce):
        return d.d
    return np.asarray(d, dtype=float)


def solve_fluxes_invariant(comp: Composition, dmat, d) -> FluxSet:
    """Fluxes from A J = c_tot d, solved on the zero-sum subspace.

    Verifies the residual of the singular system before returning.
    """
    x = floor_composition(comp)
    dv = _as_d(d)
    j = _fluxes_projected(x, dmat, dv, comp.c_tot)
    a = assemble_A(x, dmat)
    resid = np.linalg.norm(a @ j - comp.c_tot * dv)
    scale = np.linalg.norm(a) * np.linalg.norm(j) + comp.c_tot * np.linalg.norm(dv)
    if scale > 0 and resid > 1e-10 * scale:
        raise SingularSystem(f"projected solve residual {resid!r} (scale {scale!r})")
    return FluxSet(J=project_zero_sum(j))


def solve_fluxes_reduced(comp: Composition, dmat, d) -> FluxSet:
    """Fluxes from the reduced system B J' = -c_tot d' by dense LU with
    partial pivoting; the last flux closes the zero sum."""
    x = _as_x(comp)
    dv = _as_d(d)
    b = assemble_B(x, dmat)
    try:
        lu, piv = scipy.linalg.lu_factor(b)
    except scipy.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    if np.min(np.abs(np.diag(lu))) < 1e-14 * np.linalg.norm(b):
        raise SingularSystem("vanishing pivot in reduced-system LU")
    jr = scipy.linalg.lu_solve((lu, piv), -comp.c_tot * dv[:-1])
    return FluxSet(J=np.append(jr, -jr.sum()))


def solve_fluxes_bordered(comp: Composition, dmat, d, mu: float | None = None) -> FluxSet:
    """Test-oracle route: solve (A - mu x (x) e) J = c_tot d, which is
    invertible for 0 < mu < delta.  Default mu = delta / 2."""
    x = floor_composition(comp)
    dv = _as_d(d)
    if mu is None:
        mu = 0.5 * spectral_gap_delta(dmat)
    a_mu = assemble_A(x, dmat) - mu * np.outer(x, np.ones_like(x))
    try:
        j = np.linalg.solve(a_mu, comp.c_tot * dv)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    return FluxSet(J=project_zero_sum(j))


def fick_limit_D(x, dmat, i: int) -> float:
    """Effective Fickian diffusivity D_i = 1 / sum_{j != i} x_j / D_ij.

    This is the coefficient of -grad c_i in the flux split
    J_i = -D_i grad c_i + c_i F_i; cross-effects vanish as x_i -> 0.
    """
    x = _as_x(x)
    inv = _inverse_diffusivities(dmat)
    s = float(inv[i] @ x)
    if s == 0.0:
        raise DegenerateComposition(f"x[{i}] = 1: no partner species for diffusion")
    return 1.0 / s


def _diffusion_matrix_reduced(x, dmat, model: ThermoModel) -> np.ndarray:
    """Reduced representation of the effective diffusion operator on the
    zero-sum subspace: M = -(P^T A P)^{-1} (P^T Gamma P).

    The operator maps a concentration-gradient direction v in E to
    -J(v), where J solves A J = Gamma v (the c_tot factors cancel).
    Batched over leading axes of ``x``.
    """
    n = x.shape[-1]
    p = simplex_basis(n)
    a = assemble_A(x, dmat)
    g = gamma_matrix(model, floor_composition(x))
    k = p.T @ a @ p
    r = p.T @ g @ p
    return -np.linalg.solve(k, r)


def diffusion_operator_spectrum(x, dmat, model: ThermoModel,
                                require_convex: bool = True) -> np.ndarray:
    """Eigenvalues (descending by real part) of the effective diffusion
    operator restricted to the zero-sum subspace.

    Positive eigenvalues certify normal ellipticity, i.e. parabolicity
    of the species equations at this state.  With ``require_convex`` the
    strong-convexity certificate is checked first and ``NotConvex`` is
    raised when it fails.
    """
    x = floor_composition(x)
    lam = convexity_check(model, x)
    if require_convex and lam <= 0:
        raise NotConvex(f"Gibbs energy not strongly convex: lambda_min = {lam!r}")
    m = _diffusion_matrix_reduced(x, dmat, model)
    w = np.linalg.eigvals(m)
    w = w[np.argsort(-w.real)]
    if np.max(np.abs(w.imag)) <= 1e-10 * max(np.max(np.abs(w.real)), 1e-300):
        w = w.real
    return w
