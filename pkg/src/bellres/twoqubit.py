"""Two-qubit resource minimization for Bell-diagonal operators.

Closed forms (entanglement robustness 2*lam1 - 1 of Bell-diagonal states, the
CHSH spectrum as a function of the incompatibility C, the steering analogue)
plus interior-point PPT / incoherence solvers used as independent verifiers
and for the three-setting experiment where the closed forms do not apply.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import barrier
from .barrier import ConeConstraint, hermitian_basis, hermitian_from_params, params_from_hermitian
from .bounds import min_lambda1_for_value
from .errors import Infeasible, NotBellDiagonal, OutOfRange, SolverFailure
from .linalg import DensityState, density_state, eig_hermitian, partial_transpose

_B = (1.0 / np.sqrt(2.0)) * np.array(
    [
        [1, 0, 0, 1],  # Phi+
        [1, 0, 0, -1],  # Phi-
        [0, 1, 1, 0],  # Psi+
        [0, 1, -1, 0],  # Psi-
    ],
    dtype=complex,
).T  # columns are the Bell vectors

BELL_LABELS = ("Phi+", "Phi-", "Psi+", "Psi-")

# closest-separable-state product bases for each rank-2 Bell-vector pair
_COHERENCE_BASIS_TABLE = {
    frozenset({"Phi+", "Phi-"}): "z-product",
    frozenset({"Phi+", "Psi+"}): "x-product",
    frozenset({"Phi+", "Psi-"}): "y-product",
    frozenset({"Phi-", "Psi+"}): "y-product",
    frozenset({"Phi-", "Psi-"}): "x-product",
    frozenset({"Psi+", "Psi-"}): "z-product",
}


@dataclass(frozen=True)
class BdsState:
    """Bell-diagonal state: descending weights on a maximally entangled basis."""

    lambdas: np.ndarray
    basis_perm: tuple[int, ...] = (0, 1, 2, 3)

    @property
    def entangled(self) -> bool:
        return self.lambdas[0] > 0.5

    def matrix(self) -> np.ndarray:
        cols = _B[:, list(self.basis_perm)]
        return (cols * self.lambdas) @ cols.conj().T


_REPORT_LOG: list["ResourceReport"] = []


@dataclass(frozen=True)
class ResourceReport:
    """Per-state robustness bundle with the witnessing states."""

    p_r: float
    c_r: float
    d_r: float
    e_r: float
    witness_state: DensityState
    void_state: DensityState
    coherence_basis: str

    def __post_init__(self):
        if not (
            self.p_r >= self.c_r - 1e-9
            and self.c_r >= self.d_r - 1e-9
            and self.d_r >= self.e_r - 1e-9
        ):
            raise ValueError(
                f"resource hierarchy violated: P_R={self.p_r} C_R={self.c_r} "
                f"D_R={self.d_r} E_R={self.e_r}"
            )
        _REPORT_LOG.append(self)


def emitted_reports() -> list[ResourceReport]:
    """All ResourceReports constructed during this process (hierarchy audit)."""
    return list(_REPORT_LOG)


def _reduced_traces(vec: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m = vec.reshape(2, 2)
    return m @ m.conj().T, m.T @ m.conj()


def is_bell_diagonal(op, *, tol: float = 1e-8) -> tuple[bool, "Spectrum"]:
    """Whether a 4x4 Hermitian operator is diagonal in a maximally entangled basis.

    Non-degenerate eigenvectors are tested directly for maximally mixed
    marginals.  Degenerate eigenspaces admit arbitrary vector choices, so for
    those the equivalent operator-level criterion is used: both partial
    traces of the full operator must be proportional to the identity.
    """
    from .linalg import Spectrum  # local import to avoid cycle in annotations

    spec = eig_hermitian(op)
    if spec.dim != 4:
        raise OutOfRange("Bell-diagonality test is defined for 4x4 operators")
    vals = spec.values
    scale = 1.0 + np.abs(vals).max()
    eye = np.eye(2) / 2.0
    degenerate = False
    for j in range(4):
        cluster = np.abs(vals - vals[j]) <= 1e-9 * scale
        if cluster.sum() > 1:
            degenerate = True
            continue
        ra, rb = _reduced_traces(spec.vectors[:, j])
        if np.abs(ra - eye).max() > tol or np.abs(rb - eye).max() > tol:
            return False, spec
    if degenerate:
        m = np.asarray(op, dtype=complex)
        t = m.reshape(2, 2, 2, 2)
        tr_b = np.einsum("ajbj->ab", t)
        tr_a = np.einsum("iaib->ab", t)
        half = np.trace(m).real / 2.0
        if (
            np.abs(tr_b - half * np.eye(2)).max() > tol * scale
            or np.abs(tr_a - half * np.eye(2)).max() > tol * scale
        ):
            return False, spec
    return True, spec


def _product_basis_label(v1: np.ndarray, v2: np.ndarray) -> str:
    """Match the top-two eigenvectors against the standard Bell pairs."""
    names = []
    for v in (v1, v2):
        overlaps = np.abs(_B.conj().T @ v)
        k = int(np.argmax(overlaps))
        if overlaps[k] < 1.0 - 1e-8:
            return "lu-equivalent-product"
        names.append(BELL_LABELS[k])
    key = frozenset(names)
    return _COHERENCE_BASIS_TABLE.get(key, "lu-equivalent-product")


def min_resources_for_value(op, local_bound: float, v: float) -> ResourceReport:
    """Simultaneous minimizer of P_R, C_R, D_R, E_R for Bell-diagonal operators.

    Valid for Bell-diagonal operators: the optimal state is the rank-2
    mixture of the two top eigenvectors with lam1 fixed by the Bell value,
    and all four robustnesses are monotone functions of lam1 alone.
    """
    if v <= 0:
        raise OutOfRange(f"violation must be positive, got {v}")
    flag, spec = is_bell_diagonal(op)
    if not flag:
        raise NotBellDiagonal("operator is not diagonal in a maximally entangled basis")
    mu = spec.values
    target = local_bound + v
    if target > mu[0] + 1e-12:
        raise Infeasible(f"target {target} exceeds the top eigenvalue {mu[0]}")
    sol = min_lambda1_for_value(mu, target, 4)
    lam1 = float(sol.lambdas[0])
    v1 = spec.vectors[:, 0]
    v2 = spec.vectors[:, 1]
    rho = lam1 * np.outer(v1, v1.conj()) + (1 - lam1) * np.outer(v2, v2.conj())
    xi = 0.5 * (np.outer(v1, v1.conj()) + np.outer(v2, v2.conj()))
    e_r = max(0.0, 2.0 * lam1 - 1.0)
    return ResourceReport(
        p_r=4.0 * lam1 - 1.0,
        c_r=e_r,
        d_r=e_r,
        e_r=e_r,
        witness_state=density_state(rho, (2, 2)),
        void_state=density_state(xi, (2, 2)),
        coherence_basis=_product_basis_label(v1, v2),
    )


def chsh_eigenvalues(c: float) -> np.ndarray:
    """CHSH operator spectrum (+sqrt(4+C), +sqrt(4-C), -sqrt(4-C), -sqrt(4+C))."""
    if not 0.0 <= c <= 4.0:
        raise OutOfRange(f"C must lie in [0, 4], got {c}")
    hi, lo = np.sqrt(4.0 + c), np.sqrt(4.0 - c)
    return np.array([hi, lo, -lo, -hi])


def chsh_max_value(lambda1: float, c: float) -> float:
    """Maximal CHSH value sqrt(4+C)*lam1 + sqrt(4-C)*(1-lam1)."""
    if not 0.5 <= lambda1 <= 1.0:
        raise OutOfRange(f"lambda1 must lie in [1/2, 1], got {lambda1}")
    mu = chsh_eigenvalues(c)
    return float(mu[0] * lambda1 + mu[1] * (1.0 - lambda1))


def c_max(lambda1: float) -> float:
    """Incompatibility maximizing the CHSH value at fixed lam1."""
    if not 0.5 <= lambda1 <= 1.0:
        raise OutOfRange(f"lambda1 must lie in [1/2, 1], got {lambda1}")
    return 4.0 * (2.0 * lambda1 - 1.0) / (2.0 * lambda1**2 - 2.0 * lambda1 + 1.0)


@dataclass(frozen=True)
class CurvePoint:
    x: float
    lambda1: float
    e_r: float
    p_r: float
    feasible: bool


def _rank2_lambda1(mu1: float, mu2: float, target: float) -> float:
    return (target - mu2) / (mu1 - mu2)


def min_er_vs_c_curve(v: float, c_grid) -> list[CurvePoint]:
    """Minimal entanglement robustness versus CHSH incompatibility at violation v."""
    if v <= 0:
        raise OutOfRange(f"violation must be positive, got {v}")
    target = 2.0 + v
    points = []
    for c in np.asarray(c_grid, dtype=float):
        mu = chsh_eigenvalues(c)
        if target > mu[0] + 1e-12:
            points.append(CurvePoint(float(c), np.nan, np.nan, np.nan, False))
            continue
        lam1 = min(1.0, _rank2_lambda1(mu[0], mu[1], target))
        points.append(
            CurvePoint(float(c), lam1, 2.0 * lam1 - 1.0, 4.0 * lam1 - 1.0, True)
        )
    return points


def steering_eigenvalues(c_a: float) -> np.ndarray:
    """F2 steering operator spectrum (+sqrt(2+C_A), ..., -sqrt(2+C_A))."""
    if not 0.0 <= c_a <= 2.0:
        raise OutOfRange(f"C_A must lie in [0, 2], got {c_a}")
    hi, lo = np.sqrt(2.0 + c_a), np.sqrt(2.0 - c_a)
    return np.array([hi, lo, -lo, -hi])


def min_er_vs_ca_curve(v: float, ca_grid) -> list[CurvePoint]:
    """Steering analogue of the CHSH curve; local bound sqrt(2)."""
    if v <= 0:
        raise OutOfRange(f"violation must be positive, got {v}")
    target = np.sqrt(2.0) + v
    points = []
    for c_a in np.asarray(ca_grid, dtype=float):
        mu = steering_eigenvalues(c_a)
        if target > mu[0] + 1e-12:
            points.append(CurvePoint(float(c_a), np.nan, np.nan, np.nan, False))
            continue
        lam1 = min(1.0, _rank2_lambda1(mu[0], mu[1], target))
        points.append(
            CurvePoint(float(c_a), lam1, 2.0 * lam1 - 1.0, 4.0 * lam1 - 1.0, True)
        )
    return points


def heatmap_eigenvalues(c_a: float, c_b: float) -> np.ndarray:
    """Spectrum from the additive-quantifier expression; equals +/-sqrt(4 +/- C_A C_B)."""
    cross = ((c_a + c_b) ** 2 - c_a**2 - c_b**2) / 2.0
    hi, lo = np.sqrt(4.0 + cross), np.sqrt(4.0 - cross)
    return np.array([hi, lo, -lo, -hi])


def lambda1_heatmap(v: float, ca_grid, cb_grid) -> list[list[CurvePoint]]:
    """Necessary lam1 over an (C_A, C_B) incompatibility grid."""
    if v <= 0:
        raise OutOfRange(f"violation must be positive, got {v}")
    target = 2.0 + v
    rows = []
    for c_a in np.asarray(ca_grid, dtype=float):
        row = []
        for c_b in np.asarray(cb_grid, dtype=float):
            mu = heatmap_eigenvalues(c_a, c_b)
            if target > mu[0] + 1e-12:
                row.append(CurvePoint(float(c_b), np.nan, np.nan, np.nan, False))
            else:
                lam1 = min(1.0, _rank2_lambda1(mu[0], mu[1], target))
                row.append(
                    CurvePoint(float(c_b), lam1, 2.0 * lam1 - 1.0, 4.0 * lam1 - 1.0, True)
                )
        rows.append(row)
    return rows


_H4 = hermitian_basis(4)
_H4_PT = np.array([partial_transpose(m, 1) for m in _H4])
_TRACE_H4 = np.einsum("kii->k", _H4).real


def er_ppt_solver(rho: DensityState, *, gap_tol: float = 1e-9) -> float:
    """Generalized robustness of entanglement of a two-qubit state via PPT.

    Solves min Tr(sigma) s.t. sigma >= 0 and (rho + sigma)^{T_B} >= 0 with the
    log-barrier solver; for 2x2 systems PPT is exact separability.
    """
    m = rho.matrix if isinstance(rho, DensityState) else np.asarray(rho, dtype=complex)
    cones = [
        ConeConstraint(a0=np.zeros((4, 4), dtype=complex), basis=_H4),
        ConeConstraint(a0=partial_transpose(m, 1), basis=_H4_PT),
    ]
    x0 = params_from_hermitian(np.eye(4, dtype=complex), _H4)
    x, value = barrier.solve_sdp(_TRACE_H4, cones, x0, gap_tol=gap_tol)
    return max(0.0, float(value))


def er_min_for_value(op, target: float, *, gap_tol: float = 1e-9) -> tuple[float, DensityState]:
    """Minimal entanglement robustness over all states with Tr(rho I) = target.

    Joint SDP over (rho, sigma): min Tr(sigma) s.t. rho >= 0, Tr(rho) = 1,
    Tr(rho I) = target, sigma >= 0, (rho + sigma)^{T_B} >= 0.
    """
    m = np.asarray(op, dtype=complex)
    spec = eig_hermitian(m)
    mu = spec.values
    mean = float(mu.mean())
    if not mean - 1e-12 <= target < mu[0] - 1e-12:
        raise Infeasible(f"target {target} outside [Tr(I)/d, mu1) = [{mean}, {mu[0]})")
    n = len(_H4)
    zeros = np.zeros((4, 4), dtype=complex)
    pad = np.zeros_like(_H4)
    # x = (rho params, sigma params)
    rho_basis = np.concatenate([_H4, pad])
    sigma_basis = np.concatenate([pad, _H4])
    ppt_basis = np.concatenate([_H4_PT, _H4_PT])
    cones = [
        ConeConstraint(a0=zeros, basis=rho_basis),
        ConeConstraint(a0=zeros, basis=sigma_basis),
        ConeConstraint(a0=zeros, basis=ppt_basis),
    ]
    c = np.concatenate([np.zeros(n), _TRACE_H4])
    bell = np.einsum("kij,ji->k", _H4, m).real
    a_eq = np.stack([np.concatenate([_TRACE_H4, np.zeros(n)]), np.concatenate([bell, np.zeros(n)])])
    b_eq = np.array([1.0, target])
    # strictly feasible start: Gibbs-like mixture hitting the target, sigma = 1
    t_mix = (target - mean) / (mu[0] - mean)
    v1 = spec.vectors[:, 0]
    rho0 = t_mix * np.outer(v1, v1.conj()) + (1.0 - t_mix) * np.eye(4) / 4.0
    x0 = np.concatenate(
        [params_from_hermitian(rho0, _H4), params_from_hermitian(np.eye(4, dtype=complex), _H4)]
    )
    c_z, cones_z, z0, x_off, null = barrier.eliminate_equalities(c, cones, a_eq, b_eq, x0)
    z, _ = barrier.solve_sdp(c_z, cones_z, z0, gap_tol=gap_tol)
    x = x_off + null @ z
    rho = hermitian_from_params(x[:n], _H4)
    value = float(c @ x)
    return max(0.0, value), density_state(rho, (2, 2), tol=1e-7)


_PRODUCT_EIGS = {
    "z-product": np.eye(2, dtype=complex),
    "x-product": (1.0 / np.sqrt(2.0)) * np.array([[1, 1], [1, -1]], dtype=complex),
    "y-product": (1.0 / np.sqrt(2.0)) * np.array([[1, 1], [1j, -1j]], dtype=complex),
}


def product_basis_matrix(label_or_angles) -> np.ndarray:
    """4x4 unitary whose columns form a product basis.

    Accepts one of the named Pauli product bases or six Euler angles
    (alpha, beta, gamma) per qubit defining local SU(2) rotations of the
    computational basis.
    """
    if isinstance(label_or_angles, str):
        u = _PRODUCT_EIGS[label_or_angles]
        return np.kron(u, u)
    angles = np.asarray(label_or_angles, dtype=float)
    return np.kron(_su2(*angles[:3]), _su2(*angles[3:]))


def _su2(alpha: float, beta: float, gamma: float) -> np.ndarray:
    rz1 = np.diag([np.exp(-0.5j * alpha), np.exp(0.5j * alpha)])
    ry = np.array(
        [[np.cos(beta / 2), -np.sin(beta / 2)], [np.sin(beta / 2), np.cos(beta / 2)]]
    )
    rz2 = np.diag([np.exp(-0.5j * gamma), np.exp(0.5j * gamma)])
    return rz1 @ ry @ rz2


def cr_fixed_basis(rho, basis: np.ndarray, *, gap_tol: float = 1e-9) -> float:
    """Generalized robustness of coherence in a fixed orthonormal product basis.

    Equivalent program: min Tr(D) - 1 over D diagonal in the basis with
    D >= rho.
    """
    m = rho.matrix if isinstance(rho, DensityState) else np.asarray(rho, dtype=complex)
    d = m.shape[0]
    u = np.asarray(basis, dtype=complex)
    if np.abs(u.conj().T @ u - np.eye(d)).max() > 1e-10:
        raise ValueError("basis columns must be orthonormal")
    rot = u.conj().T @ m @ u
    diag_basis = np.array([np.diag(row) for row in np.eye(d, dtype=complex)])
    cones = [ConeConstraint(a0=-rot, basis=diag_basis)]
    x0 = np.real(np.diag(rot)) + 1.0
    x, value = barrier.solve_sdp(np.ones(d), cones, x0, gap_tol=gap_tol)
    return max(0.0, float(value) - 1.0)


def cr_min_for_value(op, target: float, basis: np.ndarray, *, gap_tol: float = 1e-8) -> float:
    """Minimal coherence robustness (fixed basis) over states with Tr(rho I) = target."""
    m = np.asarray(op, dtype=complex)
    u = np.asarray(basis, dtype=complex)
    rot_op = u.conj().T @ m @ u  # work in the rotated frame
    spec = eig_hermitian(rot_op)
    mu = spec.values
    mean = float(mu.mean())
    if not mean - 1e-12 <= target < mu[0] - 1e-12:
        raise Infeasible(f"target {target} outside [Tr(I)/d, mu1)")
    n = len(_H4)
    diag_basis = np.array([np.diag(row) for row in np.eye(4, dtype=complex)])
    pad_rho = np.zeros((4, 4, 4), dtype=complex)
    pad_d = np.zeros_like(_H4)
    rho_basis = np.concatenate([_H4, pad_rho])
    gap_basis = np.concatenate([-_H4, diag_basis])
    zeros = np.zeros((4, 4), dtype=complex)
    cones = [
        ConeConstraint(a0=zeros, basis=rho_basis),
        ConeConstraint(a0=zeros, basis=gap_basis),
    ]
    c = np.concatenate([np.zeros(n), np.ones(4)])
    bell = np.einsum("kij,ji->k", _H4, rot_op).real
    a_eq = np.stack(
        [np.concatenate([_TRACE_H4, np.zeros(4)]), np.concatenate([bell, np.zeros(4)])]
    )
    b_eq = np.array([1.0, target])
    t_mix = (target - mean) / (mu[0] - mean)
    v1 = spec.vectors[:, 0]
    rho0 = t_mix * np.outer(v1, v1.conj()) + (1.0 - t_mix) * np.eye(4) / 4.0
    x0 = np.concatenate([params_from_hermitian(rho0, _H4), np.real(np.diag(rho0)) + 1.0])
    c_z, cones_z, z0, x_off, null = barrier.eliminate_equalities(c, cones, a_eq, b_eq, x0)
    z, _ = barrier.solve_sdp(c_z, cones_z, z0, gap_tol=gap_tol)
    x = x_off + null @ z
    return max(0.0, float(c @ x) - 1.0)


def cr_min_over_product_bases(
    rho, *, restarts: int = 32, seed: int | None = None, target_op=None, target: float | None = None
) -> tuple[float, np.ndarray]:
    """Best-effort minimization of coherence robustness over all product bases.

    Derivative-free (Nelder-Mead) search over 3+3 local-rotation angles with
    random restarts; returns an upper bound to the true minimum and the best
    basis found.  If target_op/target are given, the state itself is also
    optimized inside each basis (the joint program used for the three-setting
    experiment); otherwise rho is held fixed.
    """
    from scipy.optimize import minimize

    from .oracles import default_rng

    rng = default_rng(seed)

    if target_op is not None:
        if target is None:
            raise ValueError("target value required together with target_op")

        def objective(angles, gap_tol=1e-6):
            try:
                return cr_min_for_value(target_op, target, product_basis_matrix(angles), gap_tol=gap_tol)
            except SolverFailure:
                return np.inf

    else:

        def objective(angles, gap_tol=1e-6):
            try:
                return cr_fixed_basis(rho, product_basis_matrix(angles), gap_tol=gap_tol)
            except SolverFailure:
                return np.inf

    best_val = np.inf
    best_angles = np.zeros(6)
    # cheap wide exploration; accuracy comes from the polish pass below
    for _ in range(restarts):
        x0 = rng.uniform(0.0, 2.0 * np.pi, size=6)
        res = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"xatol": 3e-4, "fatol": 1e-5, "maxfev": 100},
        )
        if res.fun < best_val:
            best_val = float(res.fun)
            best_angles = res.x
    res = minimize(
        lambda a: objective(a, gap_tol=1e-8),
        best_angles,
        method="Nelder-Mead",
        options={"xatol": 1e-7, "fatol": 1e-9, "maxfev": 400},
    )
    if res.fun < best_val:
        best_val = float(res.fun)
        best_angles = res.x
    return best_val, product_basis_matrix(best_angles)
