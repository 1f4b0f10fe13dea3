"""
Trotter Module for Trotter Error Statistics Toolkit

This module provides product formulas (PF1, PF2 and the Suzuki recursion), their
application to statevectors, leading-error operators and true one-step and
long-time errors.

Stage lists are written in operator-product order, leftmost factor first, so
PF1 is U_1(dt) = e^{-iH_1 dt} e^{-iH_2 dt} ... and the last stage acts on the
state first. With this order U_0 - U_1 = (1/2)[A, B] dt^2 + O(dt^3).
"""

from dataclasses import dataclass
from math import factorial
from typing import List, Optional, Sequence, Tuple

import numpy as np

from utils.hamiltonian import HamiltonianSpec, evolve_array
from utils.logger import get_logger
from utils.pauli import PauliOperator, add, commutator, op_mul, scale
from utils.statevector import StateVector, apply_operator, pauli_action

logger = get_logger("trotter")

CONVENTIONS = ("half", "full")
_CANCELLATION_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ProductFormula:
    """Ordered stages (group index, coefficient) defining prod_k e^{-i c_k H_{l_k} dt}."""

    order: int
    n_groups: int
    stages: Tuple[Tuple[int, float], ...]

    def __post_init__(self):
        object.__setattr__(self, 'stages', tuple((int(g), float(c)) for g, c in self.stages))
        for group, _ in self.stages:
            if not 0 <= group < self.n_groups:
                raise ValueError(f"stage group {group} outside 0..{self.n_groups - 1}")
        sums = self.group_sums()
        if not np.allclose(sums, 1.0, atol=1e-12):
            raise ValueError(f"stage coefficients per group must sum to 1, got {sums}")

    def group_sums(self) -> np.ndarray:
        sums = np.zeros(self.n_groups)
        for group, coeff in self.stages:
            sums[group] += coeff
        return sums

    def is_palindromic(self, tol: float = 1e-12) -> bool:
        for (g1, c1), (g2, c2) in zip(self.stages, reversed(self.stages)):
            if g1 != g2 or abs(c1 - c2) > tol:
                return False
        return True

    def scaled(self, factor: float) -> List[Tuple[int, float]]:
        return [(g, c * factor) for g, c in self.stages]

    def describe(self) -> str:
        return f"PF{self.order} ({len(self.stages)} stages over {self.n_groups} groups)"


def _merge(stages: Sequence[Tuple[int, float]]) -> Tuple[Tuple[int, float], ...]:
    merged: List[Tuple[int, float]] = []
    for group, coeff in stages:
        if merged and merged[-1][0] == group:
            merged[-1] = (group, merged[-1][1] + coeff)
        else:
            merged.append((group, coeff))
    return tuple(merged)


def pf1(n_groups: int = 2) -> ProductFormula:
    return ProductFormula(1, n_groups, tuple((g, 1.0) for g in range(n_groups)))


def pf2(n_groups: int = 2) -> ProductFormula:
    forward = [(g, 0.5) for g in range(n_groups)]
    return ProductFormula(2, n_groups, _merge(forward + forward[::-1]))


def suzuki_coefficient(order: int) -> float:
    """u_k = 1 / (4 - 4^{1/(2k-1)}) for order 2k."""
    return 1.0 / (4.0 - 4.0 ** (1.0 / (order - 1)))


def suzuki_recursion(order: int, n_groups: int = 2) -> ProductFormula:
    """
    Suzuki product formula of the given order.

    S_2k(dt) = S_{2k-2}(u dt)^2 S_{2k-2}((1 - 4u) dt) S_{2k-2}(u dt)^2

    Args:
        order (int): 1 or an even order >= 2
        n_groups (int): Number of partition groups

    Returns:
        ProductFormula: Stage list with adjacent equal groups merged
    """
    if order == 1:
        return pf1(n_groups)
    if order < 1 or order % 2:
        raise ValueError(f"product formula order must be 1 or even, got {order}")
    if order == 2:
        return pf2(n_groups)
    inner = suzuki_recursion(order - 2, n_groups)
    u = suzuki_coefficient(order)
    outer = inner.scaled(u) * 2
    stages = outer + inner.scaled(1.0 - 4.0 * u) + outer
    return ProductFormula(order, n_groups, _merge(stages))


def product_formula(order: int, n_groups: int = 2) -> ProductFormula:
    return suzuki_recursion(order, n_groups)


def _check_formula(hamiltonian: HamiltonianSpec, pf: ProductFormula) -> None:
    if pf.n_groups != hamiltonian.n_groups:
        raise ValueError(f"formula has {pf.n_groups} groups, Hamiltonian has {hamiltonian.n_groups}")


def _exp_group(amplitudes: np.ndarray, group: PauliOperator, tau: float) -> np.ndarray:
    # Terms inside a group commute, so each exponential is applied separately
    out = amplitudes
    for x, z, coeff in zip(group.xs, group.zs, group.coeffs):
        theta = coeff.real * tau
        out = np.cos(theta) * out - 1j * np.sin(theta) * pauli_action(out, int(x), int(z))
    return out


def pf_array(amplitudes: np.ndarray, hamiltonian: HamiltonianSpec, pf: ProductFormula,
             dt: float) -> np.ndarray:
    """U_p(dt) applied along axis 0 of an array."""
    _check_formula(hamiltonian, pf)
    out = np.asarray(amplitudes, dtype=np.complex128)
    for group, coeff in reversed(pf.stages):
        out = _exp_group(out, hamiltonian.partition[group], coeff * dt)
    return out


def pf_step(psi: StateVector, hamiltonian: HamiltonianSpec, pf: ProductFormula,
            dt: float) -> StateVector:
    """
    One product-formula step U_p(dt)|psi>.

    Args:
        psi (StateVector): Input state
        hamiltonian (HamiltonianSpec): Partitioned Hamiltonian
        pf (ProductFormula): Formula to apply
        dt (float): Step size

    Returns:
        StateVector: Evolved state
    """
    if psi.n_qubits != hamiltonian.n_qubits:
        raise ValueError(f"qubit count mismatch: {psi.n_qubits} vs {hamiltonian.n_qubits}")
    return StateVector(psi.n_qubits, pf_array(psi.amplitudes, hamiltonian, pf, dt), check_norm=False)


def pf_unitary(hamiltonian: HamiltonianSpec, pf: ProductFormula, dt: float) -> np.ndarray:
    """Dense U_p(dt)."""
    return pf_array(np.eye(hamiltonian.dim, dtype=np.complex128), hamiltonian, pf, dt)


def leading_error_pf1(hamiltonian: HamiltonianSpec, convention: str = "half") -> PauliOperator:
    """
    Leading PF1 error operator.

    Args:
        hamiltonian (HamiltonianSpec): Two-group Hamiltonian [A, B]
        convention (str): 'half' gives (1/2)[A, B]; 'full' gives [A, B]

    Returns:
        PauliOperator: E with U_0 - U_1 = E dt^2 + O(dt^3) in the half convention
    """
    if hamiltonian.n_groups != 2:
        raise ValueError(f"PF1 leading error needs exactly 2 groups, got {hamiltonian.n_groups}")
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    group_a, group_b = hamiltonian.partition
    bracket = commutator(group_a, group_b)
    return scale(bracket, 0.5) if convention == "half" else bracket


def _series_mul(left: List[PauliOperator], right: List[PauliOperator], order: int) -> List[PauliOperator]:
    n = left[0].n_qubits
    out = []
    for k in range(order + 1):
        acc = PauliOperator.zero(n)
        for i in range(k + 1):
            if not left[i].is_zero() and not right[k - i].is_zero():
                acc = add(acc, op_mul(left[i], right[k - i]))
        out.append(acc)
    return out


def _exp_series(op: PauliOperator, coeff: float, order: int) -> List[PauliOperator]:
    """Taylor coefficients of e^{-i coeff op dt} in powers of dt."""
    n = op.n_qubits
    series = [PauliOperator.identity(n)]
    power = PauliOperator.identity(n)
    for k in range(1, order + 1):
        power = op_mul(power, op)
        series.append(scale(power, (-1j * coeff) ** k / factorial(k)))
    return series


def leading_error(hamiltonian: HamiltonianSpec, pf: ProductFormula) -> PauliOperator:
    """
    Coefficient of dt^{p+1} in U_0(dt) - U_p(dt), extracted by truncated Taylor series.

    Args:
        hamiltonian (HamiltonianSpec): Partitioned Hamiltonian
        pf (ProductFormula): Formula of order p

    Returns:
        PauliOperator: The leading error operator E

    Raises:
        ValueError: If the orders below p+1 do not cancel
    """
    _check_formula(hamiltonian, pf)
    top = pf.order + 1
    exact = _exp_series(hamiltonian.total, 1.0, top)
    approx = [PauliOperator.identity(hamiltonian.n_qubits)] + \
        [PauliOperator.zero(hamiltonian.n_qubits)] * top
    for group, coeff in pf.stages:
        approx = _series_mul(approx, _exp_series(hamiltonian.partition[group], coeff, top), top)
    scale_ref = max(1.0, float(np.max(np.abs(hamiltonian.total.coeffs)))) ** top
    for k in range(1, top):
        residual = add(exact[k], scale(approx[k], -1.0))
        if len(residual) and np.max(np.abs(residual.coeffs)) > _CANCELLATION_TOLERANCE * scale_ref:
            raise ValueError(f"order {k} does not cancel; the formula is not of order {pf.order}")
    error = add(exact[top], scale(approx[top], -1.0))
    logger.debug(f"Leading error for {pf.describe()} has {len(error)} terms")
    return error


def error_operator(hamiltonian: HamiltonianSpec, pf: ProductFormula,
                   convention: str = "half") -> PauliOperator:
    """Leading error of any formula; the 'full' convention doubles the PF1 operator."""
    if pf.order == 1 and hamiltonian.n_groups == 2:
        return leading_error_pf1(hamiltonian, convention)
    return leading_error(hamiltonian, pf)


def convention_scale(hamiltonian: HamiltonianSpec, pf: ProductFormula, convention: str = "half") -> float:
    """Factor by which error_operator exceeds the physical leading error U_0 - U_p."""
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    if convention == "full" and pf.order == 1 and hamiltonian.n_groups == 2:
        return 2.0
    return 1.0


def s_e(psi: StateVector, error: PauliOperator) -> float:
    """State-specific leading error ||E|psi>||^2."""
    vector = apply_operator(psi, error)
    return float(np.vdot(vector, vector).real)


def true_error_one_step(psi: StateVector, hamiltonian: HamiltonianSpec, pf: ProductFormula,
                        dt: float) -> float:
    """||(U_0(dt) - U_p(dt))|psi>||."""
    exact = evolve_array(psi.amplitudes, hamiltonian, dt)
    approx = pf_array(psi.amplitudes, hamiltonian, pf, dt)
    return float(np.linalg.norm(exact - approx))


def true_error_long(psi: StateVector, hamiltonian: HamiltonianSpec, pf: ProductFormula,
                    dt: float, r: int) -> float:
    """
    ||(U_p(dt)^r - U_0(r dt))|psi>||.

    Args:
        psi (StateVector): Initial state
        hamiltonian (HamiltonianSpec): Partitioned Hamiltonian
        pf (ProductFormula): Formula
        dt (float): Step size
        r (int): Number of steps, at least 1

    Returns:
        float: Long-time error norm
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    approx = psi.amplitudes
    for _ in range(r):
        approx = pf_array(approx, hamiltonian, pf, dt)
    exact = evolve_array(psi.amplitudes, hamiltonian, r * dt)
    return float(np.linalg.norm(approx - exact))


def triangle_error_sum(psi: StateVector, hamiltonian: HamiltonianSpec, pf: ProductFormula,
                       dt: float, r: int, per_step: Optional[List[float]] = None) -> float:
    """
    Triangle-inequality sum e_r = sum_k ||(U_p - U_0) U_p^k |psi>||, an upper bound on true_error_long.

    Args:
        per_step (Optional[List[float]]): When given, receives every step term
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    current = psi.amplitudes
    total = 0.0
    for _ in range(r):
        stepped = pf_array(current, hamiltonian, pf, dt)
        term = float(np.linalg.norm(stepped - evolve_array(current, hamiltonian, dt)))
        if per_step is not None:
            per_step.append(term)
        total += term
        current = stepped
    return total
