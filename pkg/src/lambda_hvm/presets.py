"""Named input states with exact matrices.

The simulator accepts explicit density matrices too; these presets make the
acceptance runs reproducible.

qubit "T"        (1 + (X + Y + Z)/sqrt(3)) / 2, the T-type magic state
qubit "H"        (1 + (X + Z)/sqrt(2)) / 2, the H-type magic state
qutrit "strange" |S><S| with |S> = (|1> - |2>)/sqrt(2)
qutrit "norrell" |N><N| with |N> = (-|0> + 2|1> - |2>)/sqrt(6)
any d,n "zero"   |0...0><0...0|
any d,n "mixed"  1/d^n
"""

from __future__ import annotations

from fractions import Fraction

from .cyclotomic import CycNumber, sqrt_int, zeta
from .linalg import CycMatrix
from .pauli import PhasePoint, pauli_matrix

__all__ = ["preset_state", "preset_names"]


def _qubit_t() -> CycMatrix:
    x = pauli_matrix(PhasePoint.unit_x(2, 1))
    z = pauli_matrix(PhasePoint.unit_z(2, 1))
    y = pauli_matrix(PhasePoint(2, 1, (1,), (1,)))
    inv_s3 = sqrt_int(3).inverse()
    return (CycMatrix.identity(2) + (x + y + z).scale(inv_s3)).scale(Fraction(1, 2))


def _qubit_h() -> CycMatrix:
    x = pauli_matrix(PhasePoint.unit_x(2, 1))
    z = pauli_matrix(PhasePoint.unit_z(2, 1))
    inv_s2 = sqrt_int(2).inverse()
    return (CycMatrix.identity(2) + (x + z).scale(inv_s2)).scale(Fraction(1, 2))


def _ket_projector(amplitudes: list[CycNumber], norm: Fraction) -> CycMatrix:
    rows = [[(a * b.conjugate()) * norm for b in amplitudes] for a in amplitudes]
    return CycMatrix(rows)


def _qutrit_strange() -> CycMatrix:
    one = CycNumber.one()
    return _ket_projector([CycNumber.zero(), one, -one], Fraction(1, 2))


def _qutrit_norrell() -> CycMatrix:
    one = CycNumber.one()
    return _ket_projector([-one, 2 * one, -one], Fraction(1, 6))


def preset_names(d: int, n: int) -> list[str]:
    names = ["zero", "mixed"]
    if (d, n) == (2, 1):
        names += ["T", "H"]
    if (d, n) == (3, 1):
        names += ["strange", "norrell"]
    return names


def preset_state(name: str, d: int, n: int) -> CycMatrix:
    """Exact density matrix for a named preset on n qudits of dimension d."""
    dim = d ** n
    if name == "zero":
        rows = [[CycNumber.one() if i == j == 0 else CycNumber.zero() for j in range(dim)]
                for i in range(dim)]
        return CycMatrix(rows)
    if name == "mixed":
        return CycMatrix.identity(dim, Fraction(1, dim))
    if name == "T" and (d, n) == (2, 1):
        return _qubit_t()
    if name == "H" and (d, n) == (2, 1):
        return _qubit_h()
    if name == "strange" and (d, n) == (3, 1):
        return _qutrit_strange()
    if name == "norrell" and (d, n) == (3, 1):
        return _qutrit_norrell()
    raise ValueError(f"unknown preset {name!r} for d={d}, n={n}")
