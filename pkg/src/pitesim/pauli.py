"""Pauli-string algebra in symplectic bit-mask form.

Conventions used throughout the package:

- Qubit 0 is the *rightmost* letter of a printed string ("ZIZI" has Z on
  qubits 1 and 3) and the least significant bit of a statevector index.
- A term is stored as a pair of integer masks (x, z) with the Hermitian
  phase convention  P(x, z) = i^{popcount(x & z)} X^x Z^z,  so Y = iXZ is
  absorbed and Hermitian operators carry real coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

_LETTER_TO_XZ = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_XZ_TO_LETTER = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}

_PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def mask_to_string(x: int, z: int, n: int) -> str:
    """Printable label, qubit 0 rightmost."""
    return "".join(
        _XZ_TO_LETTER[(x >> q) & 1, (z >> q) & 1] for q in reversed(range(n))
    )


def string_to_mask(label: str) -> tuple[int, int]:
    x = z = 0
    for q, letter in enumerate(reversed(label)):
        xb, zb = _LETTER_TO_XZ[letter]
        x |= xb << q
        z |= zb << q
    return x, z


def mul_masks(x1: int, z1: int, x2: int, z2: int) -> tuple[int, int, complex]:
    """Product P(x1,z1)·P(x2,z2) = phase · P(x3,z3) with phase in {1,i,-1,-i}."""
    x3, z3 = x1 ^ x2, z1 ^ z2
    k = (
        (x1 & z1).bit_count()
        + (x2 & z2).bit_count()
        - (x3 & z3).bit_count()
        + 2 * (z1 & x2).bit_count()
    )
    return x3, z3, 1j ** (k % 4)


def masks_commute(x1: int, z1: int, x2: int, z2: int) -> bool:
    """Symplectic product test."""
    return ((x1 & z2).bit_count() + (z1 & x2).bit_count()) % 2 == 0


def mask_weight(x: int, z: int) -> int:
    return (x | z).bit_count()


@dataclass(frozen=True)
class PauliTerm:
    """One real-weighted Pauli string of fixed width."""

    coeff: float
    x: int
    z: int
    n_qubits: int

    @property
    def string(self) -> str:
        return mask_to_string(self.x, self.z, self.n_qubits)

    @property
    def weight(self) -> int:
        return mask_weight(self.x, self.z)

    def is_diagonal(self) -> bool:
        return self.x == 0

    def __str__(self) -> str:
        return f"{self.coeff:+.8f} {self.string}"


class PauliSum:
    """Sum of unique Pauli strings with real coefficients (Hermitian).

    Internally a dict {(x, z): coeff}. Complex coefficients are tolerated
    during algebraic construction; `terms` and serialization require the
    imaginary parts to have cancelled (tolerance `MERGE_TOL`).
    """

    MERGE_TOL = 1e-12

    def __init__(self, n_qubits: int, data: dict[tuple[int, int], complex] | None = None):
        self.n_qubits = n_qubits
        self._data: dict[tuple[int, int], complex] = dict(data) if data else {}

    # -- construction -------------------------------------------------

    @classmethod
    def from_terms(cls, n_qubits: int, terms: Iterable[tuple[float, str]]) -> "PauliSum":
        out = cls(n_qubits)
        for coeff, label in terms:
            if len(label) != n_qubits:
                raise ValueError(f"label {label!r} has wrong width for {n_qubits} qubits")
            out.add(coeff, *string_to_mask(label))
        return out

    def add(self, coeff: complex, x: int, z: int) -> None:
        key = (x, z)
        c = self._data.get(key, 0.0) + coeff
        if abs(c) <= self.MERGE_TOL:
            self._data.pop(key, None)
        else:
            self._data[key] = c

    def copy(self) -> "PauliSum":
        return PauliSum(self.n_qubits, self._data)

    # -- views ---------------------------------------------------------

    def __len__(self) -> int:
        return len(self._data)

    def items(self) -> list[tuple[tuple[int, int], complex]]:
        """Raw ((x, z), coeff) pairs, construction order not guaranteed."""
        return list(self._data.items())

    def __iter__(self) -> Iterator[PauliTerm]:
        return iter(self.terms)

    @property
    def terms(self) -> list[PauliTerm]:
        """Terms with real coefficients, sorted for deterministic output."""
        out = []
        for (x, z), c in sorted(self._data.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            if abs(c.imag if isinstance(c, complex) else 0.0) > 1e-9:
                raise ValueError(f"non-Hermitian coefficient {c} on {mask_to_string(x, z, self.n_qubits)}")
            out.append(PauliTerm(float(np.real(c)), x, z, self.n_qubits))
        return out

    def coeff(self, label: str) -> float:
        x, z = string_to_mask(label)
        return float(np.real(self._data.get((x, z), 0.0)))

    def strings(self) -> set[str]:
        return {mask_to_string(x, z, self.n_qubits) for (x, z) in self._data}

    # -- algebra --------------------------------------------------------

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if other.n_qubits != self.n_qubits:
            raise ValueError("width mismatch")
        out = self.copy()
        for key, c in other._data.items():
            out.add(c, *key)
        return out

    def __mul__(self, scalar: complex) -> "PauliSum":
        return PauliSum(self.n_qubits, {k: c * scalar for k, c in self._data.items()})

    __rmul__ = __mul__

    def matmul(self, other: "PauliSum") -> "PauliSum":
        """Operator product, expanding all cross terms."""
        out = PauliSum(self.n_qubits)
        for (x1, z1), c1 in self._data.items():
            for (x2, z2), c2 in other._data.items():
                x3, z3, ph = mul_masks(x1, z1, x2, z2)
                out.add(c1 * c2 * ph, x3, z3)
        return out

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        return self.matmul(other)

    def commutes_with_mask(self, x: int, z: int) -> bool:
        return all(masks_commute(xt, zt, x, z) for (xt, zt) in self._data)

    def is_diagonal(self) -> bool:
        return all(x == 0 for (x, _) in self._data)

    # -- dense ----------------------------------------------------------

    def to_matrix(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix (qubit 0 = least significant index bit)."""
        dim = 2 ** self.n_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for (x, z), c in self._data.items():
            out += c * pauli_matrix(mask_to_string(x, z, self.n_qubits))
        return out

    # -- serialization ----------------------------------------------------

    def to_text(self) -> str:
        """One term per line: '+c.cccccccc STRING', qubit 0 rightmost."""
        return "\n".join(str(t) for t in self.terms)

    @classmethod
    def from_text(cls, text: str) -> "PauliSum":
        pairs = []
        width = None
        for line in text.strip().splitlines():
            coeff_s, label = line.split()
            width = len(label) if width is None else width
            pairs.append((float(coeff_s), label))
        if width is None:
            raise ValueError("empty serialization")
        return cls.from_terms(width, pairs)

    def __repr__(self) -> str:
        return f"PauliSum(n_qubits={self.n_qubits}, n_terms={len(self)})"


def pauli_matrix(label: str) -> np.ndarray:
    """Dense matrix of a Pauli string (leftmost letter = highest qubit)."""
    out = np.array([[1.0 + 0j]])
    for letter in label:
        out = np.kron(out, _PAULI_1Q[letter])
    return out
