"""Ground-truth engines: statevector simulation, exact spectra, state moment matrices.

Bit-string convention is little-endian throughout the package: bit i of a basis
index is the value of qubit i, so |z> has index sum(z_i << i).  This is the one
cross-module convention everything else relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .graph import Graph
from .sdp import GramIndex

DEFAULT_QUBIT_LIMIT = 16

_PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class QubitLimitError(ValueError):
    """Instance exceeds the exact-computation qubit limit."""


@dataclass(frozen=True)
class StateVector:
    """Normalized n-qubit pure state; amplitudes indexed little-endian."""

    n: int
    amplitudes: np.ndarray

    @classmethod
    def from_bits(cls, bits) -> "StateVector":
        n = len(bits)
        amps = np.zeros(2**n, dtype=complex)
        amps[sum(int(b) << i for i, b in enumerate(bits))] = 1.0
        return cls(n=n, amplitudes=amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "StateVector") -> float:
        """|<self|other>|, i.e. fidelity up to global phase."""
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)))


@dataclass(frozen=True)
class SpectrumResult:
    lambda_max: float
    sector: int       # Hamming weight of the sector achieving lambda_max
    dimension: int    # dimension of that sector


def _pair_slices(amps: np.ndarray, n: int, i: int, j: int) -> np.ndarray:
    """Stack the four amplitude groups for qubits (i, j).

    Row ell = b_i + 2*b_j of the result collects the amplitudes whose bits at
    (i, j) equal (b_i, b_j); a 4x4 kernel in this local basis is kron(Q_j, P_i).
    """
    idx = np.arange(amps.size)
    base = idx[((idx >> i) & 1 == 0) & ((idx >> j) & 1 == 0)]
    return np.stack([base, base + (1 << i), base + (1 << j), base + (1 << i) + (1 << j)])


def simulate(circuit, limit: int = DEFAULT_QUBIT_LIMIT) -> StateVector:
    """Evolve the circuit's initial bit string through its commuting rotations.

    Each gate applies exp(i * theta * P(i) P(j)) as a dense 4x4 kernel on the
    edge's qubit pair; the result is independent of gate order.
    """
    n = circuit.n
    if n > limit:
        raise QubitLimitError(f"{n} qubits exceeds the simulator limit of {limit}")
    amps = StateVector.from_bits(circuit.z).amplitudes.copy()
    eye4 = np.eye(4, dtype=complex)
    for gate in circuit.gates:
        i, j = gate.edge
        pi, pj = gate.paulis
        kernel = np.cos(gate.theta) * eye4 + 1j * np.sin(gate.theta) * np.kron(_PAULI[pj], _PAULI[pi])
        rows = _pair_slices(amps, n, i, j)
        amps[rows] = kernel @ amps[rows]
    state = StateVector(n=n, amplitudes=amps)
    if abs(state.norm() - 1.0) > 1e-12:
        raise AssertionError("statevector norm drifted beyond 1e-12")
    return state


def pauli_pair_expectations(psi: StateVector, i: int, j: int) -> tuple[float, float, float]:
    """(<X_i X_j>, <Y_i Y_j>, <Z_i Z_j>) for a normalized state."""
    rows = _pair_slices(psi.amplitudes, psi.n, i, j)
    a00, a10, a01, a11 = (psi.amplitudes[r] for r in rows)
    n00, n10, n01, n11 = (float(np.sum(np.abs(a) ** 2)) for a in (a00, a10, a01, a11))
    s_anti = complex(np.sum(np.conj(a00) * a11))   # couples |00> and |11>
    s_flip = complex(np.sum(np.conj(a10) * a01))   # couples |10> and |01>
    xx = 2.0 * (s_anti.real + s_flip.real)
    yy = 2.0 * (s_flip.real - s_anti.real)
    zz = (n00 + n11) - (n10 + n01)
    return xx, yy, zz


def expectation(psi: StateVector, g: Graph) -> float:
    """<psi| H |psi> with H = sum_e w_e (I - XX - YY - ZZ)/4."""
    total = 0.0
    for i, j, w in g.edges:
        xx, yy, zz = pauli_pair_expectations(psi, i, j)
        total += w * (1.0 - xx - yy - zz) / 4.0
    return total


def classical_energy(g: Graph, bits) -> float:
    """Energy of the computational basis state |bits>: half the cut weight."""
    return sum(w / 2.0 for i, j, w in g.edges if bits[i] != bits[j])


def _sector_basis(n: int, k: int) -> np.ndarray:
    states = [sum(1 << q for q in combo) for combo in combinations(range(n), k)]
    return np.array(sorted(states), dtype=np.int64)


def exact_opt(g: Graph, limit: int = DEFAULT_QUBIT_LIMIT) -> SpectrumResult:
    """Largest eigenvalue of H by dense diagonalization within Hamming sectors.

    H commutes with total Z (each edge term preserves Hamming weight), so the
    spectrum splits into weight sectors of dimension at most C(n, n//2).
    """
    n = g.n
    if n > limit:
        raise QubitLimitError(f"{n} qubits exceeds the diagonalization limit of {limit}")
    if n == 0:
        return SpectrumResult(lambda_max=0.0, sector=0, dimension=1)
    best = (-np.inf, 0, 0)
    for k in range(n + 1):
        basis = _sector_basis(n, k)
        dim = basis.size
        h = np.zeros((dim, dim))
        rows = np.arange(dim)
        for i, j, w in g.edges:
            differ = ((basis >> i) & 1) != ((basis >> j) & 1)
            h[rows[differ], rows[differ]] += w / 2.0
            flipped = basis[differ] ^ ((1 << i) | (1 << j))
            cols = np.searchsorted(basis, flipped)
            h[rows[differ], cols] -= w / 2.0
        top = float(np.linalg.eigvalsh(h)[-1]) if dim > 1 else float(h[0, 0])
        if top > best[0] + 1e-12:
            best = (top, k, dim)
    return SpectrumResult(lambda_max=best[0], sector=best[1], dimension=best[2])


def _apply_pauli(amps: np.ndarray, letter: str, qubit: int) -> np.ndarray:
    idx = np.arange(amps.size)
    bit = (idx >> qubit) & 1
    if letter == "Z":
        return np.where(bit == 1, -amps, amps)
    flipped = amps[idx ^ (1 << qubit)]
    if letter == "X":
        return flipped
    if letter == "Y":
        # Y|0> = i|1>, Y|1> = -i|0>: sign set by the target bit.
        return 1j * np.where(bit == 1, flipped, -flipped)
    raise ValueError(f"unknown Pauli letter {letter!r}")


_LETTER_FOR_AXIS = {1: "X", 2: "Y", 3: "Z"}


def moment_matrix_from_state(psi: StateVector, index: GramIndex) -> np.ndarray:
    """Symmetrized moment matrix of |psi> over the index's operator labels.

    Entry (s, t) is <psi|(S T + T S)|psi>/2 = Re <S psi|T psi>, so the matrix
    is the real part of a Gram matrix and therefore PSD; it satisfies every
    relaxation constraint and reproduces the state's energy exactly.
    """
    if index.n != psi.n:
        raise ValueError(f"index is for n={index.n} but state has n={psi.n}")
    applied = np.empty((index.size, psi.amplitudes.size), dtype=complex)
    for row, label in enumerate(index.labels):
        if label[0] == "unit":
            applied[row] = psi.amplitudes
        elif label[0] == "single":
            _, i, a = label
            applied[row] = _apply_pauli(psi.amplitudes, _LETTER_FOR_AXIS[a], i)
        else:
            _, i, j, a = label
            letter = _LETTER_FOR_AXIS[a]
            applied[row] = _apply_pauli(_apply_pauli(psi.amplitudes, letter, i), letter, j)
    gram = (np.conj(applied) @ applied.T).real
    return (gram + gram.T) / 2.0
