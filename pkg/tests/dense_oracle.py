"""Dense truncated-basis reference implementation used only by the tests.

Nothing here imports the sparse code paths: operators are explicit matrices,
beam splitters come from ``expm`` of their generator and partial traces are
taken on a tensor-product space.
"""

from __future__ import annotations

import functools
import itertools
import math

import numpy as np
from scipy import sparse
from scipy.linalg import expm


class DenseSpace:
    """All occupation vectors of ``n_modes`` modes with total photon number <= n_max."""

    def __init__(self, n_modes: int, n_max: int):
        self.n_modes = n_modes
        self.n_max = n_max
        self.basis = [occ for occ in itertools.product(range(n_max + 1), repeat=n_modes) if sum(occ) <= n_max]
        self.index = {occ: i for i, occ in enumerate(self.basis)}
        self.dim = len(self.basis)
        self._create = {}

    def creation(self, j: int) -> np.ndarray:
        if j not in self._create:
            m = np.zeros((self.dim, self.dim), dtype=complex)
            for col, occ in enumerate(self.basis):
                new = occ[:j] + (occ[j] + 1,) + occ[j + 1:]
                if new in self.index:
                    m[self.index[new], col] = math.sqrt(occ[j] + 1)
            self._create[j] = m
        return self._create[j]

    def annihilation(self, j: int) -> np.ndarray:
        return self.creation(j).conj().T

    def number(self, j: int) -> np.ndarray:
        return np.diag([float(occ[j]) for occ in self.basis]).astype(complex)

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index[(0,) * self.n_modes]] = 1
        return v

    def vector(self, terms) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        for occ, amp in terms.items():
            v[self.index[tuple(occ)]] += amp
        return v

    def phase(self, j: int, phi: float) -> np.ndarray:
        return expm(1j * phi * self.number(j))

    def beam_splitter(self, a: int, b: int, t: float) -> np.ndarray:
        theta = math.acos(t)
        gen = self.creation(a) @ self.annihilation(b) + self.creation(b) @ self.annihilation(a)
        return expm(1j * theta * gen)

    def substituted_basis_image(self, occ, src: int, combo: dict[int, complex]) -> np.ndarray:
        """``prod_j (A_j)^n_j / sqrt(n_j!) |0>`` with ``A_src = sum_k c_k a_k^dag``."""
        return self._substituted_images([occ], src, combo)[:, 0]

    def overlap_matrix(self, src: int, tgt: int, anc: int, gamma: float) -> np.ndarray:
        s = math.sqrt(1 - gamma ** 2)
        return self._substituted_images(self.basis, src, {tgt: gamma, anc: s})

    def _substituted_images(self, occs, src: int, combo: dict[int, complex]) -> np.ndarray:
        # sparse copies only speed up the mat-vecs; entries are the dense ones above
        ops = [sparse.csr_matrix(self.creation(j)) for j in range(self.n_modes)]
        ops[src] = sparse.csr_matrix(sum(c * self.creation(k) for k, c in combo.items()))
        cols = []
        for occ in occs:
            v = self.vacuum()
            for j, n in enumerate(occ):
                for _ in range(n):
                    v = ops[j] @ v
                v = v / math.sqrt(math.factorial(n))
            cols.append(v)
        return np.column_stack(cols)

    def probability(self, vec: np.ndarray, predicates: dict[int, callable]) -> float:
        proj = np.array([all(p(occ[j]) for j, p in predicates.items()) for occ in self.basis], dtype=float)
        return float(np.real(np.vdot(vec, proj * vec)))


class TensorSpace:
    """Per-mode cutoff ``d`` tensor-product space for density-matrix marginals."""

    def __init__(self, n_modes: int, d: int):
        self.n_modes, self.d = n_modes, d
        self.dim = d ** n_modes
        a = np.diag(np.sqrt(np.arange(1, d)), -1).astype(complex)  # single-mode creation
        self._single = a

    def _embed(self, op: np.ndarray, j: int) -> np.ndarray:
        mats = [np.eye(self.d, dtype=complex)] * self.n_modes
        mats = list(mats)
        mats[j] = op
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out

    def creation(self, j: int) -> np.ndarray:
        return self._embed(self._single, j)

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1
        return v

    def two_mode(self, op2: np.ndarray, a: int, b: int) -> np.ndarray:
        """Embed an operator on modes (a, b) with a < b adjacent-agnostic via index permutation."""
        d, n = self.d, self.n_modes
        full = np.zeros((self.dim, self.dim), dtype=complex)
        op4 = op2.reshape(d, d, d, d)
        for idx in itertools.product(range(d), repeat=n):
            col = np.ravel_multi_index(idx, (d,) * n)
            for na, nb in itertools.product(range(d), repeat=2):
                amp = op4[na, nb, idx[a], idx[b]]
                if amp == 0:
                    continue
                new = list(idx)
                new[a], new[b] = na, nb
                full[np.ravel_multi_index(new, (d,) * n), col] += amp
        return full

    def beam_splitter(self, a: int, b: int, t: float) -> np.ndarray:
        d = self.d
        ad = self._single
        gen = np.kron(ad, ad.conj().T) + np.kron(ad.conj().T, ad)
        return self.two_mode(expm(1j * math.acos(t) * gen), a, b)

    def reduced_density(self, vec: np.ndarray, keep: list[int]) -> np.ndarray:
        psi = vec.reshape((self.d,) * self.n_modes)
        rho = np.tensordot(psi, psi.conj(), axes=0)  # indices: kets then bras
        n = self.n_modes
        traced = [j for j in range(n) if j not in keep]
        for j in sorted(traced, reverse=True):
            rho = np.trace(rho, axis1=j, axis2=j + rho.ndim // 2)
        return rho


def zwm_oracle_probabilities(pair_number: int, gamma: float, phi: float, t: float = 1 / math.sqrt(2),
                             d: int = 3) -> dict[str, float]:
    """Singles and coincidence of the ZWM interferometer via a density-matrix route.

    Modes: 0=S1, 1=S2, 2=I1, 3=I2, 4=A1.  NL1 amplitudes are built first, the
    I1 photon is phase shifted, rotated into A1 by a beam splitter of
    transmission ``gamma`` and then swapped into the empty I2 mode, and only
    then are the NL2 pair operators applied.
    """
    sp, cs, nl1, nl2, rotate_swap, n_i1, splitter = _zwm_operators(gamma, t, d)
    transport = rotate_swap @ expm(1j * phi * n_i1)
    vac = sp.vacuum()
    if pair_number == 1:
        psi = transport @ (nl1 @ vac) + nl2 @ vac
    else:
        psi = (0.5 * transport @ (nl1 @ nl1 @ vac)
               + nl2 @ (transport @ (nl1 @ vac))
               + 0.5 * nl2 @ nl2 @ vac)
    psi = psi / np.linalg.norm(psi)
    psi = splitter @ psi
    rho = sp.reduced_density(psi, [0, 1]).reshape(d * d, d * d)
    diag = np.real(np.diag(rho)).reshape(d, d)
    return {
        "singles_d1": float(diag[1:, :].sum()),
        "singles_d2": float(diag[:, 1:].sum()),
        "coincidence": float(diag[1:, 1:].sum()),
    }


@functools.lru_cache(maxsize=32)
def _zwm_operators(gamma: float, t: float, d: int):
    """Phase-independent pieces of the oracle, cached across phase samples."""
    sp = TensorSpace(5, d)
    cs = [sp.creation(j) for j in range(5)]
    rotate_swap = sp.two_mode(_swap_matrix(d), 2, 3) @ sp.beam_splitter(2, 4, gamma)
    n_i1 = cs[2] @ cs[2].conj().T
    return sp, cs, cs[0] @ cs[2], cs[1] @ cs[3], rotate_swap, n_i1, sp.beam_splitter(0, 1, t)


def _swap_matrix(d: int) -> np.ndarray:
    m = np.zeros((d * d, d * d), dtype=complex)
    for i, j in itertools.product(range(d), repeat=2):
        m[j * d + i, i * d + j] = 1
    return m


def oracle_visibility(pair_number: int, gamma: float, channel: str, samples: int = 64) -> float:
    phis = np.linspace(0, 2 * np.pi, samples, endpoint=False)
    vals = np.array([zwm_oracle_probabilities(pair_number, gamma, p)[channel] for p in phis])
    return float((vals.max() - vals.min()) / (vals.max() + vals.min()))
