#!/usr/bin/env python3
# Copyright 2026 The Pulseforge Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Generates the committed molecular Hamiltonian files (data/molecules).

Pipeline, all in closed form for s-type contracted Gaussians (STO-3G):
  1. overlap/kinetic/nuclear-attraction/ERI integrals via the Boys function,
  2. restricted Hartree-Fock in the orthogonalized AO basis,
  3. MO-basis spin-orbital Hamiltonian restricted to the 2-electron, Sz=0
     sector (4 determinants for a 2-orbital system) -- exact FCI there,
  4. Pauli decomposition of that 4x4 sector matrix onto 2 qubits.

Qubit encoding (documented in each file header): qubit k is 1 when the
spin-k electron occupies the lowest (bonding) molecular orbital, so |11> is
the Hartree-Fock determinant and |00> the doubly excited one.

The outputs are committed as data; rerun only to regenerate them.
"""

import math
import os
import sys

import numpy as np

ANGSTROM_TO_BOHR = 1.0 / 0.529177210903

# STO-3G contractions (exponents, contraction coefficients) for 1s shells.
STO3G = {
    "H": ([3.425250914, 0.6239137298, 0.1688554040],
          [0.1543289673, 0.5353281423, 0.4446345422]),
    "He": ([6.362421394, 1.158922999, 0.3136497915],
           [0.1543289673, 0.5353281423, 0.4446345422]),
}

CHARGE = {"H": 1.0, "He": 2.0}


def boys_f0(t):
    if t < 1e-12:
        return 1.0 - t / 3.0
    return 0.5 * math.sqrt(math.pi / t) * math.erf(math.sqrt(t))


class Shell:
    def __init__(self, element, center):
        exps, coefs = STO3G[element]
        self.center = np.asarray(center, dtype=float)
        self.exps = np.asarray(exps, dtype=float)
        # Primitive s-Gaussian normalization folded into the coefficients.
        norms = (2.0 * self.exps / math.pi) ** 0.75
        self.coefs = np.asarray(coefs, dtype=float) * norms


def overlap_kinetic(a, b):
    s = 0.0
    t = 0.0
    rab2 = float(np.dot(a.center - b.center, a.center - b.center))
    for ea, ca in zip(a.exps, a.coefs):
        for eb, cb in zip(b.exps, b.coefs):
            p = ea + eb
            pref = (math.pi / p) ** 1.5 * math.exp(-ea * eb / p * rab2)
            s += ca * cb * pref
            t += ca * cb * ea * eb / p * (3.0 - 2.0 * ea * eb / p * rab2) * pref
    return s, t


def nuclear(a, b, centers_charges):
    v = 0.0
    rab2 = float(np.dot(a.center - b.center, a.center - b.center))
    for ea, ca in zip(a.exps, a.coefs):
        for eb, cb in zip(b.exps, b.coefs):
            p = ea + eb
            rp = (ea * a.center + eb * b.center) / p
            pref = 2.0 * math.pi / p * math.exp(-ea * eb / p * rab2)
            for rc, q in centers_charges:
                rpc2 = float(np.dot(rp - rc, rp - rc))
                v -= q * ca * cb * pref * boys_f0(p * rpc2)
    return v


def eri(a, b, c, d):
    val = 0.0
    rab2 = float(np.dot(a.center - b.center, a.center - b.center))
    rcd2 = float(np.dot(c.center - d.center, c.center - d.center))
    for ea, ca in zip(a.exps, a.coefs):
        for eb, cb in zip(b.exps, b.coefs):
            p = ea + eb
            rp = (ea * a.center + eb * b.center) / p
            kab = math.exp(-ea * eb / p * rab2)
            for ec, cc in zip(c.exps, c.coefs):
                for ed, cd_ in zip(d.exps, d.coefs):
                    q = ec + ed
                    rq = (ec * c.center + ed * d.center) / q
                    kcd = math.exp(-ec * ed / q * rcd2)
                    rpq2 = float(np.dot(rp - rq, rp - rq))
                    pref = 2.0 * math.pi ** 2.5 / (p * q * math.sqrt(p + q))
                    val += (ca * cb * cc * cd_ * pref * kab * kcd *
                            boys_f0(p * q / (p + q) * rpq2))
    return val


def integrals(shells, centers_charges):
    n = len(shells)
    s = np.zeros((n, n))
    h = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            sij, tij = overlap_kinetic(shells[i], shells[j])
            s[i, j] = sij
            h[i, j] = tij + nuclear(shells[i], shells[j], centers_charges)
    g = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    g[i, j, k, l] = eri(shells[i], shells[j], shells[k], shells[l])
    return s, h, g


def rhf(s, h, g, n_elec, iters=200):
    # Symmetric orthogonalization; closed-shell SCF.
    evals, evecs = np.linalg.eigh(s)
    x = evecs @ np.diag(evals ** -0.5) @ evecs.T
    n = s.shape[0]
    dm = np.zeros((n, n))
    e_old = 0.0
    for _ in range(iters):
        jmat = np.einsum("pqrs,rs->pq", g, dm)
        kmat = np.einsum("prqs,rs->pq", g, dm)
        f = h + 2.0 * jmat - kmat
        fp = x.T @ f @ x
        _, cp = np.linalg.eigh(fp)
        c = x @ cp
        cocc = c[:, : n_elec // 2]
        dm_new = cocc @ cocc.T
        e = float(np.einsum("pq,pq->", dm_new, h + f))
        if abs(e - e_old) < 1e-12 and np.max(np.abs(dm_new - dm)) < 1e-10:
            dm = dm_new
            break
        dm = dm_new
        e_old = e
    jmat = np.einsum("pqrs,rs->pq", g, dm)
    kmat = np.einsum("prqs,rs->pq", g, dm)
    f = h + 2.0 * jmat - kmat
    fp = x.T @ f @ x
    _, cp = np.linalg.eigh(fp)
    c = x @ cp
    e_elec = float(np.einsum("pq,pq->", dm, h + f))
    return c, e_elec


def sector_hamiltonian(h_mo, g_mo, e_nuc):
    """4x4 Hamiltonian over determinants |a_alpha b_beta>, a,b in {0,1} MOs.

    Basis order follows the qubit encoding |q0 q1> with q=1 meaning the
    electron of that spin sits in MO 0 (bonding): index = q0*2 + q1, and the
    MO occupied by spin sigma is (0 if q_sigma else 1).
    """
    hm = np.zeros((4, 4))
    for row in range(4):
        a_r = 0 if (row >> 1) & 1 else 1
        b_r = 0 if row & 1 else 1
        for col in range(4):
            a_c = 0 if (col >> 1) & 1 else 1
            b_c = 0 if col & 1 else 1
            val = 0.0
            if b_r == b_c:
                val += h_mo[a_r, a_c]
            if a_r == a_c:
                val += h_mo[b_r, b_c]
            # Opposite-spin Coulomb term (chemists' notation (a_r a_c | b_r b_c)).
            val += g_mo[a_r, a_c, b_r, b_c]
            if row == col:
                val += e_nuc
            hm[row, col] = val
    return hm


PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_decompose(hm):
    terms = []
    for l0 in "IXYZ":
        for l1 in "IXYZ":
            op = np.kron(PAULI[l0], PAULI[l1])
            coef = np.trace(op.conj().T @ hm) / 4.0
            assert abs(coef.imag) < 1e-12
            if abs(coef.real) > 1e-12:
                terms.append((coef.real, l0 + l1))
    return terms


def molecule_hamiltonian(atoms, bond_length_angstrom):
    r = bond_length_angstrom * ANGSTROM_TO_BOHR
    centers = [np.array([0.0, 0.0, 0.0]), np.array([0.0, 0.0, r])]
    shells = [Shell(atoms[0], centers[0]), Shell(atoms[1], centers[1])]
    charges = [(centers[i], CHARGE[atoms[i]]) for i in range(2)]
    e_nuc = CHARGE[atoms[0]] * CHARGE[atoms[1]] / r
    s, h, g = integrals(shells, charges)
    c, e_elec = rhf(s, h, g, n_elec=2)
    h_mo = c.T @ h @ c
    g_mo = np.einsum("pi,qj,rk,sl,pqrs->ijkl", c, c, c, c, g)
    hm = sector_hamiltonian(h_mo, g_mo, e_nuc)
    fci = float(np.linalg.eigvalsh(hm)[0])
    rhf_total = e_elec + e_nuc
    return hm, fci, rhf_total


def write_ham(path, label, bond_length, hm, fci):
    terms = pauli_decompose(hm)
    with open(path, "w") as out:
        out.write(f"# label: {label}\n")
        out.write(f"# bond_length: {bond_length}\n")
        out.write(f"# fci_reference: {fci:.12f}\n")
        out.write("# source: self-contained STO-3G (Boys-function s-orbital integrals),"
                  " RHF + exact diagonalization of the 2-electron Sz=0 sector\n")
        out.write("# encoding: qubit k = 1 when the spin-k electron occupies the"
                  " bonding MO; |11> is the Hartree-Fock determinant\n")
        for coef, letters in terms:
            out.write(f"{coef:.12f} {letters}\n")


def main():
    out_dir = os.path.join(os.path.dirname(__file__), "..", "data", "molecules")
    os.makedirs(out_dir, exist_ok=True)

    h2_lengths = [0.1, 0.3, 0.5, 0.6, 0.75, 0.9, 1.1, 1.5, 2.1]
    for bl in h2_lengths:
        hm, fci, rhf_e = molecule_hamiltonian(("H", "H"), bl)
        name = f"h2_{bl:.2f}.ham".replace("-", "")
        write_ham(os.path.join(out_dir, name), "H2", bl, hm, fci)
        print(f"H2   R={bl:5.2f} A  FCI={fci:+.6f}  RHF={rhf_e:+.6f}")

    heh_lengths = [0.5, 0.7, 0.775, 0.9, 1.0, 1.2, 1.5]
    for bl in heh_lengths:
        hm, fci, rhf_e = molecule_hamiltonian(("He", "H"), bl)
        name = f"heh_plus_{bl:.3f}.ham"
        write_ham(os.path.join(out_dir, name), "HeH+", bl, hm, fci)
        print(f"HeH+ R={bl:5.3f} A  FCI={fci:+.6f}  RHF={rhf_e:+.6f}")

    # Canonical single-geometry files used by the experiment configs.
    hm, fci, _ = molecule_hamiltonian(("H", "H"), 0.75)
    write_ham(os.path.join(out_dir, "h2_0.75.ham"), "H2", 0.75, hm, fci)
    best = None
    for bl in [x / 1000.0 for x in range(700, 1100, 5)]:
        _, fci_x, _ = molecule_hamiltonian(("He", "H"), bl)
        if best is None or fci_x < best[1]:
            best = (bl, fci_x)
    print(f"HeH+ equilibrium scan: R*={best[0]:.3f} A, FCI={best[1]:+.6f}")
    hm, fci, _ = molecule_hamiltonian(("He", "H"), best[0])
    write_ham(os.path.join(out_dir, "heh_plus.ham"), "HeH+", best[0], hm, fci)


if __name__ == "__main__":
    sys.exit(main())
