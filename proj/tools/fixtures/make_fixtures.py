#!/usr/bin/env python3
# Copyright 2026 The duccex Authors - All rights reserved.
# SPDX-License-Identifier: Apache-2.0
"""Regenerates the FCIDUMP fixtures in data/fixtures with PySCF.

RHF orbitals, all electrons correlated, Cartesian cc-pVTZ (15 functions per
hydrogen). Each MO is sign-fixed so its largest-magnitude AO coefficient is
positive. Usage: make_fixtures.py [--h4] [outdir]
"""

import argparse
import math
import os

import numpy as np
from pyscf import __version__ as pyscf_version
from pyscf import ao2mo, gto, scf


def fix_signs(c):
    c = c.copy()
    for k in range(c.shape[1]):
        col = c[:, k]
        if col[np.argmax(np.abs(col))] < 0:
            c[:, k] = -col
    return c


def write_fcidump(path, mol, mf, comment):
    c = fix_signs(mf.mo_coeff)
    n = c.shape[1]
    h = c.T @ mf.get_hcore() @ c
    eri = ao2mo.restore(8, ao2mo.kernel(mol, c), n)
    lines = ["# " + line for line in comment]
    lines.append(f" &FCI NORB={n},NELEC={mol.nelectron},MS2=0,")
    lines.append("  ORBSYM=" + "1," * n)
    lines.append("  ISYM=1,")
    lines.append(" &END")
    ij = 0
    for i in range(n):
        for j in range(i + 1):
            kl = 0
            for k in range(i + 1):
                for l in range(k + 1):
                    if ij >= kl:
                        v = eri[ij * (ij + 1) // 2 + kl]
                        if abs(v) >= 1e-14:
                            lines.append(f"{v:24.16e} {i+1:3d} {j+1:3d} {k+1:3d} {l+1:3d}")
                    kl += 1
            ij += 1
    for i in range(n):
        for j in range(i + 1):
            if abs(h[i, j]) >= 1e-14:
                lines.append(f"{h[i, j]:24.16e} {i+1:3d} {j+1:3d}   0   0")
    lines.append(f"{mol.energy_nuc():24.16e}   0   0   0   0")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def run(atom, basis, path, label):
    mol = gto.M(atom=atom, unit="bohr", basis=basis, cart=True, verbose=0)
    mf = scf.RHF(mol).run(conv_tol=1e-12)
    comment = [
        label,
        f"generator: tools/fixtures/make_fixtures.py, pyscf {pyscf_version}",
        f"geometry (bohr): {atom}",
        f"basis: {basis} (cartesian), {mol.nao} orbitals",
        f"e_rhf: {mf.e_tot:.12f}",
    ]
    write_fcidump(path, mol, mf, comment)
    print(path, mol.nao, mf.e_tot)


def h4_trapezoid(a, alpha):
    theta = (1 + alpha) * math.pi / 2
    pts = [(-a / 2, 0.0), (a / 2, 0.0),
           (a / 2 - a * math.cos(theta), a * math.sin(theta)),
           (-a / 2 + a * math.cos(theta), a * math.sin(theta))]
    return "; ".join(f"H {x:.12f} {y:.12f} 0" for x, y in pts)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("outdir", nargs="?", default=os.path.join(
        os.path.dirname(__file__), "..", "..", "data", "fixtures"))
    ap.add_argument("--h4", action="store_true", help="also write the H4 cc-pVTZ fixture")
    args = ap.parse_args()
    os.makedirs(args.outdir, exist_ok=True)
    for r, tag in [(1.4008, "1.4008"), (10.0, "10")]:
        run(f"H 0 0 0; H 0 0 {r}", "cc-pvtz",
            os.path.join(args.outdir, f"h2_ccpvtz_r{tag}.fcidump"),
            f"H2 R = {r} bohr")
    if args.h4:
        run(h4_trapezoid(2.0, 0.001), "cc-pvtz",
            os.path.join(args.outdir, "h4a_ccpvtz.fcidump"),
            "H4 trapezoid a = 2.0 bohr, alpha = 0.001")


if __name__ == "__main__":
    main()
