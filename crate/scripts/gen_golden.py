"""Generate reference FCIDUMP files and classical SC-NEVPT2 energies with PySCF.

Run from the repository root:  python3 scripts/gen_golden.py
Outputs go to data/h2/ (6-31G, CAS(2,2)), data/h2_sto3g/ (full-space FCI check)
data/li2/ (6-31G, CAS(4,6) with one core orbital) and data/h4/
(linear H4 chain, 6-31G, CAS(4,4)).
"""
import json
import os

import numpy as np
from pyscf import gto, scf, mcscf, fci, ao2mo
from pyscf.mrpt import nevpt2
from pyscf.tools import fcidump

BONDS = [0.5, 0.74, 1.0, 1.5, 2.0, 2.5]


def write_dump(path, h1, eri, norb, nelec, ecore):
    fcidump.from_integrals(path, h1, eri, norb, nelec, nuc=ecore, ms=0, tol=1e-15, float_format=" %.16e")


def h2_631g(r, outdir):
    mol = gto.M(atom=f"H 0 0 0; H 0 0 {r}", basis="6-31g", unit="angstrom", verbose=0)
    mf = scf.RHF(mol).run(conv_tol=1e-12)
    mc = mcscf.CASCI(mf, 2, 2)
    mc.verbose = 0
    mc.kernel()
    # put orbitals in the same semicanonical basis NEVPT2 uses
    mc.canonicalize_(cas_natorb=False)
    mc.kernel()
    e_cas = mc.e_tot
    pt = nevpt2.NEVPT(mc)
    pt.verbose = 0
    e2 = pt.kernel()
    mo = mc.mo_coeff
    norb = mo.shape[1]
    h1 = mo.T @ mf.get_hcore() @ mo
    eri = ao2mo.restore(1, ao2mo.kernel(mol, mo), norb)
    name = f"h2_{r:.2f}.fcidump"
    write_dump(os.path.join(outdir, name), h1, eri, norb, 2, mol.energy_nuc())
    return {"bond_length": r, "fcidump": name, "n_core": 0, "n_active": 2, "n_virtual": norb - 2,
            "e_casci": e_cas, "e2": e2, "e_total": e_cas + e2}


def h2_sto3g(outdir):
    mol = gto.M(atom="H 0 0 0; H 0 0 0.74", basis="sto-3g", unit="angstrom", verbose=0)
    mf = scf.RHF(mol).run(conv_tol=1e-12)
    norb = mf.mo_coeff.shape[1]
    h1 = mf.mo_coeff.T @ mf.get_hcore() @ mf.mo_coeff
    eri = ao2mo.restore(1, ao2mo.kernel(mol, mf.mo_coeff), norb)
    e_fci = fci.FCI(mf).kernel()[0]
    write_dump(os.path.join(outdir, "h2_0.74.fcidump"), h1, eri, norb, 2, mol.energy_nuc())
    return {"fcidump": "h2_0.74.fcidump", "e_fci": e_fci, "e_hf": mf.e_tot}


def li2_631g(r, outdir):
    mol = gto.M(atom=f"Li 0 0 0; Li 0 0 {r}", basis="6-31g", unit="angstrom", verbose=0)
    mf = scf.RHF(mol).run(conv_tol=1e-12)
    mc = mcscf.CASCI(mf, 6, 4)
    mc.verbose = 0
    mc.kernel()
    mc.canonicalize_(cas_natorb=False)
    mc.kernel()
    pt = nevpt2.NEVPT(mc)
    pt.verbose = 0
    e2 = pt.kernel()
    mo = mc.mo_coeff
    norb = mo.shape[1]
    h1 = mo.T @ mf.get_hcore() @ mo
    eri = ao2mo.restore(1, ao2mo.kernel(mol, mo), norb)
    name = f"li2_{r:.2f}.fcidump"
    write_dump(os.path.join(outdir, name), h1, eri, norb, 6, mol.energy_nuc())
    return {"bond_length": r, "fcidump": name, "n_core": mc.ncore, "n_active": 6, "n_virtual": norb - 6 - mc.ncore,
            "e_casci": mc.e_tot, "e2": e2, "e_total": mc.e_tot + e2}


def h4_chain(r, outdir):
    atoms = "; ".join(f"H 0 0 {i * r}" for i in range(4))
    mol = gto.M(atom=atoms, basis="6-31g", unit="angstrom", verbose=0)
    mf = scf.RHF(mol).run(conv_tol=1e-12)
    mc = mcscf.CASCI(mf, 4, 4)
    mc.verbose = 0
    mc.kernel()
    mc.canonicalize_(cas_natorb=False)
    mc.kernel()
    pt = nevpt2.NEVPT(mc)
    pt.verbose = 0
    e2 = pt.kernel()
    mo = mc.mo_coeff
    norb = mo.shape[1]
    h1 = mo.T @ mf.get_hcore() @ mo
    eri = ao2mo.restore(1, ao2mo.kernel(mol, mo), norb)
    name = f"h4_{r:.2f}.fcidump"
    write_dump(os.path.join(outdir, name), h1, eri, norb, 4, mol.energy_nuc())
    return {"bond_length": r, "fcidump": name, "n_core": mc.ncore, "n_active": 4, "n_virtual": norb - 4 - mc.ncore,
            "e_casci": mc.e_tot, "e2": e2, "e_total": mc.e_tot + e2}


def main():
    root = os.path.join(os.path.dirname(__file__), "..", "data")
    d1 = os.path.join(root, "h2")
    d2 = os.path.join(root, "h2_sto3g")
    os.makedirs(d1, exist_ok=True)
    os.makedirs(d2, exist_ok=True)
    points = [h2_631g(r, d1) for r in BONDS]
    with open(os.path.join(d1, "reference.json"), "w") as f:
        json.dump({"basis": "6-31g", "active_space": [2, 2], "points": points}, f, indent=2)
    d3 = os.path.join(root, "li2")
    os.makedirs(d3, exist_ok=True)
    li2 = [li2_631g(r, d3) for r in (2.67, 5.0)]
    with open(os.path.join(d3, "reference.json"), "w") as f:
        json.dump({"basis": "6-31g", "active_space": [4, 6], "points": li2}, f, indent=2)
    d4 = os.path.join(root, "h4")
    os.makedirs(d4, exist_ok=True)
    h4 = [h4_chain(r, d4) for r in (0.9, 1.5, 2.0, 2.5)]
    with open(os.path.join(d4, "reference.json"), "w") as f:
        json.dump({"basis": "6-31g", "active_space": [4, 4], "geometry": "linear chain", "points": h4}, f, indent=2)
    with open(os.path.join(d2, "reference.json"), "w") as f:
        json.dump({"basis": "sto-3g", **h2_sto3g(d2)}, f, indent=2)


if __name__ == "__main__":
    np.set_printoptions(precision=12)
    main()
