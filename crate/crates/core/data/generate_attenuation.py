"""Regenerate the bundled attenuation tables.

Photoelectric and incoherent cross sections come from xraylib below 770 keV.
Above that the incoherent term is the free-electron Klein-Nishina cross
section scaled by the electron density, and the photoelectric term is
extrapolated in log-log space from the last two tabulated points.
"""
import math

import numpy as np
import xraylib as xl

AVOGADRO = 6.02214076e23
R_E_CM = 2.8179403262e-13
ME_C2 = 510.99895
XRAYLIB_MAX_KEV = 770.0

MATERIALS = {
    "gagg": ("Gd3Al2Ga3O12", 6.63),
    "bgo": ("Bi4Ge3O12", 7.13),
}


def klein_nishina_cm2(e_kev):
    k = e_kev / ME_C2
    a = (1 + k) / k**2 * (2 * (1 + k) / (1 + 2 * k) - math.log(1 + 2 * k) / k)
    b = math.log(1 + 2 * k) / (2 * k) - (1 + 3 * k) / (1 + 2 * k) ** 2
    return 2 * math.pi * R_E_CM**2 * (a + b)


def electrons_per_gram(formula):
    parsed = xl.CompoundParser(formula)
    total = 0.0
    for z, frac in zip(parsed["Elements"], parsed["massFractions"]):
        total += frac * z / xl.AtomicWeight(z)
    return total * AVOGADRO


def edges(formula):
    parsed = xl.CompoundParser(formula)
    out = []
    for z in parsed["Elements"]:
        for shell in (xl.K_SHELL, xl.L1_SHELL, xl.L2_SHELL, xl.L3_SHELL):
            e = xl.EdgeEnergy(z, shell)
            if 10.0 < e < 3500.0:
                out.append(e)
    return out


def table(formula, density):
    grid = list(np.geomspace(10.0, 3500.0, 30))
    for e in edges(formula):
        grid += [e - 5e-3, e + 5e-3]
    grid = sorted(set(round(e, 4) for e in grid))
    tab = [e for e in grid if e <= XRAYLIB_MAX_KEV]
    pe_last = [xl.CS_Photo_CP(formula, e) for e in tab[-2:]]
    slope = math.log(pe_last[1] / pe_last[0]) / math.log(tab[-1] / tab[-2])
    n_e = electrons_per_gram(formula)
    rows = []
    for e in grid:
        if e <= XRAYLIB_MAX_KEV:
            pe = xl.CS_Photo_CP(formula, e)
            c = xl.CS_Compt_CP(formula, e)
        else:
            pe = pe_last[1] * (e / tab[-1]) ** slope
            c = klein_nishina_cm2(e) * n_e
        # cm2/g -> 1/mm
        rows.append((e, pe * density / 10.0, c * density / 10.0))
    return rows


if __name__ == "__main__":
    for name, (formula, density) in MATERIALS.items():
        with open(f"{name}.csv", "w", newline="\n") as f:
            f.write("energy_keV,mu_pe_per_mm,mu_compton_per_mm\n")
            for e, pe, c in table(formula, density):
                f.write(f"{e:.4f},{pe:.6e},{c:.6e}\n")
