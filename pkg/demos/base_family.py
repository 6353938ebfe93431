"""Build the base hypersurface, check its witness and close it up projectively.

Run with ``python3 demos/base_family.py``.
"""

import random

from torsionkit.constructions import build_f0, check_star_witness, double_cone_budget, f0_with_double_cones
from torsionkit.constructions.witness import f0_witness
from torsionkit.groebner import projective_closure_basis, random_ideal_elements


def main():
    n, m = 3, 2
    fam = build_f0(n, m, n + 2)
    print(f"f0 for n={n}, m={m}: degree {fam.polys[0].total_degree()}")
    print(f"  {fam.polys[0]}")

    res = check_star_witness(f0_witness(n, m))
    print(f"witness residual {res.residual}, verdict {'pass' if res.ok else 'fail'}")

    samples = random_ideal_elements(fam.polys, 3, random.Random(7))
    rep = projective_closure_basis(fam.polys, fam.order, samples)
    print(f"closure check: coprime={rep.coprime} passed={rep.passed}")

    budget = double_cone_budget(n, m)
    cone = f0_with_double_cones(n, m, n + 2**n - 2 + budget)
    print(f"{budget} double cones keep degree {cone.polys[0].total_degree()} in {cone.ctx.nvars} variables")


if __name__ == "__main__":
    main()
