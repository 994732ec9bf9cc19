#!/usr/bin/env python3
"""Build the 27-square tagged covering of the Sierpinski triangle and audit it.

The stage-1 build starts from the 6 rank-2 parts that are not first
children and retires 2 of them per stage, so the schedule closes after
t = 3 stages with q = 3^3 = 27 squares.  Squares 3, 9 and 27 end their
stages, so their sides coincide exactly with the part diameters c^(1+j).
"""

from orderedcover import zoo
from orderedcover.geometry import attractor_points
from orderedcover.separation import coverage_check, verify_form, verify_separation
from orderedcover.tagging import BuilderParams, build_tagged_covering


def main() -> None:
    ifs = zoo.sierpinski_gasket()
    params = BuilderParams.from_stage(ifs, s=1, bigN=1, D=8.0)
    cov = build_tagged_covering(ifs, params)

    print(f"system: {ifs.name}, s = {params.s}, tau = {params.tau:.6f}, "
          f"D = {params.D}, q = {len(cov.squares)}")
    print()
    print("  k  part         side        tag")
    for sq in cov.squares:
        idx = ",".join(str(i) for i in sq.covered_index.entries)
        marker = "  <- stage end" if sq.k in (3, 9, 27) else ""
        print(f"{sq.k:>3}  ({idx:<7})  {sq.side:.8f}  "
              f"({sq.tag[0]:+.6f}, {sq.tag[1]:+.6f}){marker}")

    print()
    for j, k in enumerate((3, 9, 27), start=1):
        expect = params.c ** (params.s + j) * params.rho
        got = cov.squares[k - 1].side
        print(f"stage {j} ends at k = {k}: side {got:.12f}, "
              f"part diameter {expect:.12f}, diff {abs(got - expect):.2e}")

    form = verify_form(cov)
    sep = verify_separation(cov, seed=0)
    covered = coverage_check(cov, attractor_points(ifs, 7))
    print()
    print(f"side schedule exact:   {form.passed} (max rel err {form.max_rel_err:.2e})")
    print(f"attractor covered:     {covered}")
    print(f"separation (D = {params.D}): {sep.passed}, mode {sep.mode}, "
          f"{sep.pairs_checked} pairs, worst ratio {sep.worst_ratio:.6f} "
          f"at pair {sep.worst_pair}")


if __name__ == "__main__":
    main()
