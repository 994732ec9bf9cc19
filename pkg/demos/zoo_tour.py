#!/usr/bin/env python3
"""Walk the built-in catalog and run the box dimension checks on each system."""

from orderedcover import zoo
from orderedcover.hbd import hbd_report


def main() -> None:
    systems = [
        (zoo.sierpinski_gasket(), 5),
        (zoo.hilbert_square(), 5),
        (zoo.koch_curve(), 5),
        (zoo.minkowski_sausage(), 3),
        (zoo.unit_interval(), 6),
    ]
    for ifs, m_max in systems:
        print(f"== {ifs.name} ==")
        print(f"   r = {ifs.r}, ratio = {ifs.ratio:.6f}, gamma = {ifs.gamma:.6f}, "
              f"rho = {ifs.rho:.6f}")
        for i, phi in enumerate(ifs.maps, start=1):
            print(f"   map {i}: ratio {phi.ratio:.4f}, angle {phi.angle:+.4f}, "
                  f"reflect {phi.reflect}, shift ({phi.shift[0]:+.4f}, {phi.shift[1]:+.4f})")
        rep = hbd_report(ifs, ifs.gamma, ifs.rho, m_max, name=ifs.name)
        print(f"   checks at stated exponent, m <= {m_max}: "
              f"{'PASS' if rep.passed else 'FAIL'}")
        bad = hbd_report(ifs, 0.9 * ifs.gamma, ifs.rho, m_max, name=ifs.name)
        first = bad.first_failure()
        where = f"condition ({first.condition}) at m = {first.m}" if first else "nowhere"
        print(f"   checks at 0.9x exponent: FAIL expected, first failure {where}")
        print()


if __name__ == "__main__":
    main()
