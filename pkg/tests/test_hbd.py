import pytest

from orderedcover.geometry import CoveringPart, MultiIndex
from orderedcover.hbd import (
    check_adjacency,
    check_diameters,
    check_nesting,
    hbd_report,
)
from orderedcover.zoo import (
    diagonal_curve,
    gap_dust,
    hilbert_square,
    holder_covering_family,
    koch_curve,
    minkowski_sausage,
    sierpinski_gasket,
    unit_interval,
)

SYSTEMS = [sierpinski_gasket(), hilbert_square(), koch_curve(), minkowski_sausage()]


@pytest.mark.parametrize("ifs", SYSTEMS, ids=lambda s: s.name)
def test_zoo_systems_pass_at_their_exponent(ifs):
    m_max = 2 if ifs.r == 8 else 3
    report = hbd_report(ifs, ifs.gamma, ifs.rho, m_max)
    assert report.passed
    assert report.first_failure() is None


@pytest.mark.parametrize("ifs", SYSTEMS, ids=lambda s: s.name)
def test_deflated_exponent_breaks_diameter_decay(ifs):
    report = hbd_report(ifs, 0.9 * ifs.gamma, ifs.rho, 3 if ifs.r < 8 else 2)
    assert not report.passed
    first = report.first_failure()
    assert first.condition == "i"
    assert first.counterexample is not None


def test_unit_interval_passes_deep():
    line = unit_interval()
    report = hbd_report(line, 1.0, line.rho, 10)
    assert report.passed


def test_gap_dust_fails_adjacency_only():
    dust = gap_dust()
    report = hbd_report(dust, dust.gamma, dust.rho, 3)
    assert not report.passed
    by_condition = {}
    for cond in report.conditions:
        by_condition.setdefault(cond.condition, []).append(cond.passed)
    assert all(by_condition["i"])
    assert all(by_condition["ii"])
    assert not all(by_condition["iii"])


def test_prebuilt_coverings_give_same_verdict():
    curve = diagonal_curve()
    family = holder_covering_family(curve, 4)
    report = hbd_report(family, 1.0, curve.holder_rho, 4, name=curve.name)
    assert report.passed
    assert report.name == curve.name


def test_diameter_check_flags_oversized_part():
    big = CoveringPart(MultiIndex((1,), 2), (0.0, 0.0), 2.0, 1)
    ok = CoveringPart(MultiIndex((2,), 2), (0.5, 0.0), 0.5, 1)
    result = check_diameters([big, ok], rho=1.0, c=0.5)
    assert not result.passed
    assert result.counterexample["index"] == [1]


def test_nesting_check_flags_escaping_child():
    parent = CoveringPart(MultiIndex((1,), 2), (0.0, 0.0), 1.0, 1)
    child = CoveringPart(MultiIndex((1, 1), 2), (3.0, 0.0), 0.5, 2)
    result = check_nesting([parent], [child])
    assert not result.passed


def test_adjacency_check_flags_gap():
    # two resolution-2 sibling blocks: children of 1 end at x=0.4,
    # children of 2 start at x=0.6
    def part(entries, x):
        return CoveringPart(MultiIndex(entries, 2), (x, 0.0), 0.2, 2)

    covering = [
        part((1, 1), 0.0),
        part((1, 2), 0.2),
        part((2, 1), 0.6),
        part((2, 2), 0.8),
    ]
    result = check_adjacency(covering, 2)
    assert not result.passed
    assert result.counterexample is not None


def test_adjacency_check_accepts_touching_chain():
    def part(entries, x):
        return CoveringPart(MultiIndex(entries, 2), (x, 0.0), 0.25, 2)

    covering = [part((1, 1), 0.0), part((1, 2), 0.25), part((2, 1), 0.5), part((2, 2), 0.75)]
    assert check_adjacency(covering, 2).passed


def test_report_record_shape():
    ifs = sierpinski_gasket()
    record = hbd_report(ifs, ifs.gamma, ifs.rho, 2).to_record()
    assert record["name"] == "sierpinski"
    assert record["pass"] is True
    kinds = {row["condition"] for row in record["conditions"]}
    assert kinds == {"i", "ii", "iii"}


def test_low_m_max_rejected():
    with pytest.raises(ValueError):
        hbd_report(sierpinski_gasket(), 1.0, 1.0, 0)
