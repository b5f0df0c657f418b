import numpy as np
import pytest

from pumbilic.jet_model import MongeJet
from pumbilic.verify import spectral_trichotomy, verify_jet, verify_random


@pytest.mark.parametrize("name", ["J1", "J2", "J3", "J4", "J5"])
def test_fixtures_verify(fixtures, name):
    rep = verify_jet(fixtures[name], name, n_rays=3)
    assert rep.passed, [c.name for c in rep.failures]
    assert any(c.info for c in rep.checks)  # printed-series departures are reported


def test_random_d3_jets_verify():
    reps = verify_random(3, "D3", seed=5)
    assert all(r.passed for r in reps)


def test_skips_nongeneric():
    rep = verify_jet(MongeJet(k=0, k3=1, a=1.0))
    assert rep.skipped.startswith("NonGeneric")
    assert rep.passed


def test_trichotomy_signatures(fixtures):
    assert sorted(spectral_trichotomy(fixtures["J2"])[0]) == ["node", "saddle", "saddle"]
    assert spectral_trichotomy(fixtures["J3"])[0] == ["saddle"] * 3


def test_report_serializes(fixtures):
    d = verify_jet(fixtures["J1"], "J1", n_rays=2, printed_notes=False).as_dict()
    assert d["passed"] and d["label"] == "J1" and d["checks"]
