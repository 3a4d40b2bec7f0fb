import pytest

from su2q import verify


def test_only_and_timings():
    m = verify.run_suite(2, only={"grid_exactness", "fourier_plancherel"}, timings=True)
    assert [c["name"] for c in m["checks"]] == ["grid_exactness", "fourier_plancherel"]
    assert all(c["pass"] and c["seconds"] >= 0 for c in m["checks"])


def test_crashing_check_is_reported(monkeypatch):
    def boom(two_L):
        raise RuntimeError("kaput")

    monkeypatch.setattr(verify, "CHECKS", [("boom", boom)])
    m = verify.run_suite(2)
    assert not m["all_pass"]
    assert m["checks"][0]["note"] == "RuntimeError: kaput"


def test_band_must_be_positive():
    with pytest.raises(ValueError):
        verify.run_suite(0)


def test_check_names_are_unique():
    names = [n for n, _ in verify.CHECKS]
    assert len(names) == len(set(names))
