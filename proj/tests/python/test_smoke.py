import math

import pytest

import spinherald as sh


def test_version():
    assert sh.__version__ == "0.1.0"


def test_rotated_dicke_variance():
    dist = sh.rotated_dicke_distribution(10, 1, math.pi / 2)
    assert sum(dist.probabilities) == pytest.approx(1.0, abs=1e-12)
    assert sh.jz_variance(dist) == pytest.approx(28.0, abs=1e-9)
    assert sh.rotated_variance_closed_form(10, 1) == pytest.approx(28.0)


def test_hp_limit():
    vals = sh.hp_limit_check([10, 100, 1000], 1)
    assert vals == pytest.approx([2.8, 2.98, 2.998], abs=1e-9)


def test_click_posterior_matches_bruteforce():
    p = sh.HeraldParams(p0=0.014, p2=0.0042, pd=0.1792, pf=3.417e-3)
    post = sh.click_posterior(p, 8)
    brute = sh.posterior_bruteforce(p, 8)
    assert post.probabilities[0] == pytest.approx(0.606, abs=0.02)
    assert post.probabilities[1] == pytest.approx(0.385, abs=0.02)
    for a, b in zip(post.probabilities, brute.probabilities):
        assert a == pytest.approx(b, abs=1e-10)


def test_purity_and_efficiency():
    assert sh.purity(1.0, 0.13, 0.38, 0.11) == pytest.approx(0.38)
    eta = sh.total_efficiency(0.50, 0.75, 0.95, 0.97, 0.77)
    assert eta == pytest.approx(0.266, abs=0.01)
    assert sh.eta_phase(math.radians(42.0)) == pytest.approx(0.956, abs=1e-3)


def test_mixture_variance():
    post = {0: 0.62, 1: 0.38}
    assert sh.mixture_variance(post, 10**5, 0.27) == pytest.approx(1.205, abs=1e-3)


def test_simulate_and_analyze_roundtrip(tmp_path):
    ds = sh.simulate_run({"shots": 2000, "seed": 5})
    assert len(ds.records) == 2000
    path = str(tmp_path / "ds.csv")
    sh.write_dataset_csv(ds, path)
    back = sh.read_dataset_csv(path)
    assert len(back.records) == 2000
    assert back.records[7].phi_raw == ds.records[7].phi_raw

    rep = sh.analyze_dataset(back.records, 100, 200, 1, 4)
    assert rep.n_records == 2000
    assert rep.no_click.w == pytest.approx(1.0, abs=0.1)


def test_validation_errors():
    with pytest.raises(ValueError):
        sh.HeraldParams(p0=1.5, p2=0.0, pd=0.5, pf=0.0)
    with pytest.raises(ValueError):
        sh.rotated_dicke_distribution(10, 11, 0.5)
