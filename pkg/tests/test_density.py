import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from benfrag import density
from benfrag.density import Density, from_config, power, table, triangular, uniform
from benfrag.quadrature import adaptive_simpson
from benfrag.rng import RngSpec

GRID = np.linspace(0.0, 1.0, 1001)


def catalog():
    return [
        uniform(),
        power(0.0),
        power(1.0),
        power(2.5),
        triangular(0.3),
        triangular(1.0),
        table([[0.0, 0.0], [1.0, 2.0]]),
        table([[0.2, 1.0], [0.5, 3.0], [0.9, 0.5]]),
        power(1.0).mirror(),
        triangular(0.3).symmetrize(),
        table([[0.0, 0.0], [1.0, 2.0]]).symmetrize(),
    ]


# ----------------------------------------------------------------------
# construction and normalization


@pytest.mark.parametrize("d", catalog(), ids=lambda d: str(d.descriptor()))
def test_normalization_invariant(d):
    integral, _ = adaptive_simpson(d.pdf, 0.0, 1.0, tol=1e-10, breakpoints=d.breakpoints())
    assert abs(integral - 1.0) <= 1e-9


@pytest.mark.parametrize("d", catalog(), ids=lambda d: str(d.descriptor()))
def test_pdf_nonnegative(d):
    assert np.all(d.pdf(GRID) >= 0.0)


def test_invalid_constructions():
    with pytest.raises(ValueError):
        power(-0.5)  # unbounded at 0
    with pytest.raises(ValueError):
        triangular(1.5)
    with pytest.raises(ValueError):
        table([[0.0, 1.0]])  # single knot
    with pytest.raises(ValueError):
        table([[0.0, 1.0], [0.0, 2.0]])  # not increasing
    with pytest.raises(ValueError):
        table([[-0.2, 1.0], [1.0, 1.0]])  # support leaks outside (0, 1)
    with pytest.raises(ValueError):
        table([[0.0, 0.0], [1.0, 0.0]])  # zero mass
    with pytest.raises(ValueError):
        Density(kind="unknown")


# ----------------------------------------------------------------------
# sampling


def test_uniform_samples_in_open_interval():
    vals = uniform().sample(RngSpec(7, 0), 3)
    assert vals.shape == (3,)
    assert np.all((vals > 0.0) & (vals < 1.0))


def test_sampling_is_deterministic():
    d = triangular(0.4)
    a = d.sample(RngSpec(42, 3), 100)
    b = d.sample(RngSpec(42, 3), 100)
    assert np.array_equal(a, b)


def test_power_zero_equals_uniform_stream():
    # alpha = 0 is the degenerate-to-uniform case: identity inverse CDF.
    spec = RngSpec(99, 4)
    assert np.array_equal(power(0.0).sample(spec, 1000), uniform().sample(spec, 1000))


def test_offset_blocks_compose():
    d = power(1.0)
    spec = RngSpec(8, 1)
    whole = d.sample(spec, 40)
    parts = np.concatenate([d.sample(spec, 10, offset=o) for o in (0, 10, 20, 30)])
    assert np.array_equal(whole, parts)


def test_table_linear_density_mean():
    # f(t) = 2t; the quadrature oracle fixes the target mean.
    d = table([[0.0, 0.0], [1.0, 2.0]])
    target, _ = adaptive_simpson(lambda t: t * d.pdf(t), 0.0, 1.0, tol=1e-12)
    assert target == pytest.approx(2.0 / 3.0, abs=1e-10)
    vals = d.sample(RngSpec(2024, 0), 10 ** 6)
    assert abs(vals.mean() - target) < 0.002


def test_uniform_empirical_cdf_ks():
    vals = uniform().sample(RngSpec(31337, 0), 10 ** 6)
    vals.sort()
    ranks = np.arange(1, vals.size + 1)
    ks = max(np.max(ranks / vals.size - vals), np.max(vals - (ranks - 1) / vals.size))
    assert ks < 0.002


@pytest.mark.parametrize("d", catalog(), ids=lambda d: str(d.descriptor()))
def test_samples_strictly_inside(d):
    vals = d.sample(RngSpec(17, 5), 20000)
    assert np.all((vals > 0.0) & (vals < 1.0))


def test_boundary_hits_are_redrawn(monkeypatch):
    # Force the first draw block to contain an exact 0; the sampler must
    # replace the resulting boundary value from a derived stream.
    d = table([[0.0, 2.0], [1.0, 0.0]])  # inverse CDF maps u=0 to t=0
    real_block = density.uniform_block

    def poisoned(spec, offset, count):
        block = real_block(spec, offset, count).copy()
        block[0] = 0.0
        return block

    monkeypatch.setattr(density, "uniform_block", poisoned)
    vals = d.sample(RngSpec(3, 3), 8)
    assert vals.shape == (8,)
    assert np.all((vals > 0.0) & (vals < 1.0))


def test_degenerate_sampler_gives_up(monkeypatch):
    d = uniform()
    monkeypatch.setattr(density, "uniform_block", lambda s, o, c: np.zeros(c))
    monkeypatch.setattr(density, "uniform_at", lambda s, i: np.zeros(len(i)))
    with pytest.raises(RuntimeError, match="degenerate"):
        d.sample(RngSpec(1, 1), 4)


def test_sample_count_validation():
    with pytest.raises(ValueError):
        uniform().sample(RngSpec(1), 0)


# ----------------------------------------------------------------------
# mirror


def test_mirror_uniform_is_fixed_point():
    u = uniform()
    assert u.mirror() is u


def test_mirror_power_matches_formula():
    # power(1) has pdf 2t, so the mirror at 0.25 is 2 * 0.75.
    m = power(1.0).mirror()
    assert m.pdf(0.25) == pytest.approx(1.5, abs=1e-14)


@pytest.mark.parametrize(
    "d",
    [power(1.7), triangular(0.3), table([[0.1, 1.0], [0.4, 2.0], [1.0, 0.3]])],
    ids=("power", "triangular", "table"),
)
def test_mirror_pointwise_and_involution(d):
    m = d.mirror()
    assert np.max(np.abs(m.pdf(GRID) - d.pdf(1.0 - GRID))) < 1e-12
    back = m.mirror()
    assert np.max(np.abs(back.pdf(GRID) - d.pdf(GRID))) < 1e-12


def test_mirror_sampling_distribution():
    d = power(2.0)
    direct = 1.0 - d.sample(RngSpec(6, 6), 5000)
    mirrored = d.mirror().sample(RngSpec(6, 6), 5000)
    assert np.allclose(np.sort(direct), np.sort(mirrored), atol=1e-12)


# ----------------------------------------------------------------------
# symmetrize


def test_symmetrize_uniform_identity():
    u = uniform()
    assert u.symmetrize() is u


def test_symmetrize_linear_becomes_flat():
    g = power(1.0).symmetrize()  # (2t + 2(1-t)) / 2 = 1
    assert np.max(np.abs(g.pdf(GRID) - 1.0)) < 1e-12


def test_symmetrize_triangular_exact_reflection():
    g = triangular(0.3).symmetrize()
    # Exact equality at dyadic mirror pairs, where 1 - x is exact in floats.
    assert g.pdf(0.25) == g.pdf(0.75)
    assert g.pdf(0.2) == pytest.approx(g.pdf(0.8), abs=1e-14)
    assert np.max(np.abs(g.pdf(GRID) - g.pdf(1.0 - GRID))) < 1e-12


@pytest.mark.parametrize("d", [power(2.5), table([[0.0, 0.0], [0.3, 3.0], [1.0, 0.1]])])
def test_symmetrize_idempotent(d):
    g = d.symmetrize()
    gg = g.symmetrize()
    assert gg is g
    assert np.max(np.abs(gg.pdf(GRID) - g.pdf(GRID))) < 1e-12


def test_symmetrized_sampler_matches_pdf():
    d = power(1.0).symmetrize()
    vals = d.sample(RngSpec(12, 0), 200000)
    hist, edges = np.histogram(vals, bins=20, range=(0.0, 1.0), density=True)
    assert np.max(np.abs(hist - 1.0)) < 0.05  # flat to sampling noise


# ----------------------------------------------------------------------
# config round trips


@pytest.mark.parametrize("d", catalog(), ids=lambda d: str(d.descriptor()))
def test_config_round_trip(d):
    clone = from_config(d.descriptor())
    assert np.max(np.abs(clone.pdf(GRID) - d.pdf(GRID))) < 1e-12


def test_from_config_accepts_json_strings():
    d = from_config('{"kind": "power", "alpha": 1.0}')
    assert d.pdf(0.5) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        from_config('{"kind": "cauchy"}')


@given(st.floats(min_value=0.0, max_value=1.0), st.integers(0, 2 ** 32))
@settings(max_examples=25, deadline=None)
def test_triangular_samples_inside_property(mode, seed):
    d = triangular(mode)
    vals = d.sample(RngSpec(seed, 0), 64)
    assert np.all((vals > 0.0) & (vals < 1.0))
