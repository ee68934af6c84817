import numpy as np
import pytest
from hypothesis import given, strategies as st

from lpqlab import (
    InvalidInput,
    InvalidParameter,
    UnsupportedModel,
    build_cyclic,
    build_heisenberg_spectral,
    build_su2,
    build_torus,
    enumerate_polyhedron,
    forward_transform,
    inverse_transform,
    lp_norm,
    partial_sum,
    plancherel_defect,
)
from lpqlab.fourier import (
    GroupFunction,
    SymbolField,
    character,
    constant,
    hs_norm_sq,
    random_band_limited,
    random_symbol,
    zero_symbol,
)
from oracles import dense_dft, dense_forward_su2, dense_inverse_su2


def block_err(a, b):
    return max(float(np.abs(x - y).max()) for x, y in zip(a, b))


def test_cyclic_spike():
    m = build_cyclic(3)
    f = GroupFunction(m, np.array([3.0, 0.0, 0.0]))
    assert block_err(forward_transform(f).blocks, [np.ones((1, 1))] * 3) < 1e-15
    g = inverse_transform(SymbolField(m, tuple(np.ones((1, 1), complex) for _ in m.dual)))
    assert np.allclose(g.values, [3, 0, 0])


def test_cyclic_matches_dense_dft(rng):
    m = build_cyclic(12)
    f = GroupFunction(m, rng.standard_normal(12) + 1j * rng.standard_normal(12))
    ks = [p.highest_weight[0] for p in m.dual]
    dense = dense_dft(f.values, ks)
    got = np.array([b[0, 0] for b in forward_transform(f).blocks])
    assert np.abs(got - dense).max() < 1e-14


def test_su2_matches_dense_sums(rng):
    m = build_su2(1)
    f = random_band_limited(m, rng)
    got = forward_transform(f).blocks
    assert block_err(got, dense_forward_su2(m, f.values)) < 1e-12
    sym = random_symbol(m, rng)
    assert np.abs(inverse_transform(sym).values - dense_inverse_su2(m, sym.blocks)).max() < 1e-12


def test_su2_character_half():
    m = build_su2(0.5)
    chi = character(m, m.dual[1])
    fh = forward_transform(chi)
    assert np.abs(fh.blocks[1] - np.eye(2) / 2).max() < 1e-14
    assert np.abs(fh.blocks[0]).max() < 1e-14
    assert abs(lp_norm(chi, 2) - 1) < 1e-13


def test_constant_goes_to_trivial():
    for m in (build_cyclic(5), build_torus(2, 1), build_su2(1)):
        fh = forward_transform(constant(m))
        assert abs(fh.blocks[0][0, 0] - 1) < 1e-13
        assert all(np.abs(b).max() < 1e-13 for b in fh.blocks[1:])


@pytest.mark.parametrize("model", [build_cyclic(64), build_torus(1, 4), build_torus(2, 3), build_su2(3)],
                         ids=["Z64", "T1", "T2", "su2_3"])
def test_plancherel_and_round_trip(model, rng):
    for _ in range(10):
        f = random_band_limited(model, rng)
        assert plancherel_defect(f) <= 1e-9
        back = inverse_transform(forward_transform(f))
        assert np.abs(back.values - f.values).max() <= 1e-10
    assert plancherel_defect(constant(model, 0.0)) == 0.0


def test_lp_norms():
    m = build_cyclic(2)
    assert lp_norm(GroupFunction(m, np.array([1.0, -1.0])), 1) == 1.0
    c = constant(build_su2(1), 2.5)
    for p in (1, 1.5, 2, 7, np.inf):
        assert abs(lp_norm(c, p) - 2.5) < 1e-12
    with pytest.raises(InvalidParameter):
        lp_norm(c, 0.5)


def test_partial_sums():
    m = build_su2(1)
    f = character(m, m.dual[1]) + character(m, m.dual[2])
    s = partial_sum(f, enumerate_polyhedron(m, 1))
    assert np.abs(s.values - character(m, m.dual[1]).values).max() < 1e-12
    assert np.abs(partial_sum(f, m.dual).values - f.values).max() < 1e-12
    other = build_su2(2)
    with pytest.raises(InvalidParameter):
        partial_sum(f, [other.dual[4]])


@given(st.integers(0, 2**31 - 1), st.integers(1, 6))
def test_partial_sum_contracts_and_is_idempotent(seed, k):
    m = build_su2(1.5)
    rng = np.random.default_rng(seed)
    f = random_band_limited(m, rng)
    Q = m.dual[:k]
    s = partial_sum(f, Q)
    assert np.abs(partial_sum(s, Q).values - s.values).max() < 1e-10
    assert lp_norm(s, 2) <= lp_norm(f, 2) * (1 + 1e-12)


@given(st.integers(0, 2**31 - 1), st.integers(0, 15))
def test_shift_covariance_on_cyclic(seed, a):
    m = build_cyclic(16)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(16)
    f, g = GroupFunction(m, v), GroupFunction(m, np.roll(v, a))
    fa = np.array([b[0, 0] for b in forward_transform(f).blocks])
    ga = np.array([b[0, 0] for b in forward_transform(g).blocks])
    assert np.allclose(np.abs(fa), np.abs(ga), atol=1e-12)


@given(st.integers(0, 2**31 - 1), st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_linearity(seed, c):
    m = build_su2(1)
    rng = np.random.default_rng(seed)
    f, g = random_band_limited(m, rng), random_band_limited(m, rng)
    lhs = forward_transform(f * c + g).blocks
    rhs = [c * a + b for a, b in zip(forward_transform(f).blocks, forward_transform(g).blocks)]
    assert block_err(lhs, rhs) < 1e-10 * (1 + abs(c))


def test_errors():
    m = build_cyclic(4)
    with pytest.raises(InvalidInput):
        GroupFunction(m, np.zeros(3))
    with pytest.raises(InvalidInput):
        SymbolField(m, (np.zeros((1, 1)),))
    with pytest.raises(InvalidInput):
        SymbolField(m, tuple(np.full((1, 1), np.nan) for _ in m.dual))
    h = build_heisenberg_spectral(1, [(1.0, 1.0)], 2)
    with pytest.raises(UnsupportedModel):
        inverse_transform(zero_symbol(h))


def test_zero_symbol_inverts_to_zero():
    m = build_su2(1)
    assert np.all(inverse_transform(zero_symbol(m)).values == 0)
    assert hs_norm_sq(zero_symbol(m)) == 0
