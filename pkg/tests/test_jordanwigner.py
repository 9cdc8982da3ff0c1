import numpy as np
import pytest

from weylshift import jordanwigner as jw
from weylshift import seqgen, spinchain, words


def _random_word(rng, d, sites):
    width = int(rng.integers(1, 3))
    ss = sorted(int(s) for s in rng.choice(sites, size=width, replace=False))
    letters = []
    for s in ss:
        k = (int(rng.integers(0, d)), int(rng.integers(0, d)))
        if k == (0, 0):
            k = (0, 1)
        letters.append((s, k))
    return words.MultiIndex(d, tuple(letters))


def test_zero_label_embeds_as_identity():
    seq = seqgen.bernoulli(3, seed=2)
    assert jw.jw_embed(0, (0, 0), seq, T=3).factors == ()


def test_shift_covariance():
    # embedding at m is the 2-site translate of the embedding at m-1
    seq = seqgen.bernoulli(3, seed=2)
    a = jw.jw_embed(1, (2, 1), seq, T=4)
    b = jw.jw_embed(0, (2, 1), seq, T=4).shift(1)
    assert a.factors == b.factors


def test_json_round_trip():
    seq = seqgen.bernoulli(3, seed=2)
    a = jw.jw_embed(1, (2, 1), seq, T=4)
    assert jw.JWEmbedding.from_json(a.to_json()) == a


def test_sitewise_phases_match_algebraic_twists():
    # the doubled-chain embedding must reproduce every commutation phase
    rng = np.random.default_rng(3)
    for d in (2, 3, 5):
        seq = seqgen.bernoulli(d, seed=d)
        for _ in range(120):
            I = _random_word(rng, d, range(0, 3))
            J = _random_word(rng, d, range(0, 3))
            n = int(rng.integers(-2, 3))
            x = jw.jw_word(I, seq, 6)
            y = [e.shift(n) for e in jw.jw_word(J, seq, 6)]
            ph, res = jw.commutation_phase(x, y)
            expected = words.commutation_phase(I, J, n, seq).to_complex()
            assert abs(ph - expected) < 1e-9
            assert res < 1e-9


def test_full_dense_route_agrees():
    rng = np.random.default_rng(4)
    for d, mrange in ((2, 2), (3, 1)):
        seq = seqgen.bernoulli(d, seed=10 + d)
        for _ in range(30):
            m = int(rng.integers(-mrange, mrange + 1))
            k = (int(rng.integers(0, d)), int(rng.integers(1, d)))
            l = (int(rng.integers(1, d)), int(rng.integers(0, d)))
            T = max(abs(m), 1)
            x = [jw.jw_embed(0, k, seq, T)]
            y = [jw.jw_embed(m, l, seq, T)]
            win = jw.union_window(x + y)
            X, Y = jw.dense(x, win), jw.dense(y, win)
            c = np.trace((Y @ X).conj().T @ (X @ Y)) / X.shape[0]
            assert np.max(np.abs(X @ Y - c * (Y @ X))) < 1e-9
            ph, _ = jw.commutation_phase(x, y)
            expected = words.commutation_phase(
                words.MultiIndex.singleton(d, 0, k),
                words.MultiIndex.singleton(d, 0, l), m, seq).to_complex()
            assert abs(c - expected) < 1e-9
            assert abs(ph - c) < 1e-9


def test_direct_convention_is_measurably_different():
    # kept as a foil: pairing the tail against the untransposed matrix
    # produces k . (A m) instead of sigma(k, A m) and breaks the twists
    rng = np.random.default_rng(5)
    seq = seqgen.bernoulli(3, seed=13)
    devs = []
    for _ in range(60):
        k = (int(rng.integers(0, 3)), int(rng.integers(1, 3)))
        l = (int(rng.integers(1, 3)), int(rng.integers(0, 3)))
        m = int(rng.integers(1, 3))
        x = [jw.jw_embed(0, k, seq, m, convention="direct")]
        y = [jw.jw_embed(m, l, seq, m, convention="direct")]
        ph, _ = jw.commutation_phase(x, y)
        expected = words.commutation_phase(
            words.MultiIndex.singleton(3, 0, k),
            words.MultiIndex.singleton(3, 0, l), m, seq).to_complex()
        devs.append(abs(ph - expected))
    assert max(devs) > 0.5


def test_unknown_convention_rejected():
    with pytest.raises(ValueError):
        jw.jw_embed(0, (1, 0), seqgen.bernoulli(3, seed=0), 2, convention="wat")


@pytest.mark.parametrize("tag,bits", [
    ("thue-morse", seqgen.Bitstream.thue_morse()),
    ("random", seqgen.Bitstream.random(seed=9)),
])
def test_price_powers_letters_satisfy_bit_relations(tag, bits):
    T = 5
    letters = [jw.price_powers_letter(m, bits, T) for m in range(5)]
    win = jw.union_window(letters)
    dim = 2 ** (win[1] - win[0] + 1)
    ops = [jw.dense([e], win) for e in letters]
    g = bits.bits(0, 6)
    for E in ops:
        assert np.max(np.abs(E @ E - np.eye(dim))) < 1e-10
        assert np.max(np.abs(E - E.conj().T)) < 1e-10
    for i in range(5):
        for j in range(i + 1, 5):
            sign = (-1.0) ** g[j - i]
            assert np.max(np.abs(ops[i] @ ops[j] - sign * ops[j] @ ops[i])) < 1e-10


def test_price_powers_zero_bits_is_single_site():
    z = jw.price_powers_letter(2, seqgen.Bitstream.explicit("0"), T=5)
    assert z.factors == ((2, (1, 0)),)


def test_product_state_expectations():
    phi = jw.shift_eigenvector(3)
    seq = seqgen.bernoulli(3, seed=2)
    val, _ = jw.product_state_expectation([jw.jw_embed(0, (1, 2), seq, 4)], phi)
    assert abs(val) < 1e-12
    val_id, _ = jw.product_state_expectation([jw.jw_embed(0, (0, 0), seq, 4)], phi)
    assert abs(val_id - 1) < 1e-12
    with pytest.raises(ValueError):
        jw.product_state_expectation([jw.jw_embed(0, (1, 0), seq, 2)],
                                     np.array([1.0, 0.0, 1.0]))


def test_tail_magnitudes_decay_for_generic_state():
    rng = np.random.default_rng(6)
    seq = seqgen.bernoulli(3, seed=2)
    v = rng.normal(size=3) + 1j * rng.normal(size=3)
    v /= np.linalg.norm(v)
    prods = []
    for T in (5, 10, 20):
        _, mags = jw.product_state_expectation([jw.jw_embed(0, (1, 2), seq, T)], v)
        prods.append(float(np.prod(mags[: 2 * T])))
    assert prods[0] > prods[1] > prods[2]
    assert prods[2] < 1e-3


def test_dense_cap_enforced():
    seq = seqgen.bernoulli(2, seed=0)
    embs = [jw.jw_embed(0, (1, 1), seq, 8)]
    with pytest.raises(jw.DimensionCapExceeded):
        jw.dense(embs, jw.union_window(embs), cap=64)


def test_nested_commutator_of_price_powers_letters():
    bits = seqgen.Bitstream.explicit("1110")
    e = {m: jw.price_powers_letter(m, bits, T=3) for m in (0, 1, 3, 4)}
    win = jw.union_window(list(e.values()))
    ops = [jw.dense([e[m]], win) for m in (3, 0, 4, 1)]
    assert abs(float(np.linalg.norm(spinchain.multicommutator(ops), 2)) - 8.0) < 1e-9
    zbits = seqgen.Bitstream.explicit("0")
    ez = {m: jw.price_powers_letter(m, zbits, T=3) for m in (0, 1, 3, 4)}
    winz = jw.union_window(list(ez.values()))
    opsz = [jw.dense([ez[m]], winz) for m in (3, 0, 4, 1)]
    assert float(np.linalg.norm(spinchain.multicommutator(opsz), 2)) < 1e-12
