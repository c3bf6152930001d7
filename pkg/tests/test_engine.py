import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from chromachord.audio_io import AudioChunk
from chromachord.chroma import Chromagram, chromagram
from chromachord.engine import (
    ChromaVector,
    EngineConfig,
    Quality,
    Strength,
    average_chroma,
    chord_gate,
    classify_third,
    confidence,
    emphasize,
    estimate_chord,
    estimate_from_emphasis,
    fifth_of,
    find_root,
    significant_tones,
    strength_band,
)
from chromachord.errors import ConfigError, ContractError, NoRootError, StructuralError
from chromachord.synth import TriadSpec, synth_triad

from oracles import direct_confidence, first_argmax, loop_mean, reference_band

unit_vectors = arrays(np.float64, 12, elements=st.floats(0, 1))


def vec(**values):
    names = ["C", "Cs", "D", "Ds", "E", "F", "Fs", "G", "Gs", "A", "As", "B"]
    v = np.zeros(12)
    for k, x in values.items():
        v[names.index(k)] = x
    return ChromaVector(v, "emph")


# -- averaging and emphasis --------------------------------------------------------


def test_constant_row_averages_to_itself():
    m = np.zeros((12, 7))
    m[3] = 0.6
    assert average_chroma(Chromagram(m, 1.0))[3] == pytest.approx(0.6)


def test_two_frame_average():
    m = np.zeros((12, 2))
    m[0] = [1.0, 0.0]
    assert average_chroma(Chromagram(m, 1.0))[0] == 0.5


def test_average_matches_loop_oracle():
    m = np.random.default_rng(7).uniform(0, 1, (12, 50))
    np.testing.assert_allclose(average_chroma(Chromagram(m, 1.0)).values, loop_mean(m), atol=1e-12)


def test_zero_frames_cannot_be_averaged():
    with pytest.raises(StructuralError):
        average_chroma(Chromagram(np.zeros((12, 0)), 1.0))


def test_emphasis_squares():
    out = emphasize(ChromaVector([0.5, 1.0, 0.0] + [0.0] * 9))
    assert list(out.values[:3]) == [0.25, 1.0, 0.0]
    assert out.stage == "emph"


@given(unit_vectors)
def test_emphasis_preserves_order(v):
    order = np.argsort(-v, kind="stable")
    e = emphasize(ChromaVector(v)).values
    assert np.all(np.diff(e[order]) <= 0)


@given(unit_vectors)
def test_emphasis_preserves_argmax(v):
    assume(v.max() ** 2 > 0)  # squaring must not underflow
    assert find_root(emphasize(ChromaVector(v))) == first_argmax(list(v))


# -- thresholds ------------------------------------------------------------------------


def test_tone_threshold_is_inclusive():
    assert significant_tones(vec(E=0.15)) == {4}
    assert significant_tones(vec(E=0.1499999)) == frozenset()
    assert significant_tones(ChromaVector(np.zeros(12))) == frozenset()


def test_gate_passes_with_two_strong_tones():
    assert chord_gate(vec(C=0.25, G=0.21, E=0.19)) == (True, 2)


def test_gate_fails_with_one_strong_tone():
    assert chord_gate(vec(A=0.9)) == (False, 1)


def test_gate_threshold_is_inclusive():
    assert chord_gate(vec(C=0.2, D=0.2)) == (True, 2)
    assert chord_gate(vec(C=0.2, D=0.1999999)) == (False, 1)


def test_gate_respects_n_min():
    cfg = EngineConfig(n_min=3)
    assert chord_gate(vec(C=0.5, E=0.5), cfg) == (False, 2)


# -- root, third, fifth --------------------------------------------------------------------


def test_root_is_argmax():
    assert find_root(vec(G=0.9, B=0.5, D=0.4)) == 7


def test_root_tie_breaks_low():
    assert find_root(ChromaVector(np.full(12, 0.3))) == 0


def test_all_zero_has_no_root():
    with pytest.raises(NoRootError):
        find_root(ChromaVector(np.zeros(12)))


@given(unit_vectors, st.permutations(range(12)))
def test_root_follows_permutation(v, perm):
    assume(v.max() > 0 and np.count_nonzero(v == v.max()) == 1)
    perm = np.array(perm)
    permuted = np.empty(12)
    permuted[perm] = v
    assert find_root(ChromaVector(permuted)) == perm[find_root(ChromaVector(v))]


def test_g_major_third():
    assert classify_third(vec(G=0.9, B=0.4, As=0.1), 7) is Quality.MAJOR


def test_a_minor_third_wraps():
    assert classify_third(vec(A=0.9, C=0.5), 9) is Quality.MINOR


def test_equal_thirds_are_minor():
    assert classify_third(vec(C=0.9, E=0.3, Ds=0.3), 0) is Quality.MINOR


@pytest.mark.parametrize("root, fifth", [(7, 2), (0, 7), (6, 1), (11, 6)])
def test_fifth(root, fifth):
    assert fifth_of(root) == fifth


# -- confidence and bands --------------------------------------------------------------------


def test_symmetric_thirds_give_zero_confidence():
    c_raw, c_pct = confidence(vec(C=0.9, E=0.3, Ds=0.3), 0)
    assert c_raw == pytest.approx(0.5, abs=1e-5)
    assert c_pct == pytest.approx(0.0, abs=1e-3)
    assert strength_band(c_pct) is Strength.VERY_WEAK


def test_one_sided_thirds_are_very_strong():
    c_raw, c_pct = confidence(vec(C=0.9, E=0.5), 0)
    assert c_raw == pytest.approx(0.5 / (0.5 + 1e-6), abs=1e-12)
    assert c_pct == pytest.approx(99.9996, abs=1e-4)
    assert strength_band(c_pct) is Strength.VERY_STRONG


def test_confidence_matches_direct_evaluation():
    v = vec(C=0.9, E=0.3, Ds=0.1)
    expected = direct_confidence(v.values, 0)
    got = confidence(v, 0)
    assert got[0] == pytest.approx(expected[0], abs=1e-9)
    assert got[1] == pytest.approx(expected[1], abs=1e-9)
    # hand value: 0.3 / 0.400001 = 0.74999813, |2c-1| = 49.99963 %
    assert got[1] == pytest.approx(49.999625, abs=1e-6)


def test_both_thirds_zero_is_finite():
    assert confidence(vec(C=1.0, G=1.0), 0) == (0.0, 100.0)


@pytest.mark.parametrize(
    "c_pct, band",
    [
        (100.0, Strength.VERY_STRONG), (95.0, Strength.VERY_STRONG), (94.999, Strength.STRONG),
        (80.0, Strength.STRONG), (79.999, Strength.MODERATE), (60.0, Strength.MODERATE),
        (59.999, Strength.UNCERTAIN), (40.0, Strength.UNCERTAIN), (39.999, Strength.WEAK),
        (20.0, Strength.WEAK), (19.999, Strength.VERY_WEAK), (0.0, Strength.VERY_WEAK),
    ],
)
def test_strength_band_boundaries(c_pct, band):
    assert strength_band(c_pct) is band


@pytest.mark.parametrize("bad", [-0.001, 100.001, float("nan"), float("inf")])
def test_strength_band_domain(bad):
    with pytest.raises(ContractError):
        strength_band(bad)


@given(st.floats(0, 100))
def test_bands_partition_the_range(c_pct):
    assert strength_band(c_pct).key == reference_band(c_pct)


def test_strength_names():
    assert Strength.VERY_STRONG.key == "VeryStrong"
    assert Strength.VERY_STRONG.label == "Very Strong"
    assert Strength.parse("very strong") is Strength.VERY_STRONG
    assert Strength.parse("Moderate") is Strength.MODERATE
    with pytest.raises(ValueError):
        Strength.parse("Loud")


@given(st.floats(0.0, 1.0), st.floats(0.01, 1.0), st.floats(0.01, 1.0))
def test_confidence_grows_with_third_imbalance(split_a, split_b, total):
    # at a fixed sum, c_pct is monotone in |maj - min|
    a, b = sorted((split_a, split_b))
    lo = confidence(vec(C=1.0, E=total * (0.5 + a / 2), Ds=total * (0.5 - a / 2)), 0)[1]
    hi = confidence(vec(C=1.0, E=total * (0.5 + b / 2), Ds=total * (0.5 - b / 2)), 0)[1]
    assert hi >= lo - 1e-9


@given(unit_vectors, st.floats(0.1, 10))
def test_confidence_is_scale_invariant_without_epsilon(v, a):
    cfg = EngineConfig(epsilon=1e-300)
    assume(v[3] + v[4] > 1e-3)
    base = confidence(ChromaVector(v), 0, cfg)
    scaled = confidence(ChromaVector(a * a * v), 0, cfg)
    assert scaled[1] == pytest.approx(base[1], abs=1e-9)


def test_zero_confidence_iff_equal_thirds():
    exact = EngineConfig(epsilon=1e-300)
    assert confidence(vec(C=1, E=0.4, Ds=0.4), 0, exact)[1] == 0.0
    assert confidence(vec(C=1, E=0.4, Ds=0.39), 0, exact)[1] > 1
    # the guard term alone moves equal thirds by about eps / (2 * third)
    assert confidence(vec(C=1, E=0.4, Ds=0.4), 0)[1] == pytest.approx(1.25e-4, rel=1e-3)


# -- composition ------------------------------------------------------------------------------


def test_silence_is_no_chord():
    assert estimate_chord(Chromagram(np.zeros((12, 10)), 1.0)) is None


def test_single_tone_is_no_chord():
    m = np.zeros((12, 10))
    m[5] = 1.0
    assert estimate_chord(Chromagram(m, 1.0)) is None


def test_estimate_carries_significant_tones():
    est = estimate_from_emphasis(vec(G=0.9, B=0.4, D=0.3, A=0.16, E=0.1))
    assert (est.root, est.quality, est.fifth) == (7, Quality.MAJOR, 2)
    assert est.significant_tones == {7, 11, 2, 9}
    assert est.name == "G Major" and est.third == 11


def test_synthesized_g_major():
    x = synth_triad(TriadSpec(7, Quality.MAJOR, duration=2.0))
    est = estimate_chord(chromagram(AudioChunk(x, 22050, 0.0)))
    assert (est.root, est.quality, est.fifth) == (7, Quality.MAJOR, 2)


@given(unit_vectors)
def test_estimation_is_deterministic(v):
    a = estimate_from_emphasis(ChromaVector(v))
    b = estimate_from_emphasis(ChromaVector(v.copy()))
    assert a == b


@given(unit_vectors, st.integers(0, 11))
def test_rotation_equivariance(v, k):
    emph = ChromaVector(v, "emph")
    base = estimate_from_emphasis(emph)
    assume(base is not None and np.count_nonzero(v == v.max()) == 1)
    rotated = estimate_from_emphasis(emph.rotate(k))
    assert rotated.root == (base.root + k) % 12
    assert rotated.fifth == (base.fifth + k) % 12
    assert (rotated.quality, rotated.c_pct, rotated.strength) == (base.quality, base.c_pct, base.strength)


@pytest.mark.parametrize(
    "kwargs",
    [{"tau_tone": 0}, {"tau_tone": 0.3, "tau_chord": 0.2}, {"tau_chord": 1.0}, {"n_min": 0}, {"epsilon": 0}],
)
def test_engine_config_validation(kwargs):
    with pytest.raises(ConfigError):
        EngineConfig(**kwargs)


def test_chroma_vector_validation():
    with pytest.raises(StructuralError):
        ChromaVector(np.zeros(11))
    with pytest.raises(StructuralError):
        ChromaVector(np.full(12, -0.1))
