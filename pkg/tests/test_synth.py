import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chromachord.engine import Quality
from chromachord.errors import ConfigError
from chromachord.synth import TriadSpec, note_frequency, synth_sine, synth_triad

from oracles import dft_pitch_class_profile, et_frequency


def test_a4_reference():
    assert note_frequency(9, 4) == 440.0


@pytest.mark.parametrize("pc, octave, hz", [(0, 4, 261.6256), (7, 3, 195.9977), (0, 1, 32.7032)])
def test_note_frequencies(pc, octave, hz):
    assert note_frequency(pc, octave) == pytest.approx(hz, abs=1e-3)
    assert note_frequency(pc, octave) == pytest.approx(et_frequency(12 * (octave + 1) + pc))


def test_g_major_spectrum_peaks_on_g_b_d():
    x = synth_triad(TriadSpec(7, Quality.MAJOR, duration=4.0))
    profile = dft_pitch_class_profile(x, 22050)
    assert set(np.argsort(profile)[-3:]) == {7, 11, 2}


def test_minor_triad_frequencies():
    spec = TriadSpec(9, Quality.MINOR, octave=3)
    np.testing.assert_allclose(spec.frequencies, [220.0, et_frequency(60), et_frequency(64)])


def test_zero_amplitude_is_silence():
    assert not synth_triad(TriadSpec(0, amplitude_per_note=0.0)).any()


def test_synthesis_is_deterministic():
    spec = TriadSpec(4, Quality.MINOR, duration=1.0)
    assert synth_triad(spec).tobytes() == synth_triad(spec).tobytes()


def test_clipping_spec_is_rejected():
    with pytest.raises(ConfigError):
        TriadSpec(0, amplitude_per_note=0.34)


def test_tones_above_nyquist_are_rejected():
    with pytest.raises(ConfigError):
        TriadSpec(0, octave=8, sample_rate=8000)


def test_fades_are_ten_milliseconds():
    x = synth_sine(2500.0, 1.0, 10000, amplitude=1.0)  # samples land on the peaks
    assert x[0] == 0.0
    assert np.max(np.abs(x[:50])) < 0.5
    assert np.max(np.abs(x[100:200])) > 0.99


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 11), st.sampled_from(list(Quality)), st.floats(0.0, 1 / 3))
def test_amplitude_bound(root, quality, amp):
    x = synth_triad(TriadSpec(root, quality, amplitude_per_note=amp, duration=0.25))
    assert np.max(np.abs(x)) <= 3 * amp + 1e-12
    assert len(x) == int(0.25 * 22050 + 0.5)
