import numpy as np
import pytest

import mlwin


def test_hann_is_symmetric_with_half_latency():
    w = mlwin.cosine_window([0.5, 0.5], 65)
    assert len(w) == 65
    assert w.is_symmetric()
    assert mlwin.intrinsic_latency(w) == pytest.approx(0.5 * w.duration)


def test_hand_oracle():
    m = mlwin.eps_mp_transform(mlwin.Window(np.array([1.0, 2.5, 1.0])), 0.0, 64)
    np.testing.assert_allclose(m.observation_order(), [2.0, 2.0, 0.5], atol=1e-6)


def test_mp_flat_top_latency():
    w = mlwin.cosine_window([0.28, 0.52, 0.20], 65)
    m = mlwin.eps_mp_transform(w)
    assert mlwin.intrinsic_latency(m) / m.duration == pytest.approx(0.331, abs=0.005)
    # Magnitude is preserved up to the epsilon floor.
    a = np.abs(np.fft.rfft(w.taps, 4096))
    b = np.abs(np.fft.rfft(m.taps, 4096))
    assert np.max(np.abs(a - b)) / a.max() < 1e-3


def test_latency_table_rows():
    rows = mlwin.latency_table()
    assert [round(r["t_l"], 2) for r in rows] == [0.5, 0.33, 0.29, 0.32]


def test_root_check_verdicts():
    hann = mlwin.cosine_window([0.5, 0.5], 32)
    assert mlwin.check_roots(hann.taps)["all_on_circle"]
    flat = mlwin.cosine_window([0.28, 0.52, 0.20], 32)
    r = mlwin.check_roots(flat.taps)
    assert not r["all_on_circle"]
    assert r["witnesses"]


def test_sst_tone_concentrates():
    fs = 5512.5
    x = np.cos(2 * np.pi * 440.0 * np.arange(8000) / fs)
    w = mlwin.cosine_window([0.5, 0.5], 256, 1 / fs)
    S, axes = mlwin.tfr(x, fs, w, kind="sst", hop=16)
    assert S.shape == (axes["frames"], axes["bins"])
    k0 = int(round(440.0 / axes["bin_hz"]))
    near = S[:, k0 - 1 : k0 + 2].sum(axis=1)
    assert np.all(near >= 0.95 * S.sum(axis=1))


def test_onsets_on_clean_corpus():
    x, truth = mlwin.onset_corpus(3, 10)
    w = mlwin.cosine_window([0.42, 0.5, 0.08], 165, 1 / 5512.5)
    r = mlwin.detect_onsets(x, 5512.5, w)
    assert mlwin.evaluate(r["onsets"], truth)["f_score"] == 1.0


def test_errors_carry_their_kind():
    with pytest.raises(mlwin.MlwinError) as e:
        mlwin.eps_mp_transform(mlwin.Window(np.array([1.0, 1.0])), 0.0)
    assert e.value.kind == "zero-magnitude"
    with pytest.raises(mlwin.MlwinError):
        mlwin.eps_mp_transform(mlwin.Window(np.array([1.0, 2.0])), -1.0)
