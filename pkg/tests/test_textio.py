import numpy as np
import pytest

from glyphforge.ifr import IfrWeights
from glyphforge.rng import make_rng
from glyphforge.textio import (
    TextFormatError,
    dump_feature,
    dump_ifr_weights,
    dump_matrix_bundle,
    dump_raw_gmm,
    parse_feature,
    parse_ifr_weights,
    parse_matrix_bundle,
    parse_raw_gmm,
)


def test_feature_round_trip():
    rng = make_rng(99, 0)
    m = rng.normal(size=(4, 7))
    assert np.array_equal(parse_feature(dump_feature(m)), m)


def test_feature_header_required():
    with pytest.raises(TextFormatError):
        parse_feature("2 2\n1 2\n3 4\n")


def test_feature_row_count_checked():
    with pytest.raises(TextFormatError):
        parse_feature("#glyphforge-feat v1\n2 2\n1 2\n")


def test_matrix_bundle_round_trip():
    rng = make_rng(99, 1)
    mats = {"a": rng.normal(size=(2, 3)), "b": rng.normal(size=(1, 4))}
    out = parse_matrix_bundle(dump_matrix_bundle(mats))
    assert set(out) == {"a", "b"}
    assert np.array_equal(out["a"], mats["a"])
    assert np.array_equal(out["b"], mats["b"])


def test_matrix_bundle_rejects_duplicates():
    text = "#glyphforge-ifr v1\na 1 1\n1.0\na 1 1\n2.0\n"
    with pytest.raises(TextFormatError):
        parse_matrix_bundle(text)


def test_matrix_bundle_rejects_truncation():
    with pytest.raises(TextFormatError):
        parse_matrix_bundle("#glyphforge-ifr v1\na 2 2\n1 2\n")


def test_ifr_weights_round_trip():
    rng = make_rng(99, 2)
    w = IfrWeights(
        w_q_img=rng.normal(size=(5, 3)),
        w_k_img=rng.normal(size=(5, 3)),
        w_k_seq=rng.normal(size=(4, 3)),
        w_v_seq=rng.normal(size=(4, 3)),
        gain=rng.normal(size=3),
        bias=rng.normal(size=3),
    )
    back = parse_ifr_weights(dump_ifr_weights(w))
    assert np.array_equal(back.w_q_img, w.w_q_img)
    assert np.array_equal(back.w_v_seq, w.w_v_seq)
    assert np.array_equal(back.gain, w.gain)
    assert np.array_equal(back.bias, w.bias)


def test_ifr_weights_missing_matrix():
    with pytest.raises(TextFormatError):
        parse_ifr_weights("#glyphforge-ifr v1\nq_img 1 1\n0.5\n")


def test_raw_gmm_round_trip():
    rng = make_rng(99, 3)
    raw = rng.normal(size=(5, 12))
    assert np.array_equal(parse_raw_gmm(dump_raw_gmm(raw)), raw)


def test_raw_gmm_width_validated():
    with pytest.raises(TextFormatError):
        parse_raw_gmm("#glyphforge-gmm v1\n1 2 3 4 5\n")


def test_raw_gmm_comments_skipped():
    raw = parse_raw_gmm("#glyphforge-gmm v1\n# step 0\n0 0 0 0 0 0\n")
    assert raw.shape == (1, 6)
