import numpy as np
import pytest

from geoagency.bench import (
    compute_progress_auc,
    compute_rework_rate,
    compute_suggestion_bias,
    compute_time_to_threshold,
    f1_score,
    iou_score,
)
from geoagency.errors import EmptySamples, ShapeMismatch

from .metric_cases import (
    PROGRESS_AUC_CASES,
    QUALITY_CASES,
    REWORK_CASES,
    SUGGESTION_BIAS_CASES,
    TIME_TO_THRESHOLD_CASES,
)


@pytest.mark.parametrize("samples,tau,expected", TIME_TO_THRESHOLD_CASES)
def test_time_to_threshold_oracle(samples, tau, expected):
    assert compute_time_to_threshold(samples, tau) == expected


def test_time_to_threshold_empty():
    with pytest.raises(EmptySamples):
        compute_time_to_threshold([], 0.5)


@pytest.mark.parametrize("samples,t_max,expected", PROGRESS_AUC_CASES)
def test_progress_auc_oracle(samples, t_max, expected):
    got = compute_progress_auc(samples, t_max)
    assert got == pytest.approx(expected, abs=1e-12)
    assert 0.0 <= got <= 1.0


def test_progress_auc_empty():
    with pytest.raises(EmptySamples):
        compute_progress_auc([], 10)


@pytest.mark.parametrize("events,expected", REWORK_CASES)
def test_rework_rate_oracle(events, expected):
    got = compute_rework_rate(events)
    assert got == pytest.approx(expected, abs=1e-12)
    assert 0.0 <= got <= 1.0


@pytest.mark.parametrize("committed,expected", SUGGESTION_BIAS_CASES)
def test_suggestion_bias_oracle(committed, expected):
    got = compute_suggestion_bias(committed)
    if expected is None:
        assert got is None
    else:
        assert got == pytest.approx(expected, abs=1e-12)
        assert 0.0 <= got <= 1.0


@pytest.mark.parametrize("pred,ref,f1,iou", QUALITY_CASES)
def test_quality_oracle(pred, ref, f1, iou):
    assert f1_score(pred, ref) == pytest.approx(f1, abs=1e-12)
    assert iou_score(pred, ref) == pytest.approx(iou, abs=1e-12)


def test_quality_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        f1_score(np.zeros(3, dtype=bool), np.zeros(4, dtype=bool))
    with pytest.raises(ShapeMismatch):
        iou_score(np.zeros(3, dtype=bool), np.zeros(4, dtype=bool))
