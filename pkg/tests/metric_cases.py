"""Hand-computed oracle cases for the four benchmark metrics.

Each case was worked out on paper from the metric definitions; these tables
feed both the unit tests and the acceptance suite. Q-curves are (t, q)
pairs; ledgers are compact event tuples.
"""

from geoagency.bench import EditEvent, EventKind, QualitySample
from geoagency.core import LabelOrigin, LabelStatus


def q(points):
    return [QualitySample(t=t, q=v, metric="f1") for t, v in points]


# (samples, tau, expected)
TIME_TO_THRESHOLD_CASES = [
    (q([(0, 0.0), (10, 0.4), (20, 0.7), (30, 0.9)]), 0.7, 20),
    (q([(0, 0.0), (10, 0.4), (20, 0.7), (30, 0.9)]), 0.95, None),
    (q([(0, 0.5)]), 0.5, 0),
    (q([(0, 0.0), (5, 0.2)]), 0.2, 5),
    (q([(0, 0.9), (10, 0.1)]), 0.8, 0),
    (q([(0, 0.0), (10, 0.79999)]), 0.8, None),
    (q([(0, 0.0), (10, 0.8), (20, 0.7), (30, 0.9)]), 0.8, 10),
    (q([(0, 1.0)]), 1.0, 0),
    (q([(5, 0.3), (15, 0.6), (25, 0.61)]), 0.6, 15),
    (q([(0, 0.0), (60, 0.5), (120, 0.5), (180, 0.94)]), 0.94, 180),
    (q([(0, 0.2), (10, 0.2), (20, 0.2)]), 0.3, None),
]

# (samples, t_max, expected)  -- trapezoid with last-value hold, / t_max
PROGRESS_AUC_CASES = [
    (q([(0, 1.0), (10, 1.0)]), 10, 1.0),
    (q([(0, 0.0), (10, 0.0)]), 10, 0.0),
    (q([(0, 0.0), (10, 1.0)]), 10, 0.5),
    # hold from t=10 to 20: (0.5*10 + 1.0*10)/20
    (q([(0, 0.0), (10, 1.0)]), 20, 0.75),
    # single sample holds across the whole window
    (q([(0, 0.4)]), 100, 0.4),
    # piecewise: trap(0..10: 0->0.5)=2.5, trap(10..20: 0.5->0.5)=5 => 7.5/20
    (q([(0, 0.0), (10, 0.5), (20, 0.5)]), 20, 0.375),
    # first sample after 0 holds backward: rectangle 0..5 at 0.2 then flat
    (q([(5, 0.2), (10, 0.2)]), 10, 0.2),
    # ramp then drop: trap(0..10:0->1)=5, trap(10..20:1->0)=5 => 10/20
    (q([(0, 0.0), (10, 1.0), (20, 0.0)]), 20, 0.5),
    # t_max == 0 degenerates to the sampled value
    (q([(0, 0.7)]), 0, 0.7),
    # hold beyond last sample: trap(0..10:0->0.6)=3, rect(10..40)=18 => 21/40
    (q([(0, 0.0), (10, 0.6)]), 40, 0.525),
    # three segments: 0..10:0->0.2 =1, 10..30:0.2->0.8 =10, 30..40:0.8 =8 => 19/40
    (q([(0, 0.0), (10, 0.2), (30, 0.8)]), 40, 0.475),
]


def ev(kind, target="f", prior_status=None):
    return EditEvent(
        t=0,
        kind=kind,
        target=target,
        origin=LabelOrigin.MANUAL,
        label="x",
        prior_status=prior_status,
    )


C, O, D, A, R = (
    EventKind.CREATE,
    EventKind.OVERWRITE,
    EventKind.DELETE,
    EventKind.ACCEPT,
    EventKind.REJECT,
)

# (events, expected rework rate)
REWORK_CASES = [
    ([ev(C) for _ in range(5)], 0.0),
    ([], 0.0),
    ([ev(O) for _ in range(3)] + [ev(C) for _ in range(7)], 0.3),
    ([ev(O)], 1.0),
    ([ev(C), ev(O)], 0.5),
    # delete of a committed feature counts as rework
    ([ev(C), ev(D, prior_status=LabelStatus.COMMITTED)], 0.5),
    # delete of a suggested feature does not
    ([ev(C), ev(D, prior_status=LabelStatus.SUGGESTED)], 0.0),
    ([ev(A), ev(A), ev(R), ev(O)], 0.25),
    # commit and attribute events are not edits
    ([ev(EventKind.COMMIT), ev(EventKind.ATTRIBUTE), ev(C)], 0.0),
    ([ev(C), ev(C), ev(O), ev(D, prior_status=LabelStatus.COMMITTED)], 0.5),
    ([ev(A) for _ in range(8)] + [ev(O), ev(O)], 0.2),
]


def triples(sugg_errors, manual_errors, correct=0):
    """Build committed triples from error-category count dicts."""
    out = []
    for (assigned, true), count in sugg_errors.items():
        out.extend([(assigned, true, LabelOrigin.PROPAGATION)] * count)
    for (assigned, true), count in manual_errors.items():
        out.extend([(assigned, true, LabelOrigin.MANUAL)] * count)
    out.extend([("a", "a", LabelOrigin.MANUAL)] * correct)
    return out


# (committed triples, expected bias)
SUGGESTION_BIAS_CASES = [
    (triples({("a", "b"): 2}, {("a", "b"): 4}), 0.0),  # identical histograms
    (triples({("a", "b"): 3}, {("b", "a"): 3}), 1.0),  # disjoint categories
    # sugg {(a,b):2,(b,a):2} vs manual {(a,b):4}: 0.5*(|0.5-1| + |0.5-0|) = 0.5
    (triples({("a", "b"): 2, ("b", "a"): 2}, {("a", "b"): 4}), 0.5),
    (triples({}, {("a", "b"): 1}), None),  # no suggestion errors
    (triples({("a", "b"): 1}, {}), None),  # no manual errors
    ([], None),
    # correct labels are ignored entirely
    (triples({("a", "b"): 1}, {("a", "b"): 1}, correct=10), 0.0),
    # 0.5*(|0.75-0.25| + |0.25-0.75|) = 0.5
    (triples({("a", "b"): 3, ("b", "a"): 1}, {("a", "b"): 1, ("b", "a"): 3}), 0.5),
    # three categories: sugg (1/3 each), manual all (a,b):
    # 0.5*(|1/3-1| + 1/3 + 1/3) = 2/3
    (triples({("a", "b"): 1, ("b", "a"): 1, ("a", "c"): 1}, {("a", "b"): 3}), 2.0 / 3.0),
    # scale invariance: doubling counts changes nothing
    (triples({("a", "b"): 4, ("b", "a"): 4}, {("a", "b"): 8}), 0.5),
    # 0.5*(|0.9-0.5|+|0.1-0.5|) = 0.4
    (triples({("a", "b"): 9, ("b", "a"): 1}, {("a", "b"): 5, ("b", "a"): 5}), 0.4),
]

# (predicted mask, reference mask, expected f1, expected iou)
def _mask(ones, size=10):
    m = [False] * size
    for i in ones:
        m[i] = True
    return m


QUALITY_CASES = [
    (_mask(range(10)), _mask(range(10)), 1.0, 1.0),
    (_mask([0, 1]), _mask([8, 9]), 0.0, 0.0),
    # TP=8, FP=2, FN=2 over 12 cells: F1 = 16/20 = 0.8, IoU = 8/12
    (_mask(range(10), 12), _mask(list(range(8)) + [10, 11], 12), 0.8, 8.0 / 12.0),
    (_mask([]), _mask([]), 1.0, 1.0),
    (_mask([]), _mask([0]), 0.0, 0.0),
    (_mask([0]), _mask([]), 0.0, 0.0),
    # TP=1 FP=0 FN=1: F1=2/3, IoU=1/2
    (_mask([0]), _mask([0, 1]), 2.0 / 3.0, 0.5),
    # TP=3 FP=3 FN=0: F1=2*3/(6+3)=2/3, IoU=3/6
    (_mask([0, 1, 2, 3, 4, 5]), _mask([0, 1, 2]), 2.0 / 3.0, 0.5),
    # TP=2 FP=2 FN=2: F1=0.5, IoU=2/6
    (_mask([0, 1, 2, 3]), _mask([2, 3, 4, 5]), 0.5, 2.0 / 6.0),
    (_mask(range(9)), _mask(range(10)), 18.0 / 19.0, 0.9),
]
