import numpy as np
import pytest

from glyphforge.annotate import AnnotateConfig, pseudo_annotate
from glyphforge.errors import LengthMismatch, StrokeBoundaryMismatch
from glyphforge.format6 import Control, Point6, Trajectory

D, E, C, W = (
    Control.DRAW,
    Control.END_STROKE,
    Control.END_STROKE_CONNECTED,
    Control.END_WRITING,
)


def traj(spec):
    """spec: list of (x, y, control)."""
    return Trajectory(tuple(Point6(x, y, c) for x, y, c in spec))


def two_strokes(gap, ref_gap):
    """Two strokes whose boundary gap is ``gap`` in the styled trajectory
    and ``ref_gap`` in the reference."""
    t = traj([(0.0, 0.0, D), (0.1, 0.0, E), (0.1 + gap, 0.0, D), (0.5, 0.5, W)])
    r = traj([(0.0, 0.0, D), (0.1, 0.0, E), (0.1 + ref_gap, 0.0, D), (0.5, 0.5, W)])
    return t, r


class TestRule:
    def test_tight_gap_wide_reference_connects(self):
        t, r = two_strokes(gap=0.0, ref_gap=0.5)
        out = pseudo_annotate(t, r, AnnotateConfig(0.1))
        assert out.points[1].control is C

    def test_tight_gap_tight_reference_stays_plain(self):
        t, r = two_strokes(gap=0.0, ref_gap=0.0)
        out = pseudo_annotate(t, r, AnnotateConfig(0.1))
        assert out.points[1].control is E

    def test_three_stroke_case(self):
        # boundary gaps (0.05, 0.5) in the styled glyph, (0.5, 0.5) in the
        # reference, threshold 0.1: first pair connects, second does not
        t = traj(
            [
                (0.0, 0.0, D), (0.10, 0.0, E),
                (0.15, 0.0, D), (0.30, 0.0, E),
                (0.80, 0.0, D), (0.90, 0.0, W),
            ]
        )
        r = traj(
            [
                (0.0, 0.0, D), (0.10, 0.0, E),
                (0.60, 0.0, D), (0.30, 0.0, E),
                (0.80, 0.0, D), (0.90, 0.0, W),
            ]
        )
        out = pseudo_annotate(t, r, AnnotateConfig(0.1))
        assert out.points[1].control is C
        assert out.points[3].control is E

    def test_previously_connected_labels_rechecked(self):
        t, r = two_strokes(gap=0.0, ref_gap=0.0)
        relabeled = traj(
            [(p.x, p.y, C if p.control is E else p.control) for p in t.points]
        )
        out = pseudo_annotate(relabeled, r, AnnotateConfig(0.1))
        assert out.points[1].control is E


class TestProperties:
    def test_only_stroke_end_labels_change(self):
        t, r = two_strokes(gap=0.0, ref_gap=0.5)
        out = pseudo_annotate(t, r, AnnotateConfig(0.1))
        assert np.array_equal(out.coords(), t.coords())
        assert len(out) == len(t)
        for a, b in zip(out.points, t.points):
            if a.control is not b.control:
                assert {a.control, b.control} <= {E, C}

    def test_monotone_in_threshold(self):
        # boundary k gets gap gaps[k]; reference gaps held far above
        # every probed threshold
        gaps = [0.02, 0.06, 0.12, 0.2]
        xs = [0.0]
        controls = [D]
        x = 0.0
        for g in gaps:
            x += 0.05
            xs.append(x)
            controls.append(E)
            x += g
            xs.append(x)
            controls.append(D)
        xs.append(x + 0.02)
        controls.append(W)
        t = traj([(x_, 0.0, c) for x_, c in zip(xs, controls)])
        # zigzag between opposite corners: every reference gap is ~2.5
        r = traj(
            [
                ((-0.9, -0.9, c) if k % 2 == 0 else (0.9, 0.9, c))
                for k, c in enumerate(controls)
            ]
        )
        connected_sets = []
        for thr in (0.05, 0.1, 0.15, 0.3):
            out = pseudo_annotate(t, r, AnnotateConfig(thr))
            connected_sets.append(
                {k for k, p in enumerate(out.points) if p.control is C}
            )
        for small, big in zip(connected_sets, connected_sets[1:]):
            assert small <= big


class TestValidation:
    def test_length_mismatch(self):
        t, _ = two_strokes(0.0, 0.5)
        short = traj([(0.0, 0.0, D), (0.1, 0.0, W)])
        with pytest.raises(LengthMismatch):
            pseudo_annotate(t, short, AnnotateConfig(0.1))

    def test_stroke_boundary_mismatch(self):
        t, _ = two_strokes(0.0, 0.5)
        r = traj([(0.0, 0.0, D), (0.1, 0.0, D), (0.1, 0.0, D), (0.5, 0.5, W)])
        with pytest.raises(StrokeBoundaryMismatch):
            pseudo_annotate(t, r, AnnotateConfig(0.1))

    def test_threshold_validated(self):
        with pytest.raises(ValueError):
            AnnotateConfig(0.0)
