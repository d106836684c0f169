"""Tests for level continuation around closed eigenphase loops."""

import math

import numpy as np
import pytest

from defectline import (
    Channel,
    DegeneratePath,
    InconsistentShift,
    LevelTrajectory,
    PathSpec,
    UnitaryParams,
    loop_shift,
    trace_path,
    trajectory_shifts,
)
from defectline.spectrum import solve_channel

BASE = UnitaryParams(xi=2.2, rho=0.8)  # theta+ = 3.0, theta- = 1.4


def _traj(channel, start, end, floored=False):
    t = np.linspace(0.0, 1.0, 5)
    return LevelTrajectory(
        t_values=t,
        E_values=np.linspace(1.0, 2.0, 5),
        start_index=start,
        end_index=end,
        channel=channel,
        floored_out=floored,
    )


# ------------------------------------------------------------------ PathSpec


def test_pathspec_validation():
    ok = PathSpec(winding=(1, 0), base=BASE)
    assert ok.winding == (1, 0) and ok.n_steps == 256
    with pytest.raises(ValueError):
        PathSpec(winding=(1, 0), base=BASE, kind="radial")
    with pytest.raises(ValueError):
        PathSpec(winding=(1, 0), base=BASE, n_steps=32)
    with pytest.raises(ValueError):
        PathSpec(winding=(1, 0), base=BASE, levels_tracked=1)
    with pytest.raises(ValueError):
        PathSpec(winding=(0.5, 0), base=BASE)
    with pytest.raises(ValueError):
        PathSpec(winding=(1, 0, 0), base=BASE)
    with pytest.raises(ValueError):
        PathSpec(winding=(1, 0), base=BASE, l=-1.0)


# ----------------------------------------------------------------- tracing


def test_trivial_loop_returns_to_start():
    path = PathSpec(winding=(0, 0), base=BASE, n_steps=128, levels_tracked=6)
    trajectories = trace_path(path)
    assert len(trajectories) == 6
    for tr in trajectories:
        assert not tr.floored_out
        assert tr.end_index == tr.start_index
        assert tr.t_values[0] == 0.0 and tr.t_values[-1] == 1.0
        assert abs(tr.E_values[-1] - tr.E_values[0]) <= 1e-9 * (1.0 + abs(tr.E_values[0]))
    assert trajectory_shifts(trajectories, (0, 0)) == (0, 0)


def test_single_winding_shifts_only_that_channel():
    assert loop_shift(PathSpec(winding=(1, 0), base=BASE, n_steps=128, levels_tracked=6)) == (1, 0)
    assert loop_shift(PathSpec(winding=(0, 1), base=BASE, n_steps=128, levels_tracked=6)) == (0, 1)


def test_shift_is_additive_in_the_winding():
    for w in ((2, 0), (1, 1), (0, -1), (-1, 1)):
        path = PathSpec(winding=w, base=BASE, n_steps=128, levels_tracked=6)
        assert loop_shift(path) == w


def test_negative_winding_floors_bottom_branch():
    path = PathSpec(winding=(-1, 0), base=BASE, n_steps=128, levels_tracked=6)
    trajectories = trace_path(path)
    floored = [tr for tr in trajectories if tr.floored_out]
    assert len(floored) == 1
    assert floored[0].channel == "plus"
    assert floored[0].end_index == -1
    assert floored[0].t_values[-1] < 1.0  # the walk ended early for this one
    assert trajectory_shifts(trajectories, (-1, 0)) == (-1, 0)


def test_end_energies_close_on_the_ladder():
    path = PathSpec(winding=(1, 1), base=BASE, n_steps=128, levels_tracked=6)
    trajectories = trace_path(path)
    thetas = {"plus": BASE.theta_plus, "minus": BASE.theta_minus}
    for tr in trajectories:
        ladder = solve_channel(Channel(thetas[tr.channel]), tr.end_index + 1)
        expected = ladder[tr.end_index].E
        assert abs(tr.E_values[-1] - expected) <= 1e-9 * (1.0 + abs(expected))


def test_branches_never_cross_within_a_channel():
    path = PathSpec(winding=(1, 0), base=BASE, n_steps=128, levels_tracked=6)
    trajectories = trace_path(path)
    for ch in ("plus", "minus"):
        chans = sorted(
            (tr for tr in trajectories if tr.channel == ch),
            key=lambda tr: tr.E_values[0],
        )
        for lo, hi in zip(chans, chans[1:]):
            n = min(len(lo.E_values), len(hi.E_values))
            assert np.all(lo.E_values[:n] < hi.E_values[:n])
            assert np.array_equal(lo.t_values[:n], hi.t_values[:n])


def test_sample_count_and_time_range():
    path = PathSpec(winding=(1, 0), base=BASE, n_steps=128, levels_tracked=4)
    for tr in trace_path(path):
        assert len(tr.t_values) >= path.n_steps + 1
        assert np.all(np.diff(tr.t_values) > 0.0)
        assert tr.t_values[0] == 0.0 and tr.t_values[-1] == 1.0


def test_degenerate_start_is_rejected():
    with pytest.raises(DegeneratePath):
        trace_path(PathSpec(winding=(1, 0), base=UnitaryParams(0.0, 0.0), n_steps=128))


def test_geometry_is_respected():
    base = UnitaryParams(xi=2.2, rho=0.8)
    path = PathSpec(winding=(1, 0), base=base, n_steps=128, levels_tracked=4, l=1.6, L0=0.5)
    assert loop_shift(path) == (1, 0)


# ----------------------------------------------------- shift reconstruction


def test_shifts_from_synthetic_trajectories():
    trs = [_traj("plus", 0, 1), _traj("plus", 1, 2), _traj("minus", 0, 0)]
    assert trajectory_shifts(trs, (1, 0)) == (1, 0)


def test_conflicting_shifts_raise():
    trs = [_traj("plus", 0, 1), _traj("plus", 1, 1), _traj("minus", 0, 0)]
    with pytest.raises(InconsistentShift):
        trajectory_shifts(trs, (1, 0))


def test_no_survivors_on_wound_channel_raises():
    trs = [_traj("plus", 0, -1, floored=True), _traj("minus", 0, 0)]
    with pytest.raises(InconsistentShift):
        trajectory_shifts(trs, (-1, 0))


def test_no_survivors_on_unwound_channel_reads_zero():
    trs = [_traj("minus", 0, 0)]
    assert trajectory_shifts(trs, (0, 0)) == (0, 0)
