import math

import numpy as np
import pytest

from rootlift.base import (BaseSpaceError, identity_selfmap,
                           make_circle, make_graph, make_interval,
                           make_torus2, sample_selfmap)


def test_interval_smallest():
    base = make_interval(2)
    assert base.n_samples == 2
    assert base.coords[0] == 0.0 and base.coords[1] == 1.0
    assert base.edges == [(0, 1)]
    assert base.loop_basis == []


def test_interval_uniform_grid():
    base = make_interval(5)
    assert np.allclose(base.coords, [0, 0.25, 0.5, 0.75, 1])
    assert base.n_edges == 4
    assert base.loop_basis == []


def test_interval_large():
    base = make_interval(1001)
    assert base.n_samples == 1001 and base.n_edges == 1000


def test_interval_rejects_small():
    with pytest.raises(BaseSpaceError):
        make_interval(1)


def test_circle_angles_and_loop():
    base = make_circle(4)
    assert np.allclose(base.coords, [0, math.pi / 2, math.pi, 3 * math.pi / 2])
    assert base.n_edges == 4
    assert len(base.loop_basis) == 1
    assert len(base.loop_basis[0]) == 4


def test_circle_smallest_and_large():
    assert make_circle(3).n_edges == 3
    big = make_circle(2000)
    assert big.n_edges == 2000
    assert len(big.loop_basis[0]) == 2000
    with pytest.raises(BaseSpaceError):
        make_circle(2)


def test_graph_triangle_cycle_rank():
    base = make_graph(3, [(0, 1), (1, 2), (2, 0)], 10)
    assert len(base.loop_basis) == 1        # 3 - 3 + 1


def test_graph_path_no_loops():
    base = make_graph(2, [(0, 1)], 6)
    assert len(base.loop_basis) == 0


def test_graph_figure_eight():
    base = make_graph(1, [(0, 0), (0, 0)], 8)
    assert len(base.loop_basis) == 2        # 2 - 1 + 1


def test_graph_rejects_disconnected():
    with pytest.raises(BaseSpaceError):
        make_graph(4, [(0, 1), (2, 3)], 4)


def test_torus_grid_counts():
    base = make_torus2(3, 3)
    assert base.n_samples == 9 and base.n_edges == 18
    assert len(base.loop_basis) == 2


def test_torus_loop_lengths():
    base = make_torus2(4, 3)
    assert base.n_samples == 12
    assert sorted(len(l) for l in base.loop_basis) == [3, 4]


def test_torus_large():
    assert make_torus2(64, 64).n_samples == 4096


def test_loop_basis_walks_are_closed():
    for base in (make_circle(7), make_torus2(4, 5),
                 make_graph(3, [(0, 1), (1, 2), (2, 0), (0, 2)], 5)):
        for loop in base.loop_basis:
            walk = base.walk_samples(loop)
            assert walk[0] == walk[-1]


def test_identity_selfmap_snaps_to_samples():
    base = make_interval(9)
    smap = identity_selfmap(base)
    for s, loc in enumerate(smap.images):
        assert loc.t in (0.0, 1.0)
        assert base.nearest_sample(loc) == s


def test_sample_selfmap_flip():
    base = make_interval(5)
    smap = sample_selfmap(base, "1-x")
    # sample at 0.25 maps to location 0.75
    assert base.location_coordinate(smap.images[1]) == pytest.approx(0.75)


def test_flip_twice_is_identity_up_to_spacing():
    base = make_interval(41)
    smap = sample_selfmap(base, "1-x")
    h = 1.0 / 40
    for s in range(base.n_samples):
        mid = base.location_coordinate(smap.images[s])
        back = smap.image_coordinate(mid)
        assert abs(back - base.coords[s]) <= h + 1e-12


def test_selfmap_half_turn_on_circle():
    base = make_circle(4)
    smap = sample_selfmap(base, f"theta+{math.pi}")
    assert base.location_coordinate(smap.images[0]) == pytest.approx(math.pi)


def test_selfmap_rejects_discontinuous_table():
    base = make_interval(11)
    images = [0.0 if s < 5 else 1.0 for s in range(11)]
    with pytest.raises(BaseSpaceError):
        sample_selfmap(base, images)


def test_selfmap_rejects_image_outside_base():
    base = make_interval(11)
    with pytest.raises(BaseSpaceError):
        sample_selfmap(base, "1+x")


def test_location_roundtrip():
    base = make_circle(12)
    for theta in (0.0, 1.0, 3.5, 6.2):
        loc = base.coordinate_location(theta)
        assert base.location_coordinate(loc) == pytest.approx(theta)


def test_torus_swap_map_images():
    base = make_torus2(6, 6)
    smap = sample_selfmap(base, ("theta2", "theta1"))
    c = base.location_coordinate(smap.images[1 * 6 + 2])   # (t1, t2) of (1,2)
    assert c[0] == pytest.approx(base.coords[2 * 6 + 1][0])
    assert c[1] == pytest.approx(base.coords[2 * 6 + 1][1])
