import numpy as np
import pytest

from entrolab.errors import DuplicatePoints, FileMalformed, ParamOutOfRange
from entrolab.metric import is_isometry, orbit, validate_space
from entrolab.systems import (
    SystemSpec,
    build_system,
    dyadic_doubling,
    full_shift,
    ingest_trajectory,
    rotation,
    tent,
)


class TestSpecs:
    def test_unknown_kind(self):
        with pytest.raises(ParamOutOfRange):
            SystemSpec("weird")

    def test_param_ranges(self):
        with pytest.raises(ParamOutOfRange):
            build_system(SystemSpec("dyadic_doubling", {"m": 1}))
        with pytest.raises(ParamOutOfRange):
            build_system(SystemSpec("rotation", {"p": 3, "q": 3}))
        with pytest.raises(ParamOutOfRange):
            build_system(SystemSpec("full_shift", {"k": 1, "L": 3}))
        with pytest.raises(ParamOutOfRange):
            build_system(SystemSpec("tent", {"m": 0}))
        with pytest.raises(ParamOutOfRange):
            build_system(SystemSpec("dyadic_doubling", {}))
        with pytest.raises(ParamOutOfRange):
            build_system(SystemSpec("full_shift", {"k": 2, "L": 40}))


class TestDoubling:
    def test_m3_orbit_of_one_eighth(self):
        space, emap = build_system(dyadic_doubling(3))
        assert space.size == 8
        start = space.points.index(1 / 8)
        path = orbit(space, emap, start, 3)
        assert [space.points[i] for i in path] == [1 / 8, 1 / 4, 1 / 2]

    def test_diameter_exactly_one(self):
        space, _ = build_system(dyadic_doubling(4))
        assert space.diameter == 1.0
        assert space.scale == 1.0

    def test_forward_invariance_no_rounding(self):
        space, emap = build_system(dyadic_doubling(5))
        assert emap.image.min() >= 0 and emap.image.max() < space.size
        # doubling in index space is exact
        for j in range(space.size):
            assert emap.image[j] == (2 * j) % space.size

    def test_passes_validation(self):
        space, _ = build_system(dyadic_doubling(6))
        revalidated = validate_space(space.dist)
        assert revalidated.scale == 1.0


class TestRotation:
    def test_isometry_and_constant_refinement(self):
        space, emap = build_system(rotation(1, 4))
        assert space.size == 4
        assert is_isometry(space, emap)
        from entrolab.metric import bowen_metric

        for n in (2, 3, 5):
            assert np.array_equal(bowen_metric(space, emap, n).dist_n, space.dist)

    def test_odd_q_isometry_exact(self):
        space, emap = build_system(rotation(2, 9))
        assert is_isometry(space, emap)


class TestShift:
    def test_words_and_shift(self):
        space, emap = build_system(full_shift(2, 3))
        assert space.size == 8
        idx = space.points.index("011")
        assert space.points[emap.image[idx]] == "110"

    def test_rotation_oracle(self):
        space, emap = build_system(full_shift(3, 2))
        for idx, word in enumerate(space.points):
            want = word[1:] + word[0]
            assert space.points[emap.image[idx]] == want

    def test_metric_is_prefix_based(self):
        space, _ = build_system(full_shift(2, 3))
        i = space.points.index("010")
        j = space.points.index("011")
        assert space.dist[i, j] == pytest.approx(2.0**-2)
        k = space.points.index("110")
        assert space.dist[i, k] == 1.0

    def test_small_shift_passes_validation(self):
        space, _ = build_system(full_shift(2, 4))
        validate_space(space.dist)


class TestTent:
    def test_grid_and_fold(self):
        space, emap = build_system(tent(3))
        assert space.size == 9
        # oracle: direct arithmetic on the folded map
        for j in range(9):
            want = 2 * j if j <= 4 else 16 - 2 * j
            assert emap.image[j] == want

    def test_diameter_one(self):
        space, _ = build_system(tent(4))
        assert space.diameter == 1.0


class TestIngest:
    def test_duplicate_rows_collapse(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text("0,0\n0,0\n")
        with pytest.warns(DuplicatePoints):
            space, emap = ingest_trajectory(path)
        assert space.size == 1
        assert emap.image[0] == 0

    def test_collinear_normalization(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text("0,0\n1,0\n2,0\n")
        space, emap = ingest_trajectory(path)
        assert space.scale == 0.5
        assert space.dist[0, 1] == 0.5
        assert space.diameter == 1.0

    def test_successor_rule_last_fixed(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text("0,0\n1,0\n3,0\n")
        space, emap = ingest_trajectory(path, "successor")
        assert list(emap.image) == [1, 2, 2]

    def test_logistic_trajectory_roundtrip(self, tmp_path):
        x = 0.1234
        rows = []
        for _ in range(100):
            rows.append(f"{x!r}")
            x = 4.0 * x * (1.0 - x)
        path = tmp_path / "pts.csv"
        path.write_text("\n".join(rows) + "\n")
        space, emap = ingest_trajectory(path, "successor")
        assert space.size == 100
        # re-read the file and check the successor structure
        vals = [float(v) for v in path.read_text().split()]
        order = {v: i for i, v in enumerate(space.points)}
        for t in range(99):
            src = order[(vals[t],)]
            dst = order[(vals[t + 1],)]
            assert emap.image[src] == dst
        last = order[(vals[99],)]
        assert emap.image[last] == last

    def test_nearest_image_rule(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text("0,0\n1,0\n0.1,0\n")
        space, emap = ingest_trajectory(path, "nearest-image")
        # successor of row0 is (1,0) -> nearest stored point is itself
        assert emap.image[0] == 1
        # successor of row1 is (0.1,0) -> nearest stored is that point
        assert emap.image[1] == 2

    def test_malformed_cell(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text("0,0\n0,oops\n")
        with pytest.raises(FileMalformed) as info:
            ingest_trajectory(path)
        assert info.value.row == 1
        assert info.value.col == 1

    def test_ragged_row(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text("0,0\n1\n")
        with pytest.raises(FileMalformed):
            ingest_trajectory(path)

    def test_bad_rule(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text("0,0\n1,0\n")
        with pytest.raises(ParamOutOfRange):
            ingest_trajectory(path, "teleport")


def test_every_built_system_validates():
    specs = [
        dyadic_doubling(2),
        dyadic_doubling(5),
        rotation(1, 7),
        rotation(3, 16),
        full_shift(2, 3),
        full_shift(3, 3),
        tent(2),
        tent(5),
    ]
    for spec in specs:
        space, emap = build_system(spec)
        revalidated = validate_space(space.dist)
        assert revalidated.scale == 1.0
        assert emap.image.min() >= 0
        assert emap.image.max() < space.size
