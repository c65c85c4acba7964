import numpy as np
import pytest

from clipcut import geometry as geo


def rz(deg: float) -> np.ndarray:
    c, s = np.cos(np.radians(deg)), np.sin(np.radians(deg))
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def random_pose(rng, jaw=None):
    return geo.Pose(
        rng.uniform(-50, 50, size=3),
        geo.random_rotation(rng),
        rng.uniform(0, 1) if jaw is None else jaw,
    )


def random_cam(rng):
    return geo.CameraFrame(rng.uniform(-100, 100, size=3), geo.random_rotation(rng))


class TestRot6d:
    def test_identity(self):
        assert np.allclose(geo.rot_to_6d(np.eye(3)), [1, 0, 0, 0, 1, 0])

    def test_90deg_about_z(self):
        assert np.allclose(geo.rot_to_6d(rz(90)), [0, 1, 0, -1, 0, 0])

    def test_rejects_non_orthonormal(self):
        bad = np.eye(3)
        bad[0, 0] = 1.1
        with pytest.raises(geo.InvalidRotationError):
            geo.rot_to_6d(bad)

    def test_round_trip_1000_random(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            R = geo.random_rotation(rng)
            assert np.max(np.abs(geo.sixd_to_rot(geo.rot_to_6d(R)) - R)) < 1e-9


class TestSixdToRot:
    def test_identity(self):
        assert np.allclose(geo.sixd_to_rot(np.array([1.0, 0, 0, 0, 1, 0])), np.eye(3))

    def test_scale_invariance(self):
        assert np.allclose(geo.sixd_to_rot(np.array([2.0, 0, 0, 0, 3, 0])), np.eye(3))

    def test_hand_gram_schmidt(self):
        # c1=(1,0,0); (1,1,0) minus its projection on c1 gives (0,1,0); c3=(0,0,1)
        assert np.allclose(geo.sixd_to_rot(np.array([1.0, 0, 0, 1, 1, 0])), np.eye(3))

    @pytest.mark.parametrize("v", [[0, 0, 0, 0, 1, 0], [1, 0, 0, 2, 0, 0], [1, 0, 0, 0, 0, 0]])
    def test_degenerate_inputs(self, v):
        with pytest.raises(geo.DegenerateSixDError):
            geo.sixd_to_rot(np.array(v, dtype=float))

    def test_output_is_rotation(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            v = rng.normal(size=6)
            if abs(np.linalg.norm(np.cross(v[:3], v[3:]))) < 1e-3:
                continue
            R = geo.sixd_to_rot(v)
            assert np.max(np.abs(R.T @ R - np.eye(3))) < 1e-9
            assert abs(np.linalg.det(R) - 1) < 1e-9

    def test_idempotent_after_normalization(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            v = rng.normal(size=6)
            v6 = geo.rot_to_6d(geo.sixd_to_rot(v))
            assert np.max(np.abs(geo.rot_to_6d(geo.sixd_to_rot(v6)) - v6)) < 1e-12


class TestActionCodec:
    def test_null_action(self):
        rng = np.random.default_rng(3)
        pair = (random_pose(rng), random_pose(rng))
        a = geo.encode_action(pair, pair, random_cam(rng))
        for arm, pose in zip((a.left, a.right), pair):
            assert np.allclose(arm.dt, 0)
            assert np.allclose(arm.drot6, [1, 0, 0, 0, 1, 0], atol=1e-12)
            assert arm.jaw_target == pytest.approx(pose.jaw)

    def test_camera_frame_sign_convention(self):
        # camera body rotated +90deg about z; world->camera is its transpose,
        # so a +x world translation lands on -y in camera coordinates
        cam = geo.CameraFrame(np.zeros(3), rz(90).T)
        cur = geo.Pose(np.zeros(3), np.eye(3), 0.5)
        tgt = geo.Pose(np.array([5.0, 0, 0]), np.eye(3), 0.5)
        a = geo.encode_action((cur, cur), (tgt, tgt), cam)
        assert np.allclose(a.left.dt, [0, -5, 0], atol=1e-12)

    def test_round_trip_random(self):
        rng = np.random.default_rng(4)
        for _ in range(300):
            cam = random_cam(rng)
            cur = (random_pose(rng), random_pose(rng))
            tgt = (random_pose(rng), random_pose(rng))
            a = geo.encode_action(cur, tgt, cam)
            got = geo.apply_action(cur, a, cam)
            for g, t in zip(got, tgt):
                assert np.max(np.abs(g.position - t.position)) < 1e-9
                assert np.max(np.abs(g.orientation - t.orientation)) < 1e-9
                assert abs(g.jaw - t.jaw) < 1e-9

    def test_zero_delta_keeps_pose(self):
        rng = np.random.default_rng(5)
        cur = (random_pose(rng, jaw=0.3), random_pose(rng, jaw=0.8))
        a = geo.ActionVector.identity(0.3, 0.8)
        got = geo.apply_action(cur, a, random_cam(rng))
        for g, c in zip(got, cur):
            assert np.allclose(g.position, c.position)
            assert np.allclose(g.orientation, c.orientation)
            assert g.jaw == pytest.approx(c.jaw)

    def test_jaw_clamped(self):
        rng = np.random.default_rng(6)
        cur = (random_pose(rng), random_pose(rng))
        a = geo.ActionVector.identity(1.3, -0.4)
        got = geo.apply_action(cur, a, random_cam(rng))
        assert got[0].jaw == 1.0
        assert got[1].jaw == 0.0

    def test_degenerate_drot_propagates(self):
        rng = np.random.default_rng(7)
        cur = (random_pose(rng), random_pose(rng))
        a = geo.ActionVector.identity()
        a.left.drot6 = np.array([1.0, 0, 0, 2, 0, 0])
        with pytest.raises(geo.DegenerateSixDError):
            geo.apply_action(cur, a, random_cam(rng))


class TestPackUnpack:
    def test_layout_order(self):
        a = geo.ActionVector(
            geo.ArmDelta(np.array([1.0, 2, 3]), np.array([4.0, 5, 6, 7, 8, 9]), 0.25),
            geo.ArmDelta(np.array([10.0, 11, 12]), np.array([13.0, 14, 15, 16, 17, 18]), 0.75),
        )
        expected = [1, 2, 3, 4, 5, 6, 7, 8, 9, 0.25, 10, 11, 12, 13, 14, 15, 16, 17, 18, 0.75]
        assert np.array_equal(geo.pack(a), expected)

    def test_round_trip_exact(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            x = rng.normal(size=20)
            assert np.array_equal(geo.pack(geo.unpack(x)), x)

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            geo.unpack(np.zeros(19))

    def test_zero_vector_flagged_on_decode(self):
        a = geo.unpack(np.zeros(20))
        assert np.allclose(a.left.dt, 0)
        with pytest.raises(geo.DegenerateSixDError):
            geo.sixd_to_rot(a.left.drot6)


class TestPoseValidation:
    def test_bad_jaw(self):
        with pytest.raises(ValueError):
            geo.Pose(np.zeros(3), np.eye(3), 1.5)

    def test_bad_orientation(self):
        with pytest.raises(geo.InvalidRotationError):
            geo.Pose(np.zeros(3), np.eye(3) * 1.01, 0.5)
