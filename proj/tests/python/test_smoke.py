import math

import numpy as np
import pytest

import horizon_calib as hc


def make_scene():
    body = hc.EllipsoidShape(252.1, 252.1, 252.1)
    R = hc.euler321_to_rotation(0.3, -0.2, 0.1)
    boresight = R.T @ np.array([0.0, 0.0, 1.0])
    pose = hc.Pose(-4000.0 * boresight, R)
    cam = hc.CameraIntrinsics(2002.7, 0.012, 0.012, 0.0, 560.0, 500.0)
    return body, pose, cam


def test_version():
    assert hc.__version__


def test_exact_recovery_from_true_projection():
    body, pose, cam = make_scene()
    C = hc.horizon_conic_camera(hc.horizon_conic_planet(body, pose.r_P), pose)
    Kinv = np.linalg.inv(cam.K())
    C_image = hc.Conic(Kinv.T @ C.matrix() @ Kinv)
    est = hc.calibrate_single(C, C_image)
    assert np.linalg.norm(est.K() - cam.K()) / np.linalg.norm(cam.K()) < 1e-9
    assert hc.focal_from_k(est, 0.012, 0.012) == pytest.approx(2002.7, rel=1e-9)


def test_points_fit_calibrate_pipeline():
    body, pose, cam = make_scene()
    pts, C_ref, _ = hc.simulate_horizon(body, pose, cam, noise_px=0.0, n_points=300, seed=1)
    assert pts.shape == (300, 2)
    est = hc.calibrate_single(C_ref, hc.fit_conic(pts))
    np.testing.assert_allclose(est.J, [560.0, 500.0], atol=1e-5)
    assert hc.batch_focal([est, est], 0.012, 0.012) == pytest.approx(2002.7, rel=1e-7)
    np.testing.assert_allclose(hc.batch_principal([est]), est.J)


def test_fit_recovers_ellipse():
    e = hc.EllipseParams(np.array([10.0, -4.0]), 30.0, 12.0, 0.4)
    pts = hc.sample_points(e, 100)
    fitted = hc.ellipse_params(hc.fit_conic(pts, method="semi-hyper"))
    assert fitted.semi_major == pytest.approx(30.0, rel=1e-9)
    assert fitted.semi_minor == pytest.approx(12.0, rel=1e-9)
    assert fitted.orientation == pytest.approx(0.4, abs=1e-9)


def test_errors_carry_kind():
    with pytest.raises(hc.CalibrationError) as info:
        hc.fit_conic(np.zeros((5, 2)))
    assert info.value.kind == "insufficient-points"
    hyperbola = hc.Conic.from_coeffs(1.0, 0.0, -1.0, 0.0, 0.0, -1.0)
    assert not hc.is_ellipse(hyperbola)
    with pytest.raises(ValueError):
        hc.calibrate_single(hyperbola, hyperbola)


def test_rotation_convention():
    R = hc.euler321_to_rotation(math.pi / 2, 0.0, 0.0)
    np.testing.assert_allclose(R @ [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], atol=1e-15)
