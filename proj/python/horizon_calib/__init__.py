"""Camera intrinsic calibration from imaged ellipsoid horizons."""

from ._core import (
    CalibrationError,
    CalibrationEstimate,
    CameraIntrinsics,
    Conic,
    EllipseParams,
    EllipsoidShape,
    Pose,
    __version__,
    batch_focal,
    batch_principal,
    calibrate_single,
    conic_distance,
    conic_from_ellipse,
    ellipse_params,
    euler321_to_rotation,
    fit_conic,
    focal_from_k,
    horizon_conic_camera,
    horizon_conic_planet,
    is_ellipse,
    project_true_conic,
    quaternion_to_rotation,
    sample_points,
    simulate_horizon,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
