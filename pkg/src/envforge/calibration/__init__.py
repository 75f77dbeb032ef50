from .solve import (
    CalibrationReport,
    CurvePoint,
    MIN_COMPLETION,
    build_curve,
    calibrate,
    curve_to_csv,
    solve_environment,
)
from .wald import Degenerate, SolveTrial, WaldTestResult, normal_cdf, wald_test

__all__ = [
    "CalibrationReport",
    "CurvePoint",
    "Degenerate",
    "MIN_COMPLETION",
    "SolveTrial",
    "WaldTestResult",
    "build_curve",
    "calibrate",
    "curve_to_csv",
    "normal_cdf",
    "solve_environment",
    "wald_test",
]
