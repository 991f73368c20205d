"""Bundled task profiles and the calibration harness (``wes_sim.calibration.fit``)."""

from .profiles import ProfileSet, SizeConstants, load_default_profiles, load_profile_set

__all__ = ["ProfileSet", "SizeConstants", "load_default_profiles", "load_profile_set"]
