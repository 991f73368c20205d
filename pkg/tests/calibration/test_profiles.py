"""
Tests for calibration/profiles.py - Bundled task profiles
"""
import pytest

from wes_sim.calibration.profiles import ProfileSet, SizeConstants, load_default_profiles, load_profile_set
from wes_sim.errors import CalibrationError, ProfileCoverageError
from wes_sim.workflow.generator import (
    COMPRESS,
    FILTER,
    FUSED_ALIGNMENT,
    MERGE,
    MUTECT,
    SPLIT,
    UNFUSED_ALIGNMENT,
)


class TestBundledProfile:
    """Test the committed default profile"""

    def test_covers_the_workflow(self, bundled_profiles):
        """Test every generated template is defined"""
        names = [FUSED_ALIGNMENT, *UNFUSED_ALIGNMENT, SPLIT, MUTECT, FILTER, MERGE, COMPRESS]

        assert bundled_profiles.missing(names) == []

    def test_within_documented_ranges(self, bundled_profiles):
        """Test memory and size constants are plausible"""
        assert bundled_profiles.range_violations() == []
        assert bundled_profiles.sizes == SizeConstants()

    def test_mutect_is_single_threaded(self, bundled_profiles):
        """Test MuTect runs with one fixed thread and 3 GB"""
        mutect = bundled_profiles.template(MUTECT)

        assert mutect.configurable is False
        assert mutect.max_threads == 1
        assert mutect.memory_for(1.0) == 3.0

    def test_alignment_is_configurable(self, bundled_profiles):
        """Test the fused alignment takes a thread count"""
        assert bundled_profiles.template(FUSED_ALIGNMENT).configurable is True
        assert bundled_profiles.alignment_gb > 0


class TestProfileSet:
    """Test ProfileSet helpers"""

    def test_unknown_template(self):
        """Test asking for an undefined template"""
        with pytest.raises(ProfileCoverageError):
            ProfileSet(name="empty").template(MUTECT)

    def test_with_work_copies(self, bundled_profiles):
        """Test replacing work constants leaves the original untouched"""
        before = bundled_profiles.template(MUTECT).work_model.serial_s

        changed = bundled_profiles.with_work(MUTECT, serial_s=99.0)

        assert changed.template(MUTECT).work_model.serial_s == 99.0
        assert bundled_profiles.template(MUTECT).work_model.serial_s == before

    def test_with_sizes(self, bundled_profiles):
        """Test replacing a size constant"""
        assert bundled_profiles.with_sizes(input_fastq_gb=4.0).sizes.input_fastq_gb == 4.0

    def test_out_of_range_memory(self, bundled_profiles):
        """Test a MuTect memory constant outside 3 to 10 GB is reported"""
        mutect = bundled_profiles.template(MUTECT)
        templates = dict(bundled_profiles.templates)
        templates[MUTECT] = mutect.model_copy(update={"memory_gb": mutect.memory_gb.model_copy(update={"m": 12.0})})

        problems = bundled_profiles.model_copy(update={"templates": templates}).range_violations()

        assert len(problems) == 1
        assert MUTECT in problems[0]


class TestLoadProfileSet:
    """Test loading profile files"""

    def test_default_name(self):
        """Test the bundled profile by name"""
        assert load_profile_set("default") == load_default_profiles()

    def test_env_fallback(self, mocker):
        """Test None falls back to the bundled profile when no path is configured"""
        mocker.patch("wes_sim.config.settings.PROFILES_PATH", None)

        assert load_profile_set() == load_default_profiles()

    def test_file_round_trip(self, bundled_profiles, tmp_path):
        """Test saving and loading a profile file"""
        path = tmp_path / "profiles.json"
        bundled_profiles.with_work(MUTECT, serial_s=5.0).save(path)

        assert load_profile_set(path).template(MUTECT).work_model.serial_s == 5.0

    def test_missing_file(self, tmp_path):
        """Test a path that does not exist"""
        with pytest.raises(CalibrationError):
            load_profile_set(tmp_path / "missing.json")
