# Tests for the WES scheduling simulator
