"""Dataset, trial orchestration, calibration, statistics and reporting."""
