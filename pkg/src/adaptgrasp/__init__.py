"""Simulator, adaptive grasp controller and benchmark harness for delicate grasping."""

__version__ = "0.1.0"
