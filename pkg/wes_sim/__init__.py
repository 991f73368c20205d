"""
WES Scheduling Simulator - discrete-event model of a whole-exome variant-calling
workflow on stand-alone, Yarn and HPC style infrastructures.

Main Modules:
- workflow: DAG model, validation, signatures and the WES workflow generator
- infra: node / cluster / file-system models, presets and staging arithmetic
- scheduling: placement and admission policies
- engine: event-driven simulator, fixed-timestep reference interpreter, traces
- costs: throughput and effectiveness arithmetic
- calibration: bundled task profiles and the fitting harness
- app: command-line entry point

Usage:
    wes-sim generate --tumor 27 --control 2 --regions 467 --out run/
    wes-sim simulate --cluster YC --cache on --out run/
"""

__version__ = "0.1.0"
__author__ = "WES Scheduling Simulator Team"

__all__ = ["__version__", "__author__"]
