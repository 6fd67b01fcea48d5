"""
Services Package
Multi-step workflows on top of the core modules.

- detectors.py: adapter construction from the experiment config
- experiments.py: optimize, evaluate, size/count sweeps and transfer runs
- plotting.py: PR curve figures
"""
