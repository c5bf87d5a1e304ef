"""Dispersive-gate and graph-state workbench.

Core numerics live in :mod:`gatelab.core` (states, sparse operators,
fixed-step Schrodinger integration), the physical models in
:mod:`gatelab.model`, gate extraction in :mod:`gatelab.gates`, and the
combinatorial graph-state engine in :mod:`gatelab.graphs` /
:mod:`gatelab.recipes`.  The HTTP service (:mod:`gatelab.service`) wraps those
layers behind pydantic schemas; :mod:`gatelab.cli` is a thin client.
"""

__version__ = "0.1.0"
