"""Near-critical site percolation on the triangular lattice: sampling, estimators, holes, forest fires."""

import json as _json

from ._core import (
    T_C,
    BackendDomain,
    FireTimeline,
    SiteConfig,
    TooManyHoles,
    Undecided,
    Window,
    L_fit,
    classify_domain,
    delta_k,
    estimate_arm,
    estimate_crossing,
    estimate_L,
    estimate_theta,
    experiment_names,
    has_arm_event,
    has_crossing,
    p_of_t,
    render_config,
    render_timeline,
    sample,
    simulate_fire,
    simulate_frozen,
    simulate_y,
    t_of_p,
)
from . import _core

__version__ = "0.1.0"


def sample_holes(window, m, alpha=1.2, beta=1.5, c1=1.0, c2=1.0, c3=1.0, seed=1, pad=None):
    """Hole configuration as a dict: {"params": ..., "window": ..., "pad": ..., "holes": [[x, y, r], ...]}."""
    return _json.loads(_core.sample_holes_json(window, m, alpha, beta, c1, c2, c3, seed, pad))


def scales(zeta, k_max=4, a_L=1.0, a_theta=1.0):
    """Exceptional scales with the analytic backend."""
    return _json.loads(_core.scales_json(zeta, k_max, a_L, a_theta))


def experiment_defaults(name):
    return _json.loads(_core.experiment_defaults_json(name))


def run_experiment(name, params=None, seed=1, out="", budget=0.0, threads=1):
    """Run a named suite; returns its summary (stats, assertions, config hash)."""
    return _json.loads(_core.run_experiment_json(name, _json.dumps(params or {}), seed, out, budget, threads))
