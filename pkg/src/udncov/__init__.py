"""Coverage analysis of dense wireless networks under Fox H-function fading.

The package evaluates Fox H kernels, builds fading models on top of them,
computes coverage probabilities of cellular and ad hoc networks, and checks
the results against a Monte Carlo simulator.
"""
from ._backend import BACKEND
from .coverage import (adhoc_asymptote, coverage_adhoc, coverage_closest, coverage_strongest,
                       dense_limit, miso_bounded_approx, mmwave_approx, optimal_scaling,
                       scaling_limit, threed_approx)
from .errors import *  # noqa: F401,F403
from .fading import FadingModel, make_model, parse_fading
from .foxh import FoxHParams, convergence_params
from .foxh import eval as eval_foxh
from .network import (Bounded, ClosestBS, CoverageEstimate, FixedDistance, GammaGain, MmWave,
                      NetworkModel, StrongestBS, ThreeD, Tier, Unbounded)
from .simulator import McEstimate, estimate_coverage

__version__ = "0.1.0"
