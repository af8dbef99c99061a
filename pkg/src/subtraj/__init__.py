"""Subtrajectory clustering under the discrete Fréchet distance."""

from .clustering import (
    Clustering,
    ClusteringConfig,
    Objective,
    ScoringVector,
    greedy_k_centre,
    greedy_k_means,
    run_configuration,
    score,
)
from .frechet import discrete_frechet, frechet_leq
from .psc import psc_select, psc_stream
from .sc import Cluster, sc_fixed, sc_max_cardinality, sc_max_length
from .trajectory import Point, SubtrajectoryRef, Trajectory, TrajectoryStore, concatenate

__version__ = "0.1.0"
