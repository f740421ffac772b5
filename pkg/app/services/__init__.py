"""
Services module
"""
from .graph_service import Graph, make_cycle, make_graph, load_graph
from .lattice_service import LatticeVector, InequalitySystem, enumerate_level
from .ehrhart_service import EhrhartCounts, HVector, RationalSeries, ehrhart_counts, hstar
from .worker_pool import WorkerPool

__all__ = [
    'Graph',
    'make_cycle',
    'make_graph',
    'load_graph',
    'LatticeVector',
    'InequalitySystem',
    'enumerate_level',
    'EhrhartCounts',
    'HVector',
    'RationalSeries',
    'ehrhart_counts',
    'hstar',
    'WorkerPool'
]
