"""Property testing of welded-tree instances with advice.

Generators build G1/G2 instances, the classical tester checks them against
an advice source, the marker supplies advice from a simulated walk, and the
adversary lab measures what a classical query algorithm can learn.
"""

from .generators import InstanceSpec, Variant, build_instance, expected_census
from .graph import EdgeKind, GraphError, MultiGraph, OracleHandle, VertexRole
from .marker import AdviceMap, classify_vertex
from .tester import TestContext, TesterConfig, Verdict, final_test

__version__ = "0.1.0"

__all__ = [
    "AdviceMap", "EdgeKind", "GraphError", "InstanceSpec", "MultiGraph", "OracleHandle", "TestContext",
    "TesterConfig", "Variant", "Verdict", "VertexRole", "build_instance", "classify_vertex",
    "expected_census", "final_test",
]
