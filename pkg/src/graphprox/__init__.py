"""graphprox: proper proximality of graph products of groups, decided by a
recursive graph classifier, with word normal forms, amalgam decompositions,
and a desk-scale Bass-Serre tree simulator behind a CLI and HTTP service."""

__version__ = "0.1.0"

from . import amalgam, classify, errors, graphs, groups, specfile, tree, words
from .amalgam import decompose_at_vertex
from .classify import Verdict, cartan_report, classify as classify_graph_product
from .graphs import Graph
from .groups import Conventions, Facts, GroupSpec
from .specfile import parse_spec
from .words import GraphProduct, Word

__all__ = [
    "__version__",
    "amalgam",
    "classify",
    "errors",
    "graphs",
    "groups",
    "specfile",
    "tree",
    "words",
    "decompose_at_vertex",
    "Verdict",
    "cartan_report",
    "classify_graph_product",
    "Graph",
    "Conventions",
    "Facts",
    "GroupSpec",
    "parse_spec",
    "GraphProduct",
    "Word",
]
