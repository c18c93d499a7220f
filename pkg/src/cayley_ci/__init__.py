"""Cayley graphs on Z_p^n, polynomial isomorphisms, and non-CI certificates."""
from .certificate import Certificate, verify_lemma_chain
from .connection import AffineFamily, ConnectionSet, block_of, expand, inverse_closure, union_all
from .errors import CayleyCIError
from .graph import CayleyGraph
from .group import GroupElement, GroupSpec, LinearMap, add, apply_linear, enumerate_group, neg
from .polymap import PolynomialMap, block_translation, is_bijection, verify_isomorphism
from .preset import Preset, build_digraph_sets, build_paper_sets
from .search import LinearAutomorphism, SearchFamily, general_search_with_pruning, search_constrained

__all__ = [
    "AffineFamily", "CayleyCIError", "CayleyGraph", "Certificate", "ConnectionSet", "GroupElement",
    "GroupSpec", "LinearAutomorphism", "LinearMap", "PolynomialMap", "Preset", "SearchFamily",
    "add", "apply_linear", "block_of", "block_translation", "build_digraph_sets", "build_paper_sets",
    "enumerate_group", "expand", "general_search_with_pruning", "inverse_closure", "is_bijection",
    "neg", "search_constrained", "union_all", "verify_isomorphism", "verify_lemma_chain",
]
