"""Constructions and verifiers for sparse uniform hypergraphs.

A hypergraph is G_r(v, e)-free when every e of its r-element edges
together cover at least v + 1 vertices. The package builds such graphs
algebraically and by lifting, and checks them with independent
brute-force verifiers and exact counting certificates.
"""

__version__ = "0.1.0"
