"""
Exact-arithmetic services: magmas, step functions, semidirect products,
unimodular lattices, certificates and their JSON codec.
"""
