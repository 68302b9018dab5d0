"""Exact-arithmetic engine for higher Hochschild homology over simplicial
sets, Bar constructions, chain-level products, and Čech complexes of
prefactorization algebras on finite covers."""

__version__ = "0.1.0"
