"""nlstplan: natural-language queries over a small spatio-temporal database.

English queries are tagged, grounded against a knowledge base, classified
by query type, mapped to physical operator trees, optionally optimized with
R-tree indexes and a sampled cost model, and executed.
"""

__version__ = "0.1.0"
