"""Exact rank computation for sparse matrices over GF(2).

Dense elimination is the oracle, Wiedemann the black-box method, and
structured sparse elimination (optionally split by the characters of an
odd-order symmetry) the exact method used for the large boundary maps.
"""

from .betti import BettiError, betti_numbers
from .dense import DEFAULT_DENSE_CAP, DenseCapExceeded, rank_dense
from .elimination import EliminationResult, chain_ranks, rank_elimination
from .equivariant import equivariant_chain_ranks
from .field import FieldMatrix, gf2k
from .matrix import MatrixFormatError, SparseBoolMatrix
from .wiedemann import RankCertificate, RankDisagreement, berlekamp_massey, rank_wiedemann

__all__ = [
    "SparseBoolMatrix",
    "MatrixFormatError",
    "DEFAULT_DENSE_CAP",
    "DenseCapExceeded",
    "rank_dense",
    "RankCertificate",
    "RankDisagreement",
    "berlekamp_massey",
    "rank_wiedemann",
    "BettiError",
    "betti_numbers",
    "EliminationResult",
    "rank_elimination",
    "chain_ranks",
    "equivariant_chain_ranks",
    "FieldMatrix",
    "gf2k",
]
