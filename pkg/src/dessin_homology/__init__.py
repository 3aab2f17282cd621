"""Mod-2 homology of level-m covers of moduli spaces of one-pointed curves,
computed from the cell complex of one-face dessins with symplectic bases."""

__version__ = "0.1.0"
