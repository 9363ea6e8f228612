"""Link homology over GF(2): Khovanov and geometric spectral-sequence
complexes, their annular refinement, and combinatorial branched Heegaard
diagrams, with an audit harness."""

__version__ = "0.1.0"
