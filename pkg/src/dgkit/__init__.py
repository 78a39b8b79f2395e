"""dgkit: exact twisted complexes, homotopy colimits and derived-projective resolutions."""

__version__ = "0.1.0"
