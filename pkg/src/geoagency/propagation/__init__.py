from .propagate import Candidate, SeedSet, propagate

__all__ = ["Candidate", "SeedSet", "propagate"]
