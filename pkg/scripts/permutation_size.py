"""Rejection rate of the residual permutation test under a correctly specified model."""
from _common import main

if __name__ == "__main__":
    main("permutation", __doc__, p=(20,), n=(100,), permutations=500)
