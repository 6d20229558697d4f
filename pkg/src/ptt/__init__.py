"""ptt: a proof checker and evaluator for path/bridge cubical type theory."""

import sys

# Naive substitution recurses on term structure; unfolded corpus terms get deep.
if sys.getrecursionlimit() < 100_000:
    sys.setrecursionlimit(100_000)

__version__ = "0.1.0"
