"""State-vector simulation of a phase-estimation subset-sum algorithm.

Pipeline: scale the set into dyadic eigenphases (``encoding``), tag every
subset with its sum by phase estimation (``qpe``), amplify the subsets whose
sum is at most the target (``amplify``), then read the largest remaining sum
digit by digit (``maxsearch``).  ``classical`` holds the ground-truth oracles
and ``harness`` the experiment runner behind the ``qss`` command.
"""

__version__ = "0.1.0"
