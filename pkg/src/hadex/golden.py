"""Reference values for the 4x4 GF(2) census, used by the --check mode.

Every number here is reproduced from scratch by the pipeline itself (and
by the test suite); this file exists so the checks live in one place.
"""

from __future__ import annotations

from fractions import Fraction

# Number of 4x4 GF(2) matrices of each rank 0..4.
RANK_HISTOGRAM = (1, 225, 7350, 37800, 20160)

# Fraction of the 2^16 words that are invertible: prod_{i=1..4} (1 - 2^-i).
FULL_RANK_PROBABILITY = Fraction(315, 1024)

# Split of the 20,160 full-rank words under rank-2 x rank-2 Hadamard products.
EXPRESSIBLE_COUNT = 14856
COUNTEREXAMPLE_COUNT = 5304

# Smallest counterexample word (rows 1111/1110/0100/1000); it also has the
# minimum ones-count (9) over all counterexamples.
FIRST_COUNTEREXAMPLE = 0x127F

# The identity word is expressible (derived by running the full search).
IDENTITY_EXPRESSIBLE = True

# Density-rule reference values: accuracy of "expressible iff ones <= 9".
BEST_CUTOFF = 9
DENSITY_ACCURACY = 0.957
DENSITY_ACCURACY_TOL = 0.001

# Zero-count statistics of the two classes.
MEAN_ZEROS_EXPRESSIBLE = 8.17
MEAN_ZEROS_COUNTEREXAMPLE = 5.50
MEAN_ZEROS_TOL = 0.005
MEAN_ZEROS_DIFF = 2.67
MEAN_ZEROS_DIFF_TOL = 0.01

# Two-sample t statistic on zero counts.  The pooled-variance convention
# reproduces this value; Welch gives 175.51 on the same data.
T_STATISTIC = 160.31
T_STATISTIC_TOL = 0.5

# Positive-control convergence floor for the real-valued optimizer.
CONTROL_COUNT = 100
CONTROL_MIN_CONVERGED = 90
