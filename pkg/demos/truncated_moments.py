"""Truncated Gaussian moments: closed form against brute-force sampling.

The band-truncated surrogate matrix has expectation
(beta - alpha) x x^T + alpha ||x||^2 I, where alpha and beta are the
second and fourth moments of a standard normal restricted to l <= |g| <= u.
This script prints the closed-form values for a few bands and checks the
worked-constant band (0.5, 10) against a large Monte Carlo sample.
"""

import numpy as np

from sparsepr import truncated_gaussian_moment

bands = [(0.5, 10.0), (0.0, 3.0), (1.0, 2.0)]
print(f"{'band':>14} {'alpha (2nd)':>12} {'beta (4th)':>12}")
for l, u in bands:
    alpha = truncated_gaussian_moment(2, l, u)
    beta = truncated_gaussian_moment(4, l, u)
    print(f"[{l:4.1f}, {u:4.1f}] {alpha:12.6f} {beta:12.6f}")

rng = np.random.default_rng(0)
g = rng.standard_normal(2_000_000)
keep = (np.abs(g) >= 0.5) & (np.abs(g) <= 10.0)
print("\nMonte Carlo check at the worked band (0.5, 10), 2e6 samples:")
print(f"  alpha: sampled {np.mean(g**2 * keep):.4f}  "
      f"closed form {truncated_gaussian_moment(2, 0.5, 10.0):.4f}")
print(f"  beta:  sampled {np.mean(g**4 * keep):.4f}  "
      f"closed form {truncated_gaussian_moment(4, 0.5, 10.0):.4f}")
