#
# Factor-space geometry: two tall factors describe the same PSD matrix
# exactly when they differ by a right rotation, so comparisons happen
# modulo the orthogonal group via Procrustes alignment.
#

import numpy as np

from factordescent import (column_space_projector, dist, frobenius_norm,
                           orthonormality_defect, procrustes_align,
                           singular_values, spectral_norm)

rng = np.random.default_rng(0)

# ---------------------------------------------------------------
# A factor and a rotated copy: same Gram matrix, distance zero
# ---------------------------------------------------------------
u = rng.standard_normal((6, 2))
theta = 0.7
rot = np.array([[np.cos(theta), -np.sin(theta)],
                [np.sin(theta), np.cos(theta)]])
v = u @ rot

print("||u u^T - v v^T||_F =", frobenius_norm(u @ u.T - v @ v.T))
print("plain  ||u - v||_F  =", frobenius_norm(u - v))
print("aligned dist(u, v)  =", dist(u, v))

# the Procrustes solution recovers the rotation (up to float noise)
r = procrustes_align(u, v)
print("recovered rotation error:", np.max(np.abs(r - rot.T)))
print("orthonormality defect of R:", orthonormality_defect(r))

# ---------------------------------------------------------------
# Generic pair: the aligner strictly beats the identity candidate
# ---------------------------------------------------------------
w = rng.standard_normal((6, 2))
print()
print("generic pair: ||u - w||_F =", frobenius_norm(u - w),
      " dist(u, w) =", dist(u, w))

# ---------------------------------------------------------------
# Spectra and projectors
# ---------------------------------------------------------------
x = u @ u.T
print()
print("singular values of X = u u^T:", np.round(singular_values(x), 4))
print("spectral norm:", spectral_norm(x))

p = column_space_projector(u)
print("projector: ||P^2 - P||_max =", np.max(np.abs(p @ p - p)),
      " ||P u - u||_max =", np.max(np.abs(p @ u - u)))
