"""Batched matrix exponential (scaling and squaring, Pade degree 13).

scipy.linalg.expm handles one matrix at a time; the shooting solver needs
exponentials of hundreds of small matrices per Gauss-Newton iteration, so
this evaluates a whole (B, n, n) stack with batched matmul/solve. Backward
error matches scipy to ~1e-15 on the block sizes used here (<= 2p); the
test suite gates agreement at 1e-13.
"""

import numpy as np

# Pade-13 numerator/denominator coefficients (Higham 2005).
_B = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)

# Conservative degree-13 threshold (scipy uses the same value).
_THETA_13 = 4.25


def expm_batch(mats):
    """Exponential of a stack of square matrices, shape (B, n, n)."""
    A = np.asarray(mats, dtype=float)
    if A.ndim != 3 or A.shape[-1] != A.shape[-2]:
        raise ValueError(f"expected a (B, n, n) stack, got shape {A.shape}")
    nbatch, n, _ = A.shape
    if nbatch == 0:
        return A.copy()

    # Per-matrix 1-norm drives the scaling exponent.
    norms = np.abs(A).sum(axis=1).max(axis=1)
    s = np.zeros(nbatch, dtype=int)
    big = norms > _THETA_13
    s[big] = np.ceil(np.log2(norms[big] / _THETA_13)).astype(int)
    As = A * (0.5 ** s)[:, None, None]

    ident = np.broadcast_to(np.eye(n), As.shape)
    A2 = As @ As
    A4 = A2 @ A2
    A6 = A2 @ A4
    b = _B
    U = As @ (
        A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
        + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident
    )
    V = (
        A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
        + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident
    )
    R = np.linalg.solve(V - U, V + U)

    for step in range(int(s.max(initial=0))):
        todo = s > step
        R[todo] = R[todo] @ R[todo]
    return R
