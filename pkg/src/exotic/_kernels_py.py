"""Pure NumPy twin of the compiled solver kernel.

Semantics must match `_kernels.pyx` operation for operation; the engine
module picks whichever is importable. Kept free of package imports so both
kernels stay self-contained.
"""

import numpy as np

COMPILED = False

# domain kinds
BOX = 0
SIMPLEX = 1


def _project(kind, lo, hi, x):
    if kind == BOX:
        return np.minimum(np.maximum(x, lo), hi)
    u = np.sort(x)[::-1]
    css = np.cumsum(u)
    idx = np.arange(1, x.size + 1)
    rho = int(np.nonzero(u + (1.0 - css) / idx > 0)[0][-1])
    tau = (1.0 - css[rho]) / (rho + 1)
    return np.maximum(x + tau, 0.0)


def pgd_max_affine(coefs, consts, kind, lo, hi, x0, iters, eta, inverse_sqrt,
                   step_offset=0, trace=None):
    """Projected subgradient descent on x -> max_i coefs[i]@x + consts[i].

    Runs `iters` steps from the projection of x0, stepping against the
    achieving piece's coefficient row (lowest index on ties). Step size is
    eta, or eta/sqrt(step_offset + k) under the inverse-sqrt rule. Returns
    (x_best, t_best, x_last, t_last); the best pair accounts for the
    initializer. `trace`, when given, must have length iters + 1 and
    receives every iterate's objective value.
    """
    x = _project(kind, lo, hi, np.asarray(x0, dtype=float))
    vals = coefs @ x + consts
    i = int(np.argmax(vals))
    t = float(vals[i])
    x_best = x.copy()
    t_best = t
    if trace is not None:
        trace[0] = t
    for k in range(1, int(iters) + 1):
        step = eta / np.sqrt(step_offset + k) if inverse_sqrt else eta
        x = _project(kind, lo, hi, x - step * coefs[i])
        vals = coefs @ x + consts
        i = int(np.argmax(vals))
        t = float(vals[i])
        if t < t_best:
            t_best = t
            x_best = x.copy()
        if trace is not None:
            trace[k] = t
    return x_best, t_best, x, t
