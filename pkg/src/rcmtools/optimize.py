"""One-dimensional search routines: golden-section extrema and bisection."""

import math

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi


def golden_section_max(f, lo, hi, tol=1e-10):
    """Maximise f on [lo, hi], assumed unimodal there.

    Returns (x_best, f(x_best)) over every point evaluated, so a maximum
    sitting on the bracket boundary is still reported correctly.
    """
    if not hi >= lo:
        raise ValueError(f"empty bracket [{lo}, {hi}]")
    best_x, best_f = lo, f(lo)
    fhi = f(hi)
    if fhi > best_f:
        best_x, best_f = hi, fhi
    c = hi - (hi - lo) * _INV_GOLDEN
    d = lo + (hi - lo) * _INV_GOLDEN
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - (hi - lo) * _INV_GOLDEN
            fc = f(c)
            x, fx = c, fc
        else:
            lo, c, fc = c, d, fd
            d = lo + (hi - lo) * _INV_GOLDEN
            fd = f(d)
            x, fx = d, fd
        if fx > best_f:
            best_x, best_f = x, fx
    return best_x, best_f


def golden_section_min(f, lo, hi, tol=1e-10):
    """Minimise f on [lo, hi]; see golden_section_max."""
    x, fx = golden_section_max(lambda t: -f(t), lo, hi, tol)
    return x, -fx


def grid_golden_max(f, lo, hi, grid_size, tol=1e-10):
    """Argmax of f over [lo, hi]: uniform grid scan, then golden-section
    refinement of the bracket around the winning grid point.

    Returns (x_best, f(x_best)).
    """
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    step = (hi - lo) / grid_size
    xs = [lo + i * step for i in range(grid_size)] + [hi]
    vals = [f(x) for x in xs]
    i_best = max(range(len(xs)), key=vals.__getitem__)
    bl = xs[max(i_best - 1, 0)]
    bh = xs[min(i_best + 1, len(xs) - 1)]
    x_ref, f_ref = golden_section_max(f, bl, bh, tol)
    if vals[i_best] > f_ref:
        return xs[i_best], vals[i_best]
    return x_ref, f_ref


def bisect_root(f, lo, hi, tol=1e-12, max_iter=300):
    """Root of f on [lo, hi] by bisection; f(lo) and f(hi) must differ in sign.

    Stops when the bracket width drops below tol; returns the midpoint.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol:
            return mid
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)
