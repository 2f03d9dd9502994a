import numpy as np
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lorentz2d import GridFunction2D


def grids(max_m=5, max_n=5, hx=None, hy=None):
    """Hypothesis strategy for nonnegative grid functions."""

    @st.composite
    def build(draw):
        m = draw(st.integers(1, max_m))
        n = draw(st.integers(1, max_n))
        vals = draw(arrays(float, (m, n), elements=st.sampled_from([0.0, 0.5, 1.0, 2.0, 3.0, 7.25])))
        a = hx if hx is not None else draw(st.sampled_from([0.5, 1.0, 2.0]))
        b = hy if hy is not None else draw(st.sampled_from([0.25, 1.0, 1.5]))
        return GridFunction2D(a, b, vals)

    return build()


def random_grid(rng, m=6, n=6, hx=0.5, hy=0.5):
    vals = rng.random((m, n))
    vals[rng.random((m, n)) < 0.3] = 0.0
    return GridFunction2D(hx, hy, vals)


def riemann_integral(f: GridFunction2D, s: float, t: float, k: int = 2000) -> float:
    """Midpoint rule for the integral of f over [0,s]x[0,t] with point evaluation."""
    xs = (np.arange(k) + 0.5) * s / k
    ys = (np.arange(k) + 0.5) * t / k
    i = np.floor(xs / f.hx).astype(int)
    j = np.floor(ys / f.hy).astype(int)
    m, n = f.shape
    vi, vj = i < m, j < n
    sub = np.zeros((k, k))
    sub[np.ix_(vi, vj)] = f.values[np.ix_(i[vi], j[vj])]
    return float(sub.sum() * (s / k) * (t / k))
