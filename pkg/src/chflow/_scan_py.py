"""Pure-Python backend for the directional exponential scans.

Fallback used when the compiled extension is unavailable.  The arithmetic
(one multiply-add per node, operating on precomputed decay factors) is the
same sequence of IEEE double operations as the compiled loop, so the two
backends produce bit-identical output.
"""


def scan_pair(d, w, lout, rout):
    """Run both scan recurrences over the weights.

    d[i] = exp(-(y[i+1] - y[i])) are the decay factors between adjacent
    nodes; lout/rout receive the left (forward) and right (backward) scans.
    """
    dl = d.tolist()
    wl = w.tolist()
    n = len(wl)
    left = [0.0] * n
    acc = wl[0]
    left[0] = acc
    for i in range(1, n):
        acc = dl[i - 1] * acc + wl[i]
        left[i] = acc
    lout[:] = left
    right = [0.0] * n
    acc = wl[n - 1]
    right[n - 1] = acc
    for i in range(n - 2, -1, -1):
        acc = dl[i] * acc + wl[i]
        right[i] = acc
    rout[:] = right
