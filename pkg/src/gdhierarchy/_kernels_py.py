"""Pure-Python versions of the hot series kernels.

Monomials are packed into Python ints (see ``series.SeriesSpace``), so a
monomial product is an integer addition minus the epsilon offset.  Terms are
pre-grouped into buckets ``(degree, keys, coeffs)`` sorted by degree, which
lets the product skip every pair outside the requested degree window without
looking at individual terms.
"""


def mul_buckets(abuck, bbuck, lo, hi, off):
    out = {}
    get = out.get
    for da, akeys, acoeffs in abuck:
        if da > hi:
            break
        for db, bkeys, bcoeffs in bbuck:
            s = da + db
            if s > hi:
                break
            if s < lo:
                continue
            for ka, ca in zip(akeys, acoeffs):
                base = ka - off
                for kb, cb in zip(bkeys, bcoeffs):
                    k = base + kb
                    out[k] = get(k, 0) + ca * cb
    return out


def diff_slot(terms, shift, mask):
    step = 1 << shift
    out = {}
    for k, c in terms.items():
        e = (k >> shift) & mask
        if e:
            out[k - step] = c * e
    return out


def axpy(acc, terms, scale):
    """acc += scale * terms, in place."""
    get = acc.get
    if scale == 1:
        for k, c in terms.items():
            acc[k] = get(k, 0) + c
    else:
        for k, c in terms.items():
            acc[k] = get(k, 0) + c * scale
    return acc
