"""Independent reference computations used to cross-check the library."""

from itertools import product

import numpy as np

from thetagraph.linalg import CMatrix, span_basis
from thetagraph.scalars import EXACT


def word_span(gens, max_len, tol=1e-9):
    """span of every word of length <= max_len in ``gens`` (empty word = I)."""
    n = gens[0].nrows
    mats = [CMatrix.identity(n, gens[0].backend)]
    layer = [mats[0]]
    for _ in range(max_len):
        layer = [w @ g for w in layer for g in gens]
        mats.extend(layer)
    return span_basis(mats, tol)


def numpy_word_rank(gens, max_len, tol=1e-9):
    """Dimension of the word span via numpy SVD on flattened word matrices."""
    arrs = [g.to_numpy() for g in gens]
    n = arrs[0].shape[0]
    rows = [np.eye(n).ravel()]
    for length in range(1, max_len + 1):
        for word in product(range(len(arrs)), repeat=length):
            m = np.eye(n, dtype=complex)
            for k in word:
                m = m @ arrs[k]
            rows.append(m.ravel())
    a = np.array(rows)
    return int(np.linalg.matrix_rank(a, tol=tol * np.abs(a).max()))


def random_generator_sets(rng, count):
    """Seeded Mat3/Mat4 generator sets of mixed kinds, exact Gaussian integers."""
    out = []
    kinds = ["generic", "block", "upper", "diagonal", "nilpotent"]
    for i in range(count):
        n = rng.choice([3, 4])
        kind = kinds[i % len(kinds)]
        k = rng.choice([1, 2])

        def ent():
            return rng.randint(-2, 2) + 1j * rng.randint(-1, 1)

        gens = []
        for _ in range(k):
            m = np.array([[ent() for _ in range(n)] for _ in range(n)])
            if kind == "block":
                m[:2, 2:] = 0
                m[2:, :2] = 0
            elif kind == "upper":
                m = np.triu(m)
            elif kind == "diagonal":
                m = np.diag(np.diag(m))
            elif kind == "nilpotent":
                m = np.triu(m, 1)
            gens.append(CMatrix([[_exact(v) for v in row] for row in m], EXACT))
        out.append((kind, gens))
    return out


def _exact(v):
    from thetagraph.scalars import QQi

    return QQi(int(v.real), int(v.imag))
