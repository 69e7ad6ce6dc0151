# SPDX-License-Identifier: Apache-2.0
#
# Solves exported conic problems (the plain-text triplet format written by
# write_problem) with cvxopt and prints status and objective. The values are
# frozen into tests/test_conic.cpp.
#
#   python3 subproblem_oracle.py tests/data/subproblem_*.txt

import sys

import numpy as np
from cvxopt import matrix, solvers, spmatrix


def read_problem(path):
    tok = open(path).read().split()
    pos = 0

    def take():
        nonlocal pos
        pos += 1
        return tok[pos - 1]

    assert take() == "conic-problem" and take() == "1"
    assert take() == "vars"
    n = int(take())
    assert take() == "cones"
    cones = [(take(), int(take())) for _ in range(int(take()))]

    def vector():
        take()
        size, nnz = int(take()), int(take())
        v = np.zeros(size)
        for _ in range(nnz):
            i = int(take())
            v[i] = float(take())
        return v

    def sparse():
        take()
        r, c, nnz = int(take()), int(take()), int(take())
        m = np.zeros((r, c))
        for _ in range(nnz):
            i, j = int(take()), int(take())
            m[i, j] = float(take())
        return m

    c = vector()
    A = sparse()
    b = vector()
    G = sparse()
    h = vector()
    assert take() == "end"
    return n, cones, c, A, b, G, h


def to_cvxopt(n, cones, G, h):
    # cvxopt wants nonneg rows, then SOC blocks, then full column-major PSD blocks
    offsets = []
    off = 0
    for kind, dim in cones:
        size = dim * (dim + 1) // 2 if kind == "psd" else dim
        offsets.append((kind, dim, off, size))
        off += size
    rows_G, rows_h = [], []
    dims = {"l": 0, "q": [], "s": []}
    for kind, dim, o, size in offsets:
        if kind == "nonneg":
            rows_G.append(G[o:o + size])
            rows_h.append(h[o:o + size])
            dims["l"] += size
    for kind, dim, o, size in offsets:
        if kind == "soc":
            rows_G.append(G[o:o + size])
            rows_h.append(h[o:o + size])
            dims["q"].append(dim)
    for kind, dim, o, size in offsets:
        if kind != "psd":
            continue
        Gs = np.zeros((dim * dim, n))
        hs = np.zeros(dim * dim)
        t = 0
        for j in range(dim):
            for i in range(j, dim):
                scale = 1.0 if i == j else np.sqrt(2.0)
                for (a, bb) in {(i, j), (j, i)}:
                    Gs[bb * dim + a] = G[o + t] / scale
                    hs[bb * dim + a] = h[o + t] / scale
                t += 1
        rows_G.append(Gs)
        rows_h.append(hs)
        dims["s"].append(dim)
    return np.vstack(rows_G), np.concatenate(rows_h), dims


def main():
    solvers.options.update(show_progress=False, abstol=1e-10, reltol=1e-10, feastol=1e-10, refinement=2, maxiters=200)
    for path in sys.argv[1:]:
        n, cones, c, A, b, G, h = read_problem(path)
        Gc, hc, dims = to_cvxopt(n, cones, G, h)
        args = dict(c=matrix(c), G=matrix(Gc), h=matrix(hc), dims=dims)
        if A.shape[0] > 0:
            args.update(A=matrix(A), b=matrix(b))
        sol = solvers.conelp(**args)
        po = sol["primal objective"]
        print(f"{path}: status={sol['status']} primal={po!r} dual={sol['dual objective']!r}")


if __name__ == "__main__":
    main()
