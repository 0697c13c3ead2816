"""Adjacency spectra, Ramanujan checks and the explicit zero-eigenvalue eigenfunction."""

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .graph import is_bipartite

DENSE_LIMIT = int(os.environ.get("NTEXPANDER_DENSE_LIMIT", "4096"))
DENSE_TOL = 1e-9
ITERATIVE_K = 8


class SpectrumError(RuntimeError):
    """Eigensolver refused the input or failed to converge."""


@dataclass
class SpectrumReport:
    """Spectrum of a regular graph with trivial eigenvalues separated out.

    Attributes:
        degree: common vertex degree ``d``.
        eigenvalues: computed eigenvalues, sorted descending. The full spectrum
            for the dense method, the trivial ones plus the top nontrivial ones
            by magnitude for the iterative method.
        trivial: the trivial eigenvalues found (``d``, and ``-d`` if bipartite).
        nontrivial: the remaining computed eigenvalues.
        max_nontrivial: largest ``|lambda|`` over ``nontrivial``.
        ramanujan_bound: ``2 sqrt(d - 1)``.
        margin: ``ramanujan_bound - max_nontrivial``.
        method: ``"dense"`` or ``"iterative"``.
        tol: tolerance the solver was run at.
        max_residual: largest ``||A v - lambda v||`` over the checked pairs.
    """

    degree: int
    eigenvalues: np.ndarray
    trivial: list
    nontrivial: np.ndarray
    max_nontrivial: float
    ramanujan_bound: float
    margin: float
    method: str
    tol: float
    bipartite: bool
    max_residual: float = 0.0
    checks: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "degree": self.degree,
            "n_eigenvalues": int(len(self.eigenvalues)),
            "trivial": [float(x) for x in self.trivial],
            "max_nontrivial": float(self.max_nontrivial),
            "ramanujan_bound": float(self.ramanujan_bound),
            "margin": float(self.margin),
            "method": self.method,
            "tol": self.tol,
            "bipartite": self.bipartite,
            "max_residual": float(self.max_residual),
            "checks": self.checks,
        }


def _require_regular(X):
    if not X.is_regular():
        raise ValueError("spectral bookkeeping needs a regular graph")
    return X.degree()


def _split_trivial(vals, d, bipartite, tol):
    vals = np.sort(np.asarray(vals, dtype=float))[::-1]
    rest = list(vals)
    trivial = []
    wanted = [float(d)] + ([-float(d)] if bipartite else [])
    for w in wanted:
        j = int(np.argmin([abs(x - w) for x in rest]))
        if abs(rest[j] - w) > tol * max(1, d):
            raise SpectrumError(f"trivial eigenvalue {w} not found (closest {rest[j]})")
        trivial.append(rest.pop(j))
    return vals, trivial, np.array(rest)


def _dense(X, d, bipartite, tol, limit):
    if X.n > limit:
        raise SpectrumError(f"dense eigensolve limited to n <= {limit}, got n = {X.n}")
    A = X.adjacency_matrix().astype(float)
    if not np.allclose(A, A.T):
        raise ValueError("adjacency matrix is not symmetric")
    w, V = np.linalg.eigh(A)
    resid = float(np.max(np.linalg.norm(A @ V - V * w, axis=0))) if X.n else 0.0
    if resid > tol * max(1, d) * max(1, X.n):
        raise SpectrumError(f"eigensolver residual {resid:.3g} too large")
    checks = {
        # trace and trace of A^2 (loops and directed edges)
        "trace": bool(abs(w.sum() - np.trace(A)) <= 1e-9 * max(1.0, float(X.m))),
        "trace_sq": bool(abs((w ** 2).sum() - float((A * A.T).sum()))
                         <= 1e-9 * max(1.0, float(X.m))),
    }
    if bipartite:
        s = np.sort(w)
        checks["symmetric"] = bool(np.max(np.abs(s + s[::-1])) <= 1e-8 * max(1, d))
    return w, resid, checks


def _iterative(X, d, bipartite, tol, k, maxiter):
    n = X.n
    A = X.sparse_adjacency().astype(float)
    defl = [np.ones(n) / math.sqrt(n)]
    if bipartite:
        col = np.array(is_bipartite(X).coloring, dtype=float)
        defl.append((1 - 2 * col) / math.sqrt(n))
    Q = np.column_stack(defl)

    def project(v):
        return v - Q @ (Q.T @ v)

    op = LinearOperator((n, n), matvec=lambda v: project(A @ project(np.ravel(v))),
                        dtype=float)
    k = min(k, n - len(defl) - 1)
    if k < 1:
        raise SpectrumError("graph too small for the iterative method; use dense")
    try:
        w, V = eigsh(op, k=k, which="LM", tol=tol, maxiter=maxiter,
                     v0=project(np.linspace(1.0, 2.0, n)))
    except ArpackNoConvergence as exc:
        raise SpectrumError(f"iterative eigensolver did not converge: {exc}") from exc
    resid = float(np.max(np.linalg.norm(A @ V - V * w, axis=0)))
    triv = [float(d)] + ([-float(d)] if bipartite else [])
    return np.concatenate([w, triv]), resid, {"deflated": len(defl)}


def adjacency_spectrum(X, method="auto", tol=None, dense_limit=None, k=ITERATIVE_K,
                       maxiter=None):
    """Spectrum of a regular connected graph.

    Args:
        X: regular, connected multigraph.
        method: ``"dense"``, ``"iterative"``, or ``"auto"`` (dense up to the limit).
        tol: solver tolerance; defaults to 1e-9 for dense and 1e-10 for iterative.
        dense_limit: largest ``n`` accepted by the dense path (default from the
            ``NTEXPANDER_DENSE_LIMIT`` environment variable, else 4096).
        k: number of nontrivial eigenvalues extracted by the iterative path.
        maxiter: iteration cap for the iterative path.

    Raises:
        SpectrumError: size limit exceeded, missing trivial eigenvalue, or non-convergence.
    """
    d = _require_regular(X)
    limit = DENSE_LIMIT if dense_limit is None else dense_limit
    if method == "auto":
        method = "dense" if X.n <= limit else "iterative"
    bip = is_bipartite(X).bipartite
    if method == "dense":
        tol = DENSE_TOL if tol is None else tol
        w, resid, checks = _dense(X, d, bip, tol, limit)
    elif method == "iterative":
        tol = 1e-10 if tol is None else tol
        w, resid, checks = _iterative(X, d, bip, tol, k, maxiter)
    else:
        raise ValueError(f"unknown method {method!r}")
    vals, trivial, rest = _split_trivial(w, d, bip, max(tol, 1e-8))
    mx = float(np.max(np.abs(rest))) if len(rest) else 0.0
    bound = 2 * math.sqrt(d - 1) if d >= 1 else 0.0
    return SpectrumReport(degree=d, eigenvalues=vals, trivial=trivial, nontrivial=rest,
                          max_nontrivial=mx, ramanujan_bound=bound, margin=bound - mx,
                          method=method, tol=tol, bipartite=bip, max_residual=resid,
                          checks=checks)


def ramanujan_audit(X, tol=1e-8, **kw):
    """``(passed, report)``: passed iff every nontrivial ``|lambda| <= 2 sqrt(d-1) + tol``."""
    rep = adjacency_spectrum(X, **kw)
    return rep.max_nontrivial <= rep.ramanujan_bound + tol, rep


def zero_eigenfunction(X, Y_group, Y_graph):
    """Integer vector on the vertices of ``X``: +1 / -1 on the two sides of ``Y``, 0 elsewhere.

    The +1 side is the bipartition class of ``Y_graph`` containing the identity.

    Raises:
        ValueError: ``Y`` is empty, ``Y_graph`` is not bipartite, or ``Y`` is not in ``X``.
    """
    if len(Y_group) == 0:
        raise ValueError("empty subgroup")
    bip = is_bipartite(Y_graph)
    if not bip.bipartite:
        raise ValueError("Y_graph is not bipartite; the sign pattern is undefined")
    index = X.closure.index
    ident_side = bip.coloring[Y_group.index[Y_group.elements[0]]]
    f = np.zeros(X.n, dtype=np.int64)
    for g, c in zip(Y_group.elements, bip.coloring):
        v = index.get(g)
        if v is None:
            raise ValueError("Y is not contained in the vertex set of X")
        f[v] = 1 if c == ident_side else -1
    return f


def apply_adjacency(X, f):
    """``(A f)(x) = sum over edges e with t(e) = x of f(s(e))`` in exact integers."""
    f = np.asarray(f)
    out = np.zeros(X.n, dtype=object)
    np.add.at(out, X.dst, f[X.src].astype(object))
    return out


def verify_Af_zero(X, f):
    """``(ok, first_violation)`` where ``first_violation`` is ``None`` or ``(x, (Af)(x))``."""
    f = np.asarray(f)
    if f.shape != (X.n,):
        raise ValueError(f"vector has shape {f.shape}, expected ({X.n},)")
    out = apply_adjacency(X, f)
    bad = [i for i, v in enumerate(out) if v != 0]
    if bad:
        return False, (bad[0], int(out[bad[0]]))
    return True, None


def eigenfunction_stats(f):
    f = np.asarray(f, dtype=np.int64)
    support = int(np.count_nonzero(f))
    norm2 = int(np.dot(f, f))
    return {
        "support": support,
        "sum": int(f.sum()),
        "norm_sq": norm2,
        "sup_over_l2": (float(np.max(np.abs(f))) / math.sqrt(norm2)) if norm2 else 0.0,
    }


def spectrum_csv(report):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "eigenvalue"])
    for i, lam in enumerate(report.eigenvalues):
        w.writerow([i, repr(float(lam))])
    return buf.getvalue()


def eigenfunction_json(f):
    return json.dumps({str(i): int(v) for i, v in enumerate(f) if v}, indent=1)
