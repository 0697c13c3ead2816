"""Explicit Morgenstern Cayley graphs over PGL_2(F_q[t]/h(t)) and their square subgroups.

Given an odd prime power ``q`` and a monic irreducible ``htilde(s)`` of degree
``m`` over F_q that stays irreducible as ``h(t) = htilde(t^2)``, the big field
is ``F_q[t]/h(t)`` (of order ``q^(2m)``). With ``eps`` a non-square of F_q and
``i`` a square root of ``eps`` in the big field, each solution ``(c, d)`` of
``eps d^2 - c^2 = 1`` gives a generator::

    gamma = [[t + 1,               c - d i],
             [(c + d i)(t^2 - 1),  t + 1  ]]

and ``delta = gamma^2``. The Cayley graph of the group generated by the
gammas is ``X``; the subgroup generated by the deltas is ``Y``.
"""

import json
import math
from dataclasses import dataclass, field

from . import ffpoly
from .ff import ExtensionField, FieldElement
from .ffpoly import GraphType, Polynomial
from .graph import cayley_build
from .projgroup import (ClosureCapExceeded, ProjectiveMatrix, generate_closure,
                        inverse_pairing, pgl2_order, pm_make, psl2_order)


@dataclass
class InstanceParams:
    """Validated construction parameters.

    Attributes:
        q: order of the base field.
        m: degree of ``htilde``.
        htilde: monic irreducible inert polynomial over F_q (variable ``s``).
        epsilon: non-square of F_q.
        base: the field F_q.
        h: ``htilde(t^2)``, irreducible of degree ``2m``.
        big: ``F_q[t]/h(t)``.
        i_root: square root of ``epsilon`` in ``big`` (least sort key by default).
        graph_type: PGL (bipartite X) or PSL (non-bipartite X).
    """

    q: int
    m: int
    htilde: Polynomial
    epsilon: FieldElement
    base: object = field(repr=False)
    h: Polynomial = field(repr=False)
    big: ExtensionField = field(repr=False)
    i_root: FieldElement = field(repr=False)
    graph_type: GraphType = GraphType.PGL_BIPARTITE

    def to_json(self):
        return {
            "q": self.q,
            "m": self.m,
            "htilde_coeffs": self.htilde.to_json(),
            "htilde": str(self.htilde),
            "epsilon": self.epsilon.to_json(),
            "i_root": self.i_root.to_json(),
            "h": str(self.h),
            "graph_type": self.graph_type.value,
        }


def least_nonsquare(F):
    return next(F.element(c) for c in sorted(F.elements(), key=F.sort_key)
                if c and not F.is_square(c))


def make_params(q, htilde=None, m=None, epsilon=None, negate_root=False):
    """Validate or auto-select construction parameters.

    Args:
        q: odd prime power.
        htilde: coefficient list (lowest first), :class:`Polynomial`, or ``None``
            to take the first PGL-type polynomial found by
            :func:`~ntexpander.ffpoly.search_parameters` of degree ``m``.
        m: degree, required when ``htilde`` is ``None``.
        epsilon: non-square of F_q (default: least non-square).
        negate_root: use ``-sqrt(epsilon)`` instead of the least root.

    Raises:
        ValueError: even ``q``, non-inert or reducible ``htilde``, square ``epsilon``,
            or no admissible ``htilde`` of the requested degree.
    """
    if q % 2 == 0:
        raise ValueError("q must be an odd prime power")
    F = ffpoly.base_field(q)
    if htilde is None:
        if m is None:
            raise ValueError("give either htilde or m")
        found = ffpoly.search_parameters(F, m, GraphType.PGL_BIPARTITE)
        if not found:
            raise ValueError(f"no inert PGL-type htilde of degree {m} over F_{q}")
        htilde = found[0]
    elif not isinstance(htilde, Polynomial):
        htilde = Polynomial(F, htilde, var="s")
    if htilde.field != F:
        raise ValueError("htilde is defined over a different field")
    if m is not None and htilde.degree != m:
        raise ValueError(f"htilde has degree {htilde.degree}, expected m={m}")
    if not htilde.is_monic() or not ffpoly.is_irreducible(htilde):
        raise ValueError(f"{htilde} is not monic irreducible")
    if not ffpoly.inert_test(htilde):
        raise ValueError(f"{htilde} is not inert: htilde(t^2) splits")
    graph_type = ffpoly.classify_graph_type(htilde)
    epsilon = least_nonsquare(F) if epsilon is None else F(epsilon)
    if epsilon.is_square():
        raise ValueError(f"epsilon={epsilon} is a square in F_{q}")
    h = ffpoly.pullback_square(htilde, var="t")
    big = ExtensionField(F, list(h.codes), var="t")
    i_code = big.sqrt(epsilon.code)
    if negate_root:
        i_code = big.neg(i_code)
    return InstanceParams(q=q, m=htilde.degree, htilde=htilde, epsilon=epsilon, base=F,
                          h=h, big=big, i_root=FieldElement(big, i_code),
                          graph_type=graph_type)


def params_from_descriptor(desc):
    """Parameters from a JSON/TOML-style mapping ``{q, m?, htilde_coeffs?, epsilon?}``."""
    return make_params(int(desc["q"]), htilde=desc.get("htilde_coeffs"), m=desc.get("m"),
                       epsilon=desc.get("epsilon"), negate_root=bool(desc.get("negate_root")))


def norm_solutions(F, epsilon):
    """All ``(c, d)`` in F_q^2 with ``eps d^2 - c^2 = 1``, ordered by d then c.

    Raises:
        ValueError: ``epsilon`` is a square (then the count is not q + 1).
    """
    eps = F(epsilon).code
    if F.is_square(eps):
        raise ValueError("epsilon must be a non-square")
    key = F.sort_key
    out = []
    for d in sorted(F.elements(), key=key):
        rhs = F.add(1, F.neg(F.mul(eps, F.mul(d, d))))
        # c^2 = eps d^2 - 1
        target = F.neg(rhs)
        for c in sorted(F.elements(), key=key):
            if F.mul(c, c) == target:
                out.append((F.element(c), F.element(d)))
    return out


@dataclass
class GeneratorSet:
    gammas: list
    deltas: list
    pairing: list
    solutions: list

    def to_json(self):
        return {
            "solutions": [[c.to_json(), d.to_json()] for c, d in self.solutions],
            "gammas": [g.to_json() for g in self.gammas],
            "deltas": [g.to_json() for g in self.deltas],
            "pairing": self.pairing,
        }


def gamma_matrix(params, c, d):
    """Generator for the norm solution ``(c, d)``, mapped into the big field."""
    big = params.big
    tau = FieldElement(big, big.generator())
    i = params.i_root
    c = FieldElement(big, c.code)
    d = FieldElement(big, d.code)
    return pm_make([[tau + 1, c - d * i], [(c + d * i) * (tau * tau - 1), tau + 1]])


def delta_closed_form(params, c, d):
    big = params.big
    tau = FieldElement(big, big.generator())
    i = params.i_root
    c = FieldElement(big, c.code)
    d = FieldElement(big, d.code)
    return pm_make([[big.one, c - d * i], [(c + d * i) * (tau * tau - 1), big.one]])


def build_generators(params):
    """gammas, their squares, and the inverse pairing.

    Raises:
        ValueError: a singular generator or a set that is not inverse-closed.
    """
    sols = norm_solutions(params.base, params.epsilon)
    if len(sols) != params.q + 1:
        raise AssertionError(f"expected {params.q + 1} norm solutions, got {len(sols)}")
    gammas = [gamma_matrix(params, c, d) for c, d in sols]
    if len(set(gammas)) != len(gammas):
        raise ValueError("generators are not distinct")
    deltas = [g * g for g in gammas]
    pairing = inverse_pairing(gammas)
    return GeneratorSet(gammas, deltas, pairing, sols)


def expected_orders(params):
    Q = params.q ** (2 * params.m)
    x = pgl2_order(Q) if params.graph_type is GraphType.PGL_BIPARTITE else psl2_order(Q)
    y = pgl2_order(params.q ** params.m)
    return x, y


@dataclass
class Instance:
    params: InstanceParams
    generators: GeneratorSet
    X_group: object
    X: object
    Y_group: object
    Y_graph: object
    expected_x: int
    expected_y: int

    @property
    def Y_ids(self):
        """Vertex ids in ``X`` of the elements of ``Y``, in ``Y`` order."""
        idx = self.X_group.index
        return [idx[g] for g in self.Y_group.elements]

    def summary(self):
        nx_, ny = len(self.X_group), len(self.Y_group)
        return {
            "params": self.params.to_json(),
            "x_order": nx_,
            "y_order": ny,
            "expected_x_order": self.expected_x,
            "expected_y_order": self.expected_y,
            "degree": self.X.degree(),
            "y_degree": self.Y_graph.degree(),
            "y_over_sqrt_x": ny / math.sqrt(nx_),
            "graph_type": self.params.graph_type.value,
        }


def build_instance(params, cap_factor=2, max_order=None):
    """Enumerate ``X`` and ``Y`` and build both Cayley graphs.

    Args:
        params: validated :class:`InstanceParams`.
        cap_factor: closure cap as a multiple of the predicted group order.
        max_order: refuse to start when the predicted ``|X|`` is larger.

    Raises:
        ClosureCapExceeded: the predicted order exceeds ``max_order``, or the
            closure outgrows ``cap_factor`` times the predicted order.
        ValueError: the enumerated orders contradict the predicted classification.
    """
    gens = build_generators(params)
    ex, ey = expected_orders(params)
    if max_order is not None and ex > max_order:
        raise ClosureCapExceeded(
            f"predicted |X| = {ex} exceeds max_order = {max_order}; "
            "choose a smaller q or m, or raise max_order (CLI: --max-order)")
    X_group = generate_closure(gens.gammas, cap=cap_factor * ex)
    if len(X_group) != ex:
        raise ValueError(f"|X| = {len(X_group)} but the classification predicts {ex}")
    Y_group = generate_closure(gens.deltas, cap=cap_factor * ey)
    X = cayley_build(X_group)
    Y_graph = cayley_build(Y_group)
    return Instance(params, gens, X_group, X, Y_group, Y_graph, ex, ey)


def instance_json(inst):
    return json.dumps(inst.summary(), indent=2, sort_keys=True)


__all__ = [
    "InstanceParams", "GeneratorSet", "Instance", "make_params", "params_from_descriptor",
    "norm_solutions", "build_generators", "build_instance", "gamma_matrix",
    "delta_closed_form", "expected_orders", "least_nonsquare", "ProjectiveMatrix",
]
