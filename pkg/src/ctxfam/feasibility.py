"""Exact feasibility of linear equality systems with variable lower bounds.

This is the arithmetic core behind weighted global-consistency checking
and general realisability: given equalities ``sum c_i x_i = r`` and bounds
``x_i >= b_i`` over rational unknowns, decide feasibility and produce a
witness.  Everything runs over ``fractions.Fraction``; feasibility is
decided exactly, never numerically.

The method is classical: Gaussian elimination removes the equalities and
expresses pivot variables as affine forms of the free ones, then
Fourier-Motzkin elimination projects the remaining inequalities one free
variable at a time, recording the bounds so a witness can be read back by
reverse substitution.  All orderings are fixed by the caller-supplied
variable order, so results are deterministic.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

Affine = Tuple[Fraction, Dict[int, Fraction]]  # const + sum coeffs[j] * x_j


def _substitute(
    coeffs: Dict[int, Fraction],
    rhs: Fraction,
    pivots: Dict[int, Affine],
) -> Tuple[Dict[int, Fraction], Fraction]:
    """Replace pivot variables inside an equality by their affine forms."""
    out: Dict[int, Fraction] = {}
    for j, c in coeffs.items():
        if c == 0:
            continue
        if j in pivots:
            const, expr = pivots[j]
            rhs -= c * const
            for k, e in expr.items():
                out[k] = out.get(k, Fraction(0)) + c * e
        else:
            out[j] = out.get(j, Fraction(0)) + c
    return {j: c for j, c in out.items() if c != 0}, rhs


def _eliminate_equalities(
    equalities: Sequence[Tuple[Dict[int, Fraction], Fraction]],
) -> Optional[Dict[int, Affine]]:
    """Gaussian elimination; None when the equalities are inconsistent.

    The returned map sends each pivot index to an affine form over free
    indices only.
    """
    pivots: Dict[int, Affine] = {}
    for coeffs, rhs in equalities:
        c, r = _substitute(coeffs, rhs, pivots)
        if not c:
            if r != 0:
                return None
            continue
        p = min(c)
        cp = c.pop(p)
        const = r / cp
        expr = {j: -cj / cp for j, cj in c.items()}
        for q, (qconst, qexpr) in list(pivots.items()):
            if p in qexpr:
                f = qexpr.pop(p)
                qconst += f * const
                for j, e in expr.items():
                    qexpr[j] = qexpr.get(j, Fraction(0)) + f * e
                pivots[q] = (qconst, {j: v for j, v in qexpr.items() if v != 0})
        pivots[p] = (const, expr)
    return pivots


def _normalise(coeffs: Dict[int, Fraction], rhs: Fraction) -> Tuple:
    """Canonical hashable key for an inequality, used for deduplication."""
    if not coeffs:
        return ((), rhs > 0)
    scale = None
    for j in sorted(coeffs):
        scale = abs(coeffs[j])
        break
    items = tuple((j, coeffs[j] / scale) for j in sorted(coeffs))
    return (items, rhs / scale)


def _project(
    inequalities: List[Tuple[Dict[int, Fraction], Fraction]],
    order: Sequence[int],
) -> Optional[List[Tuple[int, List[Affine], List[Affine]]]]:
    """Fourier-Motzkin elimination of every index in ``order``.

    Returns the per-variable bound records needed to reconstruct a
    witness, or None when a contradictory constant inequality appears.
    Inequalities read ``sum coeffs * x >= rhs``.
    """
    record: List[Tuple[int, List[Affine], List[Affine]]] = []
    current = inequalities
    for z in order:
        lowers: List[Affine] = []
        uppers: List[Affine] = []
        rest: List[Tuple[Dict[int, Fraction], Fraction]] = []
        for coeffs, rhs in current:
            cz = coeffs.get(z, Fraction(0))
            if cz == 0:
                rest.append((coeffs, rhs))
                continue
            remainder = {j: c for j, c in coeffs.items() if j != z}
            bound: Affine = (rhs / cz, {j: -c / cz for j, c in remainder.items()})
            if cz > 0:
                lowers.append(bound)
            else:
                uppers.append(bound)
        fresh: Dict[Tuple, Tuple[Dict[int, Fraction], Fraction]] = {}
        for coeffs, rhs in rest:
            if not coeffs:
                if rhs > 0:
                    return None
                continue
            fresh.setdefault(_normalise(coeffs, rhs), (coeffs, rhs))
        for lconst, lexpr in lowers:
            for uconst, uexpr in uppers:
                coeffs: Dict[int, Fraction] = dict(uexpr)
                for j, c in lexpr.items():
                    coeffs[j] = coeffs.get(j, Fraction(0)) - c
                coeffs = {j: c for j, c in coeffs.items() if c != 0}
                rhs = lconst - uconst
                if not coeffs:
                    if rhs > 0:
                        return None
                    continue
                fresh.setdefault(_normalise(coeffs, rhs), (coeffs, rhs))
        record.append((z, lowers, uppers))
        current = [fresh[k] for k in sorted(fresh, key=repr)]
    for coeffs, rhs in current:
        if not coeffs and rhs > 0:
            return None
    return record


def _evaluate(affine: Affine, values: Dict[int, Fraction]) -> Fraction:
    const, expr = affine
    return const + sum((c * values[j] for j, c in expr.items()), Fraction(0))


def find_rational_solution(
    equalities: Iterable[Tuple[Mapping[Hashable, Fraction], Fraction]],
    lower_bounds: Mapping[Hashable, Fraction],
    variables: Sequence[Hashable],
) -> Optional[Dict[Hashable, Fraction]]:
    """A rational witness for the system, or None when infeasible.

    ``equalities`` are pairs (coefficient map, right-hand side) read as
    ``sum c_i x_i = r``; ``lower_bounds`` gives per-variable constraints
    ``x >= b`` (variables absent from it are unbounded below).  The
    variable order fixes pivot choice and elimination order, making the
    witness deterministic.
    """
    index = {v: i for i, v in enumerate(variables)}
    eqs = [
        ({index[v]: Fraction(c) for v, c in coeffs.items() if c != 0}, Fraction(rhs))
        for coeffs, rhs in equalities
    ]
    pivots = _eliminate_equalities(eqs)
    if pivots is None:
        return None

    inequalities: List[Tuple[Dict[int, Fraction], Fraction]] = []
    for v, b in sorted(lower_bounds.items(), key=lambda kv: index[kv[0]]):
        i = index[v]
        bound = Fraction(b)
        if i in pivots:
            const, expr = pivots[i]
            coeffs = dict(expr)
            if not coeffs:
                if const < bound:
                    return None
                continue
            inequalities.append((coeffs, bound - const))
        else:
            inequalities.append(({i: Fraction(1)}, bound))

    free = sorted(set(index.values()) - set(pivots), reverse=True)
    record = _project(inequalities, free)
    if record is None:
        return None

    values: Dict[int, Fraction] = {}
    for z, lowers, uppers in reversed(record):
        lo = max((_evaluate(a, values) for a in lowers), default=None)
        hi = min((_evaluate(a, values) for a in uppers), default=None)
        if lo is not None and hi is not None and lo > hi:
            raise AssertionError("projection invariant broken: empty interval")
        if lo is not None:
            values[z] = lo
        elif hi is not None:
            values[z] = hi
        else:
            values[z] = Fraction(0)
    for p in sorted(pivots):
        values[p] = _evaluate(pivots[p], values)

    witness = {v: values[index[v]] for v in variables}
    for coeffs, rhs in equalities:
        total = sum((Fraction(c) * witness[v] for v, c in coeffs.items()), Fraction(0))
        if total != Fraction(rhs):
            raise AssertionError("witness fails an equality; solver bug")
    for v, b in lower_bounds.items():
        if witness[v] < Fraction(b):
            raise AssertionError("witness fails a lower bound; solver bug")
    return witness
