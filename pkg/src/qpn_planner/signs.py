"""Sign algebra: the chain (multiply) and parallel (add) operators."""

from functools import reduce
from typing import Dict, Iterable, List, Mapping, Tuple

from qpn_planner.errors import ReductionError
from qpn_planner.network import (
    Condition,
    QualitativeInfluence,
    Sign,
    all_assignments,
)

P, N, Z, U = Sign.POSITIVE, Sign.NEGATIVE, Sign.ZERO, Sign.UNKNOWN

_MULTIPLY: Dict[Tuple[Sign, Sign], Sign] = {
    (P, P): P, (P, N): N, (P, Z): Z, (P, U): U,
    (N, P): N, (N, N): P, (N, Z): Z, (N, U): U,
    (Z, P): Z, (Z, N): Z, (Z, Z): Z, (Z, U): Z,
    (U, P): U, (U, N): U, (U, Z): Z, (U, U): U,
}  # fmt: skip

_ADD: Dict[Tuple[Sign, Sign], Sign] = {
    (P, P): P, (P, N): U, (P, Z): P, (P, U): U,
    (N, P): U, (N, N): N, (N, Z): N, (N, U): U,
    (Z, P): P, (Z, N): N, (Z, Z): Z, (Z, U): U,
    (U, P): U, (U, N): U, (U, Z): U, (U, U): U,
}  # fmt: skip


def multiply(s1: Sign, s2: Sign) -> Sign:
    return _MULTIPLY[(s1, s2)]


def add(s1: Sign, s2: Sign) -> Sign:
    return _ADD[(s1, s2)]


def add_all(signs: Iterable[Sign]) -> Sign:
    return reduce(add, signs, Sign.ZERO)


def chain(i1: QualitativeInfluence, i2: QualitativeInfluence) -> QualitativeInfluence:
    """Combine a->b with b->c into a->c; inconsistent condition pairs emit nothing."""
    if i1.target != i2.source:
        raise ReductionError(
            f"cannot chain {i1.source}->{i1.target} with {i2.source}->{i2.target}"
        )
    entries = []
    for c1, s1 in i1.entries:
        for c2, s2 in i2.entries:
            joint = c1.conjoin(c2)
            if joint is not None:
                entries.append((joint, multiply(s1, s2)))
    return QualitativeInfluence(i1.source, i2.target, tuple(entries))


def parallel(i1: QualitativeInfluence, i2: QualitativeInfluence) -> QualitativeInfluence:
    """Combine two influences on the same link over a common refinement of their conditions."""
    if (i1.source, i1.target) != (i2.source, i2.target):
        raise ReductionError(
            f"cannot add {i1.source}->{i1.target} and {i2.source}->{i2.target}"
        )
    variables = sorted(set(i1.condition_variables) | set(i2.condition_variables))
    cells = [
        (Condition.of(cell), add(i1.sign_at(cell), i2.sign_at(cell)))
        for cell in all_assignments(variables)
    ]
    return QualitativeInfluence(i1.source, i1.target, merge_cells(cells))


def sign_in_context(influence: QualitativeInfluence, context: Mapping[str, bool]) -> Sign:
    """Sign of an influence over the part of the condition space consistent with `context`.

    Cells left free by the context are combined with the parallel operator, so
    any uncovered or disagreeing cell yields Unknown.
    """
    free = [v for v in influence.condition_variables if v not in context]
    signs = []
    for cell in all_assignments(free):
        full = {**context, **cell}
        signs.append(influence.sign_at(full))
    return add_all(signs)


def normalize(influence: QualitativeInfluence) -> QualitativeInfluence:
    """Rebuild entries as a mutually exclusive partition; overlaps are combined with add."""
    variables = list(influence.condition_variables)
    cells = []
    for cell in all_assignments(variables):
        hits = [sign for cond, sign in influence.entries if cond.holds_in(cell)]
        if hits:
            cells.append((Condition.of(cell), add_all(hits)))
    return QualitativeInfluence(influence.source, influence.target, merge_cells(cells))


def merge_cells(
    cells: List[Tuple[Condition, Sign]],
) -> Tuple[Tuple[Condition, Sign], ...]:
    """Merge pairs of equal-signed cubes that differ in exactly one literal."""
    current = list(cells)
    merged = True
    while merged:
        merged = False
        for i in range(len(current)):
            for j in range(i + 1, len(current)):
                combined = _merge_pair(current[i], current[j])
                if combined is not None:
                    current = [c for k, c in enumerate(current) if k not in (i, j)]
                    current.append(combined)
                    merged = True
                    break
            if merged:
                break
    return tuple(sorted(current, key=lambda e: (len(e[0].literals), e[0].literals)))


def _merge_pair(
    a: Tuple[Condition, Sign], b: Tuple[Condition, Sign]
) -> Tuple[Condition, Sign] | None:
    (ca, sa), (cb, sb) = a, b
    if sa != sb or ca.variables != cb.variables:
        return None
    differing = [
        var for (var, va), (_, vb) in zip(ca.literals, cb.literals) if va != vb
    ]
    if len(differing) != 1:
        return None
    return ca.without(differing[0]), sa
