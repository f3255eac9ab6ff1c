"""Tiny operator-expression grammar used by config files.

An expression is a sum of weighted terms separated by '+'/'-':

    n(i)            on-site number operator
    hop(i,j)        b'_i b_j + h.c. for bosons, summed over spins for fermions
    id              identity
    ntot            total atom number

Weights are complex literals with '*', e.g. "0.5*n(0) - (0+1j)*hop(1,2)".
"""

import ast
import re

from .operators import hop_op, identity_op, number_op, total_number_op, zero_op

_TERM = re.compile(
    r"^(?:(?P<w>[^*]+)\*)?(?P<kind>n|hop|id|ntot)(?:\((?P<args>[^)]*)\))?$")


class ExpressionError(ValueError):
    pass


def _split_terms(text):
    """Split on top-level +/- keeping signs; parentheses only in weights."""
    terms, depth, start, sign = [], 0, 0, 1
    text = text.strip()
    if not text:
        raise ExpressionError("empty operator expression")
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and i > start:
            prev = text[start:i].strip()
            if prev and prev[-1] not in "e*+(-":  # not part of a literal/product
                terms.append((sign, prev))
                sign = 1 if ch == "+" else -1
                start = i + 1
        i += 1
    terms.append((sign, text[start:].strip()))
    return terms


def _parse_weight(text):
    try:
        value = ast.literal_eval(text.strip())
    except (ValueError, SyntaxError) as exc:
        raise ExpressionError(f"bad weight {text!r}") from exc
    return complex(value)


def parse_operator(text, basis):
    """Build a SparseComplexOperator from an expression string."""
    op = zero_op(basis)
    for sign, term in _split_terms(text):
        m = _TERM.match(term.replace(" ", ""))
        if not m:
            raise ExpressionError(f"cannot parse term {term!r}")
        weight = sign * (_parse_weight(m.group("w")) if m.group("w") else 1.0)
        kind = m.group("kind")
        args = m.group("args")
        if kind == "id":
            op = op + weight * identity_op(basis)
        elif kind == "ntot":
            op = op + weight * total_number_op(basis)
        elif kind == "n":
            site = int(args)
            if not 0 <= site < basis.n_sites:
                raise ExpressionError(f"site {site} outside the lattice")
            op = op + weight * number_op(basis, site)
        elif kind == "hop":
            i, j = (int(a) for a in args.split(","))
            for site in (i, j):
                if not 0 <= site < basis.n_sites:
                    raise ExpressionError(f"site {site} outside the lattice")
            if basis.statistics == "boson":
                hop = hop_op(basis, i, j)
                op = op + weight * (hop + hop.dag())
            else:
                for spin in ("up", "down"):
                    hop = hop_op(basis, i, j, spin)
                    op = op + weight * (hop + hop.dag())
    return op
