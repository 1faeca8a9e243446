"""Exact multivariate polynomial arithmetic over the rationals.

Polynomials are sparse term maps from exponent vectors to ``fractions.Fraction``
coefficients, kept in a canonical form: no zero coefficients, terms sorted
strictly descending under graded reverse lexicographic order. Three monomial
orders are provided (grevlex, lex, and a two-block elimination order), along
with multivariate division with quotient tracking, Buchberger's algorithm with
the coprime-lead and chain criteria, and elimination ideals via the block
order. Everything here is exact; no floating point enters any coefficient.

The Buchberger loop works internally on integer-coefficient primitive
polynomials (denominators cleared, content stripped after every reduction) to
keep bignum growth under control. Public results are monic with Fraction
coefficients.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Callable, Iterable, Mapping, Sequence, Union

Rat = Fraction
Exponents = tuple[int, ...]
Scalar = Union[int, Fraction]


class VariableMismatchError(ValueError):
    """Raised when two polynomials over different variable lists are combined."""


class PairBudgetExceededError(RuntimeError):
    """Raised when Buchberger processes more critical pairs than allowed."""

    def __init__(self, budget: int):
        super().__init__(f"critical pair budget of {budget} exhausted")
        self.budget = budget


class _PairCounter:
    """One pair allowance shared by every Buchberger run inside a computation."""

    __slots__ = ("budget", "used")

    def __init__(self, budget: int):
        self.budget = budget
        self.used = 0

    def spend(self) -> None:
        self.used += 1
        if self.used > self.budget:
            raise PairBudgetExceededError(self.budget)


# ---------------------------------------------------------------------------
# monomial orders


def _grevlex_key(exp: Exponents) -> tuple:
    return (sum(exp), tuple(-e for e in reversed(exp)))


@dataclass(frozen=True)
class GrevLex:
    """Graded reverse lexicographic order."""

    def key(self, varnames: Sequence[str]) -> Callable[[Exponents], tuple]:
        return _grevlex_key


@dataclass(frozen=True)
class Lex:
    """Pure lexicographic order, earlier variables more significant."""

    def key(self, varnames: Sequence[str]) -> Callable[[Exponents], tuple]:
        return lambda exp: exp


@dataclass(frozen=True)
class BlockElim:
    """Elimination order: the front block dominates, grevlex within each block.

    Any monomial containing a front variable sorts above every monomial free of
    them, so a Groebner basis under this order intersected with the back-block
    ring generates the elimination ideal.
    """

    front: tuple[str, ...]

    def key(self, varnames: Sequence[str]) -> Callable[[Exponents], tuple]:
        front = [i for i, v in enumerate(varnames) if v in self.front]
        back = [i for i, v in enumerate(varnames) if v not in self.front]
        unknown = set(self.front) - set(varnames)
        if unknown:
            raise VariableMismatchError(f"front variables {sorted(unknown)} not in ring")

        def key(exp: Exponents) -> tuple:
            return (
                _grevlex_key(tuple(exp[i] for i in front)),
                _grevlex_key(tuple(exp[i] for i in back)),
            )

        return key


MonomialOrder = Union[GrevLex, Lex, BlockElim]

GREVLEX = GrevLex()
LEX = Lex()


# ---------------------------------------------------------------------------
# polynomials


def _monomial_text(varnames: Sequence[str], exp: Exponents) -> str:
    parts = []
    for name, e in zip(varnames, exp):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


class MultiPoly:
    """Immutable sparse polynomial over an ordered variable list."""

    __slots__ = ("vars", "terms")

    def __init__(self, varnames: Sequence[str], terms: Mapping[Exponents, Scalar]):
        n = len(varnames)
        clean: dict[Exponents, Fraction] = {}
        for exp, coeff in terms.items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != n:
                raise ValueError(f"exponent vector {exp} does not match {n} variables")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            c = Fraction(coeff)
            if c:
                clean[exp] = clean.get(exp, Fraction(0)) + c
        object.__setattr__(self, "vars", tuple(varnames))
        object.__setattr__(
            self,
            "terms",
            tuple(
                sorted(
                    ((e, c) for e, c in clean.items() if c),
                    key=lambda t: _grevlex_key(t[0]),
                    reverse=True,
                )
            ),
        )

    def __setattr__(self, name, value):  # immutability
        raise AttributeError("MultiPoly is immutable")

    # -- constructors

    @classmethod
    def zero(cls, varnames: Sequence[str]) -> "MultiPoly":
        return cls(varnames, {})

    @classmethod
    def const(cls, varnames: Sequence[str], value: Scalar) -> "MultiPoly":
        return cls(varnames, {tuple(0 for _ in varnames): Fraction(value)})

    @classmethod
    def variable(cls, varnames: Sequence[str], name: str) -> "MultiPoly":
        idx = list(varnames).index(name)
        exp = tuple(1 if i == idx else 0 for i in range(len(varnames)))
        return cls(varnames, {exp: Fraction(1)})

    @classmethod
    def gens(cls, varnames: Sequence[str]) -> list["MultiPoly"]:
        return [cls.variable(varnames, v) for v in varnames]

    # -- basic queries

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e, _ in self.terms)

    def leading_term(self, order: MonomialOrder = GREVLEX) -> tuple[Exponents, Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        key = order.key(self.vars)
        return max(self.terms, key=lambda t: key(t[0]))

    def coefficient(self, exp: Exponents) -> Fraction:
        for e, c in self.terms:
            if e == exp:
                return c
        return Fraction(0)

    def as_dict(self) -> dict[Exponents, Fraction]:
        return dict(self.terms)

    # -- ring operations

    def _check(self, other: "MultiPoly") -> None:
        if self.vars != other.vars:
            raise VariableMismatchError(f"variable lists differ: {self.vars} vs {other.vars}")

    def __add__(self, other) -> "MultiPoly":
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.const(self.vars, other)
        self._check(other)
        acc = dict(self.terms)
        for e, c in other.terms:
            acc[e] = acc.get(e, Fraction(0)) + c
        return MultiPoly(self.vars, acc)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.vars, {e: -c for e, c in self.terms})

    def __sub__(self, other) -> "MultiPoly":
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.const(self.vars, other)
        return self + (-other)

    def __rsub__(self, other) -> "MultiPoly":
        return (-self) + other

    def __mul__(self, other) -> "MultiPoly":
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            return MultiPoly(self.vars, {e: k * c for e, k in self.terms})
        self._check(other)
        acc: dict[Exponents, Fraction] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, Fraction(0)) + c1 * c2
        return MultiPoly(self.vars, acc)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiPoly":
        if n < 0:
            raise ValueError("negative power")
        out = MultiPoly.const(self.vars, 1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.vars, self.terms))

    def __repr__(self) -> str:
        return f"MultiPoly({self.text()!r})"

    # -- evaluation and substitution

    def evaluate(self, point: Mapping[str, Union[float, Scalar]]):
        """Evaluate at a point; exact if all values are int/Fraction."""
        missing = [v for v in self.vars if v not in point]
        if missing:
            raise ValueError(f"no value for {missing}")
        vals = [point[v] for v in self.vars]
        total = None
        for exp, coeff in self.terms:
            term = coeff if all(isinstance(v, (int, Fraction)) for v in vals) else float(coeff)
            for v, e in zip(vals, exp):
                if e:
                    term = term * v**e
            total = term if total is None else total + term
        if total is None:
            return Fraction(0) if all(isinstance(v, (int, Fraction)) for v in vals) else 0.0
        return total

    def subs(self, replacements: Mapping[str, Union["MultiPoly", Scalar]]) -> "MultiPoly":
        """Substitute polynomials or constants for variables, exactly."""
        basis: list[MultiPoly] = []
        for v in self.vars:
            rep = replacements.get(v)
            if rep is None:
                basis.append(MultiPoly.variable(self.vars, v))
            elif isinstance(rep, MultiPoly):
                self._check(rep)
                basis.append(rep)
            else:
                basis.append(MultiPoly.const(self.vars, rep))
        out = MultiPoly.zero(self.vars)
        for exp, coeff in self.terms:
            term = MultiPoly.const(self.vars, coeff)
            for b, e in zip(basis, exp):
                for _ in range(e):
                    term = term * b
            out = out + term
        return out

    def restrict(self, varnames: Sequence[str]) -> "MultiPoly":
        """Re-express over a sub-list of variables; unused variables must be absent."""
        varnames = tuple(varnames)
        pos = []
        for v in varnames:
            if v not in self.vars:
                raise VariableMismatchError(f"{v} not a variable of this polynomial")
            pos.append(self.vars.index(v))
        keep = set(pos)
        acc: dict[Exponents, Fraction] = {}
        for exp, coeff in self.terms:
            if any(e and i not in keep for i, e in enumerate(exp)):
                raise VariableMismatchError("polynomial uses variables outside the restriction")
            acc[tuple(exp[i] for i in pos)] = coeff
        return MultiPoly(varnames, acc)

    def embed(self, varnames: Sequence[str]) -> "MultiPoly":
        """Re-express over a larger variable list containing this one's."""
        varnames = tuple(varnames)
        idx = []
        for v in self.vars:
            if v not in varnames:
                raise VariableMismatchError(f"{v} missing from target ring")
            idx.append(varnames.index(v))
        acc: dict[Exponents, Fraction] = {}
        for exp, coeff in self.terms:
            big = [0] * len(varnames)
            for i, e in zip(idx, exp):
                big[i] = e
            acc[tuple(big)] = coeff
        return MultiPoly(varnames, acc)

    # -- normal forms

    def content_and_primitive(self) -> tuple[Fraction, "MultiPoly"]:
        """Split into content * primitive integer part, primitive lead positive."""
        if not self.terms:
            return Fraction(0), self
        den = 1
        for _, c in self.terms:
            den = den * c.denominator // gcd(den, c.denominator)
        ints = [(e, int(c * den)) for e, c in self.terms]
        g = 0
        for _, c in ints:
            g = gcd(g, c)
        lead_c = ints[0][1]  # terms are grevlex-descending
        if lead_c < 0:
            g = -g
        prim = MultiPoly(self.vars, {e: Fraction(c // g) for e, c in ints})
        return Fraction(g, den), prim

    def primitive(self) -> "MultiPoly":
        return self.content_and_primitive()[1]

    def monic(self, order: MonomialOrder = GREVLEX) -> "MultiPoly":
        if not self.terms:
            return self
        _, lc = self.leading_term(order)
        return self * (1 / lc)

    def text(self) -> str:
        """Canonical display form: primitive integer coefficients, positive lead,
        terms grevlex-descending with explicit signs."""
        if not self.terms:
            return "0"
        prim = self.primitive()
        pieces = []
        for i, (exp, coeff) in enumerate(prim.terms):
            c = int(coeff)
            mono = _monomial_text(prim.vars, exp)
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if i == 0:
                pieces.append(body if c > 0 else f"-{body}")
            else:
                pieces.append(f"{'+' if c > 0 else '-'} {body}")
        return " ".join(pieces)


# ---------------------------------------------------------------------------
# division


def divide(
    p: MultiPoly, divisors: Sequence[MultiPoly], order: MonomialOrder = GREVLEX
) -> tuple[list[MultiPoly], MultiPoly]:
    """Multivariate division: returns (quotients, remainder) with
    p == sum(q_i * g_i) + r and no remainder term divisible by any divisor lead.

    Divisors are tried in list order, so the result is deterministic.
    """
    for g in divisors:
        p._check(g)
        if g.is_zero:
            raise ZeroDivisionError("zero divisor in division")
    key = order.key(p.vars)
    leads = [max(g.terms, key=lambda t: key(t[0])) for g in divisors]
    quots: list[dict[Exponents, Fraction]] = [dict() for _ in divisors]
    rem: dict[Exponents, Fraction] = {}
    work = dict(p.terms)

    def pop_lead() -> tuple[Exponents, Fraction]:
        e = max(work, key=key)
        return e, work.pop(e)

    while work:
        exp, coeff = pop_lead()
        for i, (eg, cg) in enumerate(leads):
            if all(a >= b for a, b in zip(exp, eg)):
                shift = tuple(a - b for a, b in zip(exp, eg))
                factor = coeff / cg
                quots[i][shift] = quots[i].get(shift, Fraction(0)) + factor
                for e2, c2 in divisors[i].terms:
                    if (e2, c2) == (eg, cg):
                        continue
                    e = tuple(a + b for a, b in zip(shift, e2))
                    v = work.get(e, Fraction(0)) - factor * c2
                    if v:
                        work[e] = v
                    else:
                        work.pop(e, None)
                break
        else:
            rem[exp] = rem.get(exp, Fraction(0)) + coeff
    return [MultiPoly(p.vars, q) for q in quots], MultiPoly(p.vars, rem)


def spoly(f: MultiPoly, g: MultiPoly, order: MonomialOrder = GREVLEX) -> MultiPoly:
    """S-polynomial: the lead-cancelling combination of f and g."""
    f._check(g)
    ef, cf = f.leading_term(order)
    eg, cg = g.leading_term(order)
    lcm = tuple(max(a, b) for a, b in zip(ef, eg))
    mf = MultiPoly(f.vars, {tuple(l - a for l, a in zip(lcm, ef)): 1 / cf})
    mg = MultiPoly(g.vars, {tuple(l - a for l, a in zip(lcm, eg)): 1 / cg})
    return mf * f - mg * g


# ---------------------------------------------------------------------------
# fraction-free engine used by reduce/buchberger

# internal term list: [(key, exp, int_coeff)] sorted descending by key
_Terms = list


def _to_int_terms(p: MultiPoly, key: Callable) -> _Terms:
    _, prim = p.content_and_primitive()
    out = [(key(e), e, int(c)) for e, c in prim.terms]
    out.sort(key=lambda t: t[0], reverse=True)
    return out


def _from_int_terms(varnames, terms: _Terms) -> MultiPoly:
    return MultiPoly(varnames, {e: Fraction(c) for _, e, c in terms})


def _strip_content(terms: _Terms) -> _Terms:
    if not terms:
        return terms
    g = 0
    for _, _, c in terms:
        g = gcd(g, c)
        if g == 1:
            return terms
    if terms[0][2] < 0:
        g = -g
    return [(k, e, c // g) for k, e, c in terms]


def _scale_merge(a: int, p: _Terms, b: int, q: _Terms, shift: Exponents, key: Callable) -> _Terms:
    """a*p + b*(x^shift * q), both inputs sorted descending; result sorted."""
    out: _Terms = []
    i = j = 0
    np_, nq = len(p), len(q)
    qk: _Terms = []
    for k, e, c in q:
        e2 = tuple(x + y for x, y in zip(e, shift))
        qk.append((key(e2), e2, c))
    # multiplying by a monomial preserves term order, so qk stays sorted
    while i < np_ and j < nq:
        kp, ep, cp = p[i]
        kq, eq, cq = qk[j]
        if kp > kq:
            out.append((kp, ep, a * cp))
            i += 1
        elif kq > kp:
            out.append((kq, eq, b * cq))
            j += 1
        else:
            c = a * cp + b * cq
            if c:
                out.append((kp, ep, c))
            i += 1
            j += 1
    for k, e, c in itertools.islice(p, i, None):
        out.append((k, e, a * c))
    for k, e, c in itertools.islice(qk, j, None):
        out.append((k, e, b * c))
    return out


def _normal_form_int(
    p: _Terms, basis: Sequence[_Terms], key: Callable, track_scale: bool = False
):
    """Full normal form of p against basis, fraction-free.

    With track_scale the result is (terms, s) where terms is the exact integer
    normal form of s*p (s a positive integer); otherwise the terms come back
    content-stripped with a positive lead.
    """
    rem: _Terms = []
    work = list(p)
    scale = 1
    while work:
        kw, ew, cw = work[0]
        reducer = None
        for g in basis:
            eg = g[0][1]
            ok = True
            for x, y in zip(ew, eg):
                if x < y:
                    ok = False
                    break
            if ok:
                reducer = g
                break
        if reducer is None:
            rem.append(work[0])
            work = work[1:]
            continue
        _, eg, cg = reducer[0]
        m = gcd(cw, cg)
        a = cg // m
        b = -(cw // m)
        if a < 0:
            a, b = -a, -b
        shift = tuple(x - y for x, y in zip(ew, eg))
        work = _scale_merge(a, work[1:], b, reducer[1:], shift, key)
        if a != 1:
            scale *= a
            if rem:
                rem = [(k, e, c * a) for k, e, c in rem]
    if track_scale:
        return rem, scale
    return _strip_content(rem)


def reduce(p: MultiPoly, basis: Sequence[MultiPoly], order: MonomialOrder = GREVLEX) -> MultiPoly:
    """Remainder of p on division by basis: p minus the remainder lies in the
    ideal generated by the basis and no remainder term is divisible by any
    basis leading term. Matches divide() but skips quotient bookkeeping."""
    for g in basis:
        p._check(g)
    gens = [g for g in basis if not g.is_zero]
    if p.is_zero or not gens:
        return p
    key = order.key(p.vars)
    content, prim = p.content_and_primitive()
    int_basis = [_to_int_terms(g, key) for g in gens]
    pt = [(key(e), e, int(c)) for e, c in prim.terms]
    pt.sort(key=lambda t: t[0], reverse=True)
    nf, scale = _normal_form_int(pt, int_basis, key, track_scale=True)
    if not nf:
        return MultiPoly.zero(p.vars)
    factor = content / scale
    return MultiPoly(p.vars, {e: factor * c for _, e, c in nf})


def _lcm_exp(a: Exponents, b: Exponents) -> Exponents:
    return tuple(max(x, y) for x, y in zip(a, b))


def _coprime(a: Exponents, b: Exponents) -> bool:
    return all(x == 0 or y == 0 for x, y in zip(a, b))


def buchberger(
    gens: Sequence[MultiPoly],
    order: MonomialOrder = GREVLEX,
    pair_budget: int = 200_000,
) -> list[MultiPoly]:
    """Reduced Groebner basis of the ideal generated by gens.

    Uses the coprime-lead criterion and the chain criterion to discard
    unnecessary pairs, selects pairs by minimal lcm degree, and strips integer
    content after every S-polynomial reduction. Raises PairBudgetExceededError
    once more than pair_budget pairs have been processed.
    """
    return _buchberger(gens, order, _PairCounter(pair_budget))


def _buchberger(
    gens: Sequence[MultiPoly],
    order: MonomialOrder,
    counter: _PairCounter,
) -> list[MultiPoly]:
    gens = [g for g in gens if not g.is_zero]
    if not gens:
        return []
    varnames = gens[0].vars
    for g in gens:
        g._check(gens[0])
    key = order.key(varnames)

    basis: list[_Terms] = []
    for g in gens:
        t = _to_int_terms(g, key)
        if t:
            basis.append(t)

    def lead(i: int) -> Exponents:
        return basis[i][0][1]

    heap: list[tuple] = []
    pending: set[tuple[int, int]] = set()

    def push_pairs(j: int) -> None:
        lj = lead(j)
        for i in range(j):
            l = _lcm_exp(lead(i), lj)
            heapq.heappush(heap, (sum(l), key(l), i, j))
            pending.add((i, j))

    for j in range(len(basis)):
        push_pairs(j)

    while heap:
        counter.spend()
        _, _, i, j = heapq.heappop(heap)
        pending.discard((i, j))
        li, lj = lead(i), lead(j)
        if _coprime(li, lj):
            continue
        lcm = _lcm_exp(li, lj)
        # chain criterion: some k with lead dividing the lcm and both pairs done
        skip = False
        for k in range(len(basis)):
            if k in (i, j):
                continue
            lk = lead(k)
            if all(a >= b for a, b in zip(lcm, lk)):
                a1, b1 = min(i, k), max(i, k)
                a2, b2 = min(j, k), max(j, k)
                if (a1, b1) not in pending and (a2, b2) not in pending:
                    skip = True
                    break
        if skip:
            continue
        # fraction-free S-polynomial
        ci = basis[i][0][2]
        cj = basis[j][0][2]
        m = gcd(ci, cj)
        s = _scale_merge(
            cj // m,
            _shift_terms(basis[i], tuple(a - b for a, b in zip(lcm, li)), key),
            -(ci // m),
            basis[j][1:],
            tuple(a - b for a, b in zip(lcm, lj)),
            key,
        )
        # the two lead terms cancel by construction; drop the residual lead if present
        s = [t for t in s if t[2]]
        s = _normal_form_int(_strip_content(s), basis, key)
        if s:
            basis.append(s)
            push_pairs(len(basis) - 1)

    return _reduce_basis(varnames, basis, order)


def _shift_terms(t: _Terms, shift: Exponents, key: Callable) -> _Terms:
    if all(s == 0 for s in shift):
        return t[1:]
    out = []
    for k, e, c in t[1:]:
        e2 = tuple(x + y for x, y in zip(e, shift))
        out.append((key(e2), e2, c))
    return out


def _reduce_basis(varnames, basis: list[_Terms], order: MonomialOrder) -> list[MultiPoly]:
    """Minimalize and tail-reduce an integer basis, return monic MultiPolys."""
    key = order.key(varnames)
    # minimal: drop any element whose lead is divisible by another's
    keep: list[_Terms] = []
    leads = [g[0][1] for g in basis]
    for i, g in enumerate(basis):
        li = leads[i]
        redundant = False
        for j, lj in enumerate(leads):
            if i == j:
                continue
            if all(a >= b for a, b in zip(li, lj)) and (li != lj or j < i):
                redundant = True
                break
        if not redundant:
            keep.append(g)
    # tail-reduce each against the others
    reduced: list[_Terms] = []
    for i, g in enumerate(keep):
        others = keep[:i] + keep[i + 1 :]
        nf = _normal_form_int(g, others, key) if others else _strip_content(g)
        if nf:
            reduced.append(nf)
    out = []
    for t in reduced:
        p = _from_int_terms(varnames, t)
        out.append(p.monic(order))
    out.sort(key=lambda p: key(p.leading_term(order)[0]))
    return out


# ---------------------------------------------------------------------------
# elimination


def _substitute_linear(
    gens: list[MultiPoly], eliminable: set[str]
) -> tuple[list[MultiPoly], set[str]]:
    """Use degree-1 generators to solve for eliminable variables and substitute
    them away. This preserves the elimination ideal over the kept variables and
    typically removes the affine joint-placement relations before Buchberger
    runs. Returns the rewritten generators and the variables actually removed.
    """
    if not gens:
        return gens, set()
    varnames = gens[0].vars
    removed: set[str] = set()
    work = list(gens)
    changed = True
    while changed:
        changed = False
        for gi, g in enumerate(work):
            if g.is_zero or g.total_degree() != 1:
                continue
            # pick the first eliminable variable with nonzero coefficient
            target = None
            for vi, v in enumerate(varnames):
                if v in removed or v not in eliminable:
                    continue
                unit = tuple(1 if k == vi else 0 for k in range(len(varnames)))
                c = g.coefficient(unit)
                if c:
                    target = (v, unit, c)
                    break
            if target is None:
                continue
            v, unit, c = target
            rest = MultiPoly(varnames, {e: k for e, k in g.terms if e != unit})
            replacement = rest * Fraction(-1, 1) * (1 / c)
            new_work = []
            for h in work:
                if h is g:
                    continue
                new_work.append(h.subs({v: replacement}))
            work = new_work
            removed.add(v)
            changed = True
            break
    return [h for h in work if not h.is_zero], removed


def eliminate(
    gens: Sequence[MultiPoly],
    keep: Iterable[str],
    pair_budget: int = 200_000,
) -> list[MultiPoly]:
    """Generators of the elimination ideal: the ideal of gens intersected with
    the subring on the kept variables. Returned polynomials live on exactly the
    kept variables, in their original ring order.

    Variables are dropped in stages, at most two per Groebner run, from the
    back of the ring forward. Elimination ideals compose, so the staged result
    equals a single run under a full block order while each intermediate basis
    stays small. Degree-1 generators are substituted away before every stage,
    and one pair budget is shared across all stages.
    """
    gens = [g for g in gens if not g.is_zero]
    keep = set(keep)
    if not gens:
        return []
    varnames = gens[0].vars
    for g in gens:
        g._check(gens[0])
    missing = keep - set(varnames)
    if missing:
        raise VariableMismatchError(f"kept variables {sorted(missing)} not in ring")
    keep_order = tuple(v for v in varnames if v in keep)

    counter = _PairCounter(pair_budget)
    work = list(gens)
    while True:
        ring = work[0].vars
        work, removed = _substitute_linear(work, set(ring) - keep)
        if not work:
            return []
        live = [v for v in ring if v not in removed]
        work = [g.restrict(live) for g in work]
        used: set[str] = set()
        for g in work:
            used |= {v for v, m in zip(g.vars, _used_mask(g)) if m}
        front_used = [v for v in live if v not in keep and v in used]
        if not front_used:
            break
        drop = tuple(front_used[-2:])
        basis = _buchberger(work, BlockElim(drop), counter)
        dropset = set(drop)
        work = [
            g
            for g in basis
            if not (dropset & {v for v, m in zip(g.vars, _used_mask(g)) if m})
        ]
        if not work:
            return []
        shrunk = [v for v in live if v not in dropset]
        work = [g.restrict(shrunk) for g in work]

    basis = _buchberger(work, GREVLEX, counter)
    out = []
    for g in basis:
        gused = {v for v, m in zip(g.vars, _used_mask(g)) if m}
        if gused <= keep:
            out.append(g.restrict(keep_order))
    return out


def _used_mask(p: MultiPoly) -> list[bool]:
    n = len(p.vars)
    mask = [False] * n
    for e, _ in p.terms:
        for i in range(n):
            if e[i]:
                mask[i] = True
    return mask
