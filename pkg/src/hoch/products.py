"""Products: shuffle on chains, cup on classical cochains, wedge on
higher cochains, and the cochain complexes they act on.

Sign policy: every sign is produced by the explicit sorting permutations
in dga.apply_setmap / dga.koszul_sign plus the fixed totalization signs;
the exactness of unit/associativity/commutativity/Leibniz at chain level
is enforced by the test battery.
"""

from itertools import combinations

from . import dga
from .dga import apply_setmap
from .homalg import NEG_INF, POS_INF, ChainComplex
from .hochschild import (
    TruncationError,
    _internal_diff,
    _is_nondegenerate,
    _level_monomials,
    _monomial_data,
    _pad,
)


# -- shuffle product on Hochschild chains ------------------------------------


def _shuffles(p, q):
    """(mu, nu, sign): mu the p rising positions, nu the q rising positions,
    sign of the associated permutation of {0..p+q-1}."""
    universe = list(range(p + q))
    for mu in combinations(universe, p):
        nu = tuple(x for x in universe if x not in mu)
        perm = list(mu) + list(nu)
        sign = 1
        for i in range(len(perm)):
            for j in range(i + 1, len(perm)):
                if perm[i] > perm[j]:
                    sign = -sign
        yield mu, nu, sign


def _apply_degeneracies(Y, A, level, mono, indices):
    """Apply s_{i_k} ... s_{i_1} (innermost first) to a monomial; the result
    is ±(single monomial) at level + len(indices)."""
    f = A.coefficients.field
    coeff = f.one
    cur = mono
    n = level
    for i in indices:
        setmap = tuple(Y.deg_tab[n][i])
        image = apply_setmap(A, setmap, cur)
        if len(image) != 1:
            raise AssertionError("degeneracy image is not monomial")
        (cur, c), = image.items()
        cur = _pad(cur, Y.card(n + 1), A.unit)
        coeff = f.mul(coeff, c)
        n += 1
    return cur, coeff


def _slotwise_product(A, m1, m2):
    """(a_1⊗..⊗a_k)·(b_1⊗..⊗b_k): interleave Koszul sign, then slot
    products; returns {monomial: coeff}."""
    f = A.coefficients.field
    sign = 1
    for s in range(len(m1)):
        if A.degrees[m2[s]] % 2 == 0:
            continue
        for t in range(s + 1, len(m1)):
            if A.degrees[m1[t]] % 2:
                sign = -sign
    results = [(f.coerce(sign), ())]
    for s in range(len(m1)):
        prods = A.product(m1[s], m2[s])
        new = []
        for c, prefix in results:
            for k, e in prods.items():
                new.append((f.mul(c, e), prefix + (k,)))
        results = new
        if not results:
            break
    out = {}
    for c, mono in results:
        dga._acc(out, mono, c, f)
    return out


def shuffle_product(H, u, v):
    """Chain-level shuffle product on CH_Y(A); u, v: {(level, mono): coeff}.

    Requires a commutative algebra; the result is reduced into the
    normalized basis of H (degenerate summands vanish).
    """
    A = H.algebra
    if not A.commutative:
        raise ValueError("shuffle product requires a commutative algebra")
    if H.module is not None:
        raise ValueError("shuffle product lives on coefficient-free chains")
    Y = H.space
    f = A.coefficients.field
    index = H.complex.index
    out = {}
    for (p, monoU), cu in u.items():
        for (q, monoV), cv in v.items():
            if p + q > len(H.levels) - 1:
                raise TruncationError(
                    "shuffle target level exceeds the materialized window"
                )
            base = f.mul(cu, cv)
            # bigraded interchange: the simplicial degree of v crosses the
            # internal degree of u
            int_u = _monomial_data(Y, p, A, None, monoU)[0]
            if (q * int_u) % 2:
                base = f.neg(base)
            for mu, nu, sgn in _shuffles(p, q):
                m1, c1 = _apply_degeneracies(Y, A, p, monoU, nu)
                m2, c2 = _apply_degeneracies(Y, A, q, monoV, mu)
                coeff = f.mul(base, f.mul(f.coerce(sgn), f.mul(c1, c2)))
                for mono, c in _slotwise_product(A, m1, m2).items():
                    label = (p + q, mono)
                    total = f.mul(coeff, c)
                    if f.is_zero(total):
                        continue
                    if label in index:
                        dga._acc(out, label, total, f)
                    else:
                        if _is_nondegenerate(Y, p + q, A, None, mono):
                            raise TruncationError(
                                "shuffle product leaves the materialized "
                                "window"
                            )
    return out


def unit_chain(H):
    """The unit of the shuffle product: the all-units level-0 monomial."""
    mono = tuple([H.algebra.unit] * H.space.card(0))
    return {(0, mono): H.algebra.coefficients.field.one}


# -- classical Hochschild cochains and the cup product -----------------------


class ClassicalCochains:
    """The normalized Hochschild cochain complex C^n(A, A) = Hom(Ā^{⊗n}, A)
    with the Gerstenhaber cup product; independent of the simplicial
    machinery.

    A cochain of arity n is {arg_tuple: {a_pos: coeff}} over non-unit
    argument tuples.
    """

    def __init__(self, A, top):
        self.A = A
        self.top = top
        self.nonunit = A.nonunit()
        self.args = []
        for n in range(top + 1):
            monos = [()]
            for _ in range(n):
                monos = [m + (p,) for m in monos for p in self.nonunit]
            self.args.append(monos)

    def internal_degree(self, n, value_pos, arg):
        A = self.A
        return A.degrees[value_pos] - sum(A.degrees[p] for p in arg)

    def as_complex(self):
        """ChainComplex with labels (n, arg, value_pos); degree n + int."""
        A = self.A
        out = ChainComplex(A.coefficients)
        for n in range(self.top + 1):
            for arg in self.args[n]:
                for v in range(A.dim):
                    out.add_element(
                        (n, arg, v), n + self.internal_degree(n, v, arg), 0
                    )
        f = A.coefficients.field
        for n in range(self.top):
            for arg in self.args[n]:
                for v in range(A.dim):
                    img = self.coboundary({(n, arg, v): f.one})
                    for tgt, c in img.items():
                        out.set_differential_entry((n, arg, v), tgt, c)
        # missing arities n > top contribute degrees >= n + min A-degree
        hi_cert = self.top + min(A.degrees[p] for p in range(A.dim))
        return out.freeze(window=(NEG_INF, hi_cert), support=(NEG_INF, POS_INF))

    def coboundary(self, cochain):
        """Graded Hochschild coboundary on {(n, arg, v): coeff}."""
        A = self.A
        f = A.coefficients.field
        out = {}
        for (n, arg, v), coeff in cochain.items():
            fdeg = self.internal_degree(n, v, arg)
            # first face: a_1 · f(a_2 ... ), with a_1 crossing f
            for a1 in self.nonunit:
                sgn = f.coerce(-1 if (A.degrees[a1] * fdeg) % 2 else 1)
                for k, c in A.product(a1, v).items():
                    dga._acc(
                        out,
                        (n + 1, (a1,) + arg, k),
                        f.mul(coeff, f.mul(sgn, c)),
                        f,
                    )
            # inner faces: f(..., a_i a_{i+1}, ...)
            for i in range(n):
                sgn = f.coerce(-1 if (i + 1) % 2 else 1)
                for a, b_ in self._insertions(arg, i):
                    dga._acc(out, (n + 1, a, v), f.mul(coeff, f.mul(sgn, b_)), f)
            # last face: f(a_1 ... a_n) · a_{n+1}
            sgn_last = f.coerce(-1 if (n + 1) % 2 else 1)
            for an in self.nonunit:
                for k, c in A.product(v, an).items():
                    dga._acc(
                        out,
                        (n + 1, arg + (an,), k),
                        f.mul(coeff, f.mul(sgn_last, c)),
                        f,
                    )
            # internal differential of the DG algebra
            sgn_int = f.coerce(-1 if n % 2 else 1)
            for k, c in A.d(v).items():
                dga._acc(out, (n, arg, k), f.mul(coeff, f.mul(sgn_int, c)), f)
            run = 0
            sgn_phi = f.coerce(1 if fdeg % 2 else -1)
            for s, p in enumerate(arg):
                # phi ∘ d on slot s: replace a_s by preimages under d
                for src in self.nonunit:
                    for q, c in A.d(src).items():
                        if q != p:
                            continue
                        t = arg[:s] + (src,) + arg[s + 1 :]
                        ksgn = f.coerce(
                            -1
                            if (sum(A.degrees[x] for x in arg[:s])) % 2
                            else 1
                        )
                        dga._acc(
                            out,
                            (n, t, v),
                            f.mul(
                                coeff,
                                f.mul(sgn_int, f.mul(sgn_phi, f.mul(ksgn, c))),
                            ),
                            f,
                        )
        return out

    def _insertions(self, arg, i):
        """Merge slots i, i+1 of the extended argument list: all (new_arg,
        coeff) for (a_1 .. a_i a_{i+1} .. a_{n+1}) hitting the stored arg."""
        # produce arity n+1 arguments whose i-th merge gives ``arg``
        A = self.A
        f = A.coefficients.field
        n = len(arg)
        res = []
        for a in self.nonunit:
            for b_ in self.nonunit:
                prod = A.product(a, b_)
                c = prod.get(arg[i]) if i < n else None
                if c is None:
                    continue
                new_arg = arg[:i] + (a, b_) + arg[i + 1 :]
                res.append((new_arg, c))
        return res

    def cup(self, fch, gch):
        """(f ∪ g)(a_1..a_{p+q}) = ± f(a_1..a_p) g(a_{p+1}..a_{p+q})."""
        A = self.A
        f = A.coefficients.field
        out = {}
        for (p, arg1, v1), c1 in fch.items():
            for (q, arg2, v2), c2 in gch.items():
                gdeg = self.internal_degree(q, v2, arg2)
                cross = sum(A.degrees[x] for x in arg1)
                sgn = f.coerce(-1 if (gdeg * cross) % 2 else 1)
                for k, c in A.product(v1, v2).items():
                    dga._acc(
                        out,
                        (p + q, arg1 + arg2, k),
                        f.mul(f.mul(c1, c2), f.mul(sgn, c)),
                        f,
                    )
        return out


def cup_product_s1(A, fch, gch, top=None):
    """Convenience wrapper: Gerstenhaber cup product of classical cochains."""
    cc = ClassicalCochains(A, top if top is not None else 8)
    return cc.cup(fch, gch)


# -- higher Hochschild cochains ----------------------------------------------


class CochainComplexData:
    """CH^Y(A, M) = Hom_A(CH_Y(A), M) over a pointed simplicial set.

    Level-n basis: (n, arg, m) with arg a normalized monomial on the
    non-basepoint slots (unit at the basepoint) and m a module basis
    element; weights are collapsed to 0.
    """

    def __init__(self, Y, A, module, window=(0, 4), top=None):
        if not Y.is_pointed():
            raise ValueError("cochains require a pointed space")
        if A.max_weight is not None:
            raise TruncationError(
                "cochains need a finite-dimensional algebra"
            )
        self.Y = Y
        self.A = A
        self.module = module
        f = A.coefficients.field
        min_deg_m = min(
            (module.degrees[m] for m in range(module.dim)), default=0
        )
        if top is None:
            top = window[1] + 1 - min_deg_m
        if top > Y.top_level:
            raise TruncationError(
                f"{Y.name} materialized to level {Y.top_level}, need {top}"
            )
        self.top = top
        self.args = []
        for n in range(top + 1):
            monos = _level_monomials(Y, n, A, None, None, None, True)
            bp = Y.basepoint[n]
            self.args.append([m for m in monos if m[bp] == A.unit])
        out = ChainComplex(A.coefficients)
        for n in range(top + 1):
            for arg in self.args[n]:
                adeg, _ = _monomial_data(Y, n, A, None, arg)
                for m in range(module.dim):
                    out.add_element(
                        (n, arg, m), n + module.degrees[m] - adeg, 0
                    )
        self._arg_index = [
            {arg: k for k, arg in enumerate(a)} for a in self.args
        ]
        # One pass over the source arguments of each level: dualize the
        # (normalized) face and internal-differential matrices.
        for lvl in range(1, top + 1):
            n = lvl - 1
            bp_tgt = Y.basepoint[n]
            argset = self._arg_index[n]
            for i in range(lvl + 1):
                setmap = tuple(Y.face_tab[lvl][i])
                sgn_face = f.coerce(-1 if i % 2 else 1)
                for u in self.args[lvl]:
                    image = apply_setmap(A, setmap, u)
                    for w, lam in image.items():
                        full = _pad(w, Y.card(n), A.unit)
                        b = full[bp_tgt]
                        rest = tuple(
                            p if s != bp_tgt else A.unit
                            for s, p in enumerate(full)
                        )
                        if rest not in argset:
                            continue
                        before = sum(A.degrees[p] for p in full[:bp_tgt])
                        adeg = _monomial_data(Y, n, A, None, rest)[0]
                        for m in range(module.dim):
                            phid = module.degrees[m] - adeg
                            sgn = 1
                            if A.degrees[b] % 2 and before % 2:
                                sgn = -sgn
                            if A.degrees[b] % 2 and phid % 2:
                                sgn = -sgn
                            for q, c in module.act_left(b, m).items():
                                val = f.mul(
                                    sgn_face,
                                    f.mul(f.coerce(sgn), f.mul(lam, c)),
                                )
                                if not f.is_zero(val):
                                    out.set_differential_entry(
                                        (n, rest, m), (lvl, u, q), val
                                    )
        for n in range(top + 1):
            sgn_n = f.coerce(-1 if n % 2 else 1)
            argset = self._arg_index[n]
            for u in self.args[n]:
                # d_M after phi
                for m in range(module.dim):
                    for q, c in module.d(m).items():
                        out.set_differential_entry(
                            (n, u, m), (n, u, q), f.mul(sgn_n, c)
                        )
                # -(-1)^{|phi|_int} phi ∘ d, dualized
                for tgt, c in _internal_diff(A, None, None, u).items():
                    if tgt not in argset:
                        continue
                    adeg = _monomial_data(Y, n, A, None, tgt)[0]
                    for m in range(module.dim):
                        phid = module.degrees[m] - adeg
                        sgn_phi = f.coerce(1 if phid % 2 else -1)
                        val = f.mul(sgn_n, f.mul(sgn_phi, c))
                        if not f.is_zero(val):
                            out.set_differential_entry(
                                (n, tgt, m), (n, u, m), val
                            )
        # missing levels n > top only touch total degrees >= n + min_deg_m
        self.complex = out.freeze(
            window=(NEG_INF, top + min_deg_m),
            support=(NEG_INF, POS_INF),
        )

    def differential(self, element):
        """The total coboundary on a cochain {label: coeff}."""
        return self.complex.d_apply(element)


def _iterated_face_setmap(Y, top, count, which):
    """Composite of ``count`` last (or first) faces from level ``top``."""
    comp = list(range(Y.card(top)))
    for lvl in range(top, top - count, -1):
        idx = lvl if which == "last" else 0
        tab = Y.face_tab[lvl][idx]
        comp = [tab[s] for s in comp]
    return tuple(comp)


def _evaluate_pushed(data, fch_level, level_from, count, which, u_mono):
    """Value in M of ((δ^which)^count f)(u): push the argument down through
    the iterated face, let the basepoint factor act on the output.

    fch_level: {(p, arg, m): coeff} at the fixed level p = level_from-count.
    Returns {module_pos: coeff}.
    """
    Y, A, module = data.Y, data.A, data.module
    f = A.coefficients.field
    p = level_from - count
    setmap = _iterated_face_setmap(Y, level_from, count, which)
    bp = Y.basepoint[p]
    out = {}
    image = apply_setmap(A, setmap, u_mono)
    for w, lam in image.items():
        full = _pad(w, Y.card(p), A.unit)
        b = full[bp]
        rest = tuple(
            v if s != bp else A.unit for s, v in enumerate(full)
        )
        before = sum(A.degrees[full[s]] for s in range(bp))
        for (pp, arg, m), coeff in fch_level.items():
            if arg != rest:
                continue
            phid = (
                module.degrees[m] - _monomial_data(Y, pp, A, None, arg)[0]
            )
            sgn = 1
            if A.degrees[b] % 2 and before % 2:
                sgn = -sgn
            if A.degrees[b] % 2 and phid % 2:
                sgn = -sgn
            for q, c in module.act_left(b, m).items():
                dga._acc(
                    out, q, f.mul(coeff, f.mul(f.coerce(sgn), f.mul(lam, c))), f
                )
    return out


def wedge_product(data_x, data_y, data_wedge, fch, gch):
    """μ_∨: CH^X(A, B) ⊗ CH^Y(A, B) -> CH^{X∨Y}(A, B).

    The module of the data must be the algebra itself (same basis), so
    that values multiply.  The Eilenberg-Zilber step sends f ⊗ g at
    bidegree (p, q) to (δ^last)^q f ⊗ (δ^0)^p g evaluated on the two halves
    of a wedge argument; the basepoint slot collects a_0.
    """
    A = data_x.A
    if data_y.A is not A or data_wedge.A is not A:
        raise ValueError("wedge factors must share the algebra")
    if not (data_x.Y.is_pointed() and data_y.Y.is_pointed()):
        raise ValueError("wedge factors must be pointed")
    f = A.coefficients.field
    W = data_wedge.Y
    out = {}
    for (glabel, gcoeff) in gch.items():
        q, garg, gm = glabel
        gdeg = (
            data_y.module.degrees[gm]
            - _monomial_data(data_y.Y, q, A, None, garg)[0]
        )
        gpart = {glabel: gcoeff}
        by_level_f = {}
        for (p, arg, m), c in fch.items():
            by_level_f.setdefault(p, {})[(p, arg, m)] = c
        for p, fpart in by_level_f.items():
            n = p + q
            if n > data_wedge.top:
                raise TruncationError("wedge product exceeds the window")
            for warg in data_wedge.args[n]:
                xfull, yfull = _split_wedge_arg(
                    data_x.Y, data_y.Y, W, n, warg, A
                )
                valF = _evaluate_pushed(data_x, fpart, n, q, "last", xfull)
                if not valF:
                    continue
                valG = _evaluate_pushed(data_y, gpart, n, p, "first", yfull)
                if not valG:
                    continue
                # g crosses the x-half of the argument
                xdeg = _monomial_data(data_x.Y, n, A, None, xfull)[0]
                sgn = f.coerce(-1 if (gdeg * xdeg) % 2 else 1)
                for mX, cf in valF.items():
                    for mY, cg in valG.items():
                        for k, c in A.product(mX, mY).items():
                            dga._acc(
                                out,
                                (n, warg, k),
                                f.mul(f.mul(cf, cg), f.mul(sgn, c)),
                                f,
                            )
    return out


def _split_wedge_arg(X, Ysp, W, n, warg, A):
    """Split a wedge argument into monomials over the factor slot sets."""
    xfull = [A.unit] * X.card(n)
    yfull = [A.unit] * Ysp.card(n)
    pos = 1
    bx = X.basepoint[n]
    for s in range(X.card(n)):
        if s == bx:
            continue
        xfull[s] = warg[pos]
        pos += 1
    by = Ysp.basepoint[n]
    for s in range(Ysp.card(n)):
        if s == by:
            continue
        yfull[s] = warg[pos]
        pos += 1
    return tuple(xfull), tuple(yfull)
