"""Hochschild complexes over simplicial sets, Bar constructions, oracles.

The main builder realizes the level-n space A^{⊗Y_n} (module coefficients
at the basepoint when present), faces induced by the face maps of Y with
Koszul signs, and the normalized total complex.  Classical small-complex
oracles (the textbook Hochschild complex, the periodic resolution for
truncated polynomial algebras) live here too, on deliberately separate
code paths.
"""

from . import dga
from .dga import apply_setmap
from .homalg import (
    NEG_INF,
    POS_INF,
    ChainComplex,
    ChainMap,
    Coefficients,
    SimplicialChainComplex,
    total_complex,
)
from .linalg import SparseMatrix, rank


class TruncationError(ValueError):
    """The materialized simplicial set cannot certify the request."""


class EnumerationCapError(TruncationError):
    """A level basis would exceed the configured feasibility cap."""


class HochschildComplex:
    """CH_Y(A) (or CH_Y(A, M)): the normalized total complex plus the
    labeling of tensor slots by simplices, kept for products."""

    def __init__(self, space, algebra, module, complex_, levels, normalized):
        self.space = space
        self.algebra = algebra
        self.module = module
        self.complex = complex_
        self.levels = levels  # level -> list of monomial tuples
        self.normalized = normalized

    def homology_dims(self, window, weights=None, threads=1):
        return self.complex.homology_dims(window, weights, threads)

    def betti(self, window, weights=None, threads=1):
        return self.complex.betti(window, weights, threads)


# -- monomial enumeration ---------------------------------------------------


def _level_monomials(Y, n, A, module, weights, min_int, normalized, cap=None):
    """Monomials at level n: tuples of basis positions per slot of Y_n.

    The basepoint slot (when a module is given) carries module positions.
    Normalized: the non-unit algebra support must meet every degeneracy-
    image complement.  Budgets: total weight in ``weights`` (if given),
    total internal degree >= min_int (if given).
    """
    card = Y.card(n)
    if module is not None and Y.basepoint is None:
        raise ValueError("module coefficients require a pointed space")
    bp = Y.basepoint[n] if (module is not None) else None
    complements = []
    if normalized and n >= 1:
        complements = [frozenset(c) for c in Y.nondegenerate_complements(n)]
        if any(not c for c in complements):
            return []
    max_wt = max(weights) if weights is not None else None
    wt_set = set(weights) if weights is not None else None
    nonunit = [p for p in range(A.dim) if p != A.unit]
    if A.max_weight is not None and weights is None:
        raise dga.AlgebraClassError(
            f"{A.name}: weights must be specified for a per-weight-"
            "materialized algebra"
        )

    # the basepoint slot never helps covering (it is degenerate-stable)
    if bp is not None:
        complements = [c - {bp} for c in complements]
        if any(not c for c in complements):
            return []
    algebra_slots = [s for s in range(card) if s != bp]
    slot_index = {s: i for i, s in enumerate(algebra_slots)}
    # for the prune: max slot-recursion index touching each complement
    last_idx = [
        max(slot_index[s] for s in c) if c else -1 for c in complements
    ]
    covers = [[] for _ in algebra_slots]  # slot idx -> complement ids
    for ci, c in enumerate(complements):
        for s in c:
            covers[slot_index[s]].append(ci)
    finished_at = [[] for _ in range(len(algebra_slots) + 1)]
    for ci, li in enumerate(last_idx):
        finished_at[li + 1].append(ci)
    out = []

    def rec(idx, assign, wt, deg, covered):
        if cap is not None and len(out) > cap:
            raise EnumerationCapError(
                f"level {n} basis exceeds the feasibility cap ({cap})"
            )
        # complements fully below the cursor must already be covered
        for ci in finished_at[idx]:
            if ci not in covered:
                return
        if idx == len(algebra_slots):
            out.append((dict(assign), wt, deg))
            return
        rec(idx + 1, assign, wt, deg, covered)  # unit in this slot
        slot = algebra_slots[idx]
        for p in nonunit:
            w2 = wt + A.weights[p]
            d2 = deg + A.degrees[p]
            if max_wt is not None and w2 > max_wt:
                continue
            if min_int is not None and d2 < min_int:
                continue
            assign[slot] = p
            newly = [ci for ci in covers[idx] if ci not in covered]
            rec(idx + 1, assign, w2, d2, covered | set(newly))
            del assign[slot]

    rec(0, {}, 0, 0, frozenset())

    monos = []
    module_range = range(module.dim) if module is not None else [None]
    for assign, wt, deg in out:
        for mpos in module_range:
            if mpos is None:
                total_wt, total_deg = wt, deg
            else:
                total_wt = wt + module.weights[mpos]
                total_deg = deg + module.degrees[mpos]
            if wt_set is not None and total_wt not in wt_set:
                continue
            if min_int is not None and total_deg < min_int:
                continue
            mono = []
            for s in range(card):
                if s == bp:
                    mono.append(mpos)
                else:
                    mono.append(assign.get(s, A.unit))
            monos.append(tuple(mono))
    monos.sort()
    return monos


def _monomial_data(Y, n, A, module, mono):
    bp = Y.basepoint[n] if module is not None else None
    deg = 0
    wt = 0
    for s, p in enumerate(mono):
        if s == bp:
            deg += module.degrees[p]
            wt += module.weights[p]
        else:
            deg += A.degrees[p]
            wt += A.weights[p]
    return deg, wt


def _is_nondegenerate(Y, n, A, module, mono):
    if n == 0:
        return True
    bp = Y.basepoint[n] if module is not None else None
    support = {
        s
        for s, p in enumerate(mono)
        if s != bp and p != A.unit
    }
    for c in Y.nondegenerate_complements(n):
        cc = c - {bp} if bp is not None else c
        if not (support & cc):
            return False
    return True


def _internal_diff(A, module, bp, mono):
    """Slotwise differential with Koszul signs; {target_mono: coeff}."""
    f = A.coefficients.field
    out = {}
    run = 0  # parity of the total degree left of the current slot
    for s, p in enumerate(mono):
        if bp is not None and s == bp:
            img = module.d(p)
            deg = module.degrees[p]
        else:
            img = A.d(p)
            deg = A.degrees[p]
        if img:
            sign = f.coerce(-1 if run % 2 else 1)
            for q, c in img.items():
                t = list(mono)
                t[s] = q
                dga._acc(out, tuple(t), f.mul(sign, c), f)
        run += deg
    return out


# -- truncation bounds ------------------------------------------------------


def required_level(Y, A, window, weights):
    """(level, exhausted): materialization needed to certify ``window``.

    Class-(ii) route: per-weight vanishing through the space's hitting
    certificate.  Fallback: degree-level bound (all basis degrees <= 0),
    level 1 - lo certifies chains down to degree lo - 1.
    """
    lo = window[0]
    n_deg = max(0, 1 - lo)
    if weights is not None and A.weight_graded and Y.hitcap_coeff is not None:
        n_wt = Y.hitcap_coeff * (max(weights) if weights else 0)
        if n_wt <= n_deg:
            return n_wt, True
    if A.max_weight is not None and weights is None:
        raise TruncationError(
            f"{A.name}: weights must be specified for a per-weight-"
            "materialized algebra"
        )
    return n_deg, False


# -- the main builders -------------------------------------------------------


def build_simplicial_ch(Y, A, module=None, window=(-6, 0), weights=None,
                        normalized=True, top_level=None, exhausted=None,
                        monomial_cap=None):
    """The simplicial chain complex n -> A^{⊗Y_n} (module at basepoint).

    Module coefficients must be symmetric bimodules here: the Eq.-7
    source-order merges only exercise one side of the action.  Genuine
    bimodules over the circle go through the classical complex instead.
    """
    if module is not None and not module.symmetric:
        raise ValueError(
            "simplicial module coefficients require a symmetric bimodule"
        )
    if top_level is None:
        top_level, exhausted = required_level(Y, A, window, weights)
    if top_level > Y.top_level:
        raise TruncationError(
            f"{Y.name} materialized to level {Y.top_level}, "
            f"need {top_level}"
        )
    min_int = None if exhausted else window[0] - 1
    coeff = A.coefficients
    f = coeff.field
    levels = []
    level_monos = []
    for n in range(top_level + 1):
        monos = _level_monomials(
            Y, n, A, module, weights,
            min_int if min_int is None else min_int + n,
            normalized, cap=monomial_cap,
        )
        c = ChainComplex(coeff)
        bp = Y.basepoint[n] if module is not None else None
        for mono in monos:
            d, w = _monomial_data(Y, n, A, module, mono)
            c.add_element(mono, d, w)
        for mono in monos:
            for tgt, v in _internal_diff(A, module, bp, mono).items():
                if tgt in c.index:
                    c.set_differential_entry(mono, tgt, v)
                else:
                    if _is_nondegenerate(Y, n, A, module, tgt) and (
                        min_int is None
                        or _monomial_data(Y, n, A, module, tgt)[0] >= min_int + n
                    ):
                        raise AssertionError("missing internal target")
        levels.append(c.freeze(support=(NEG_INF, 0)))
        level_monos.append(monos)
    faces = {}
    for n in range(1, top_level + 1):
        src = levels[n]
        tgt = levels[n - 1]
        bp_src = Y.basepoint[n] if module is not None else None
        bp_tgt = Y.basepoint[n - 1] if module is not None else None
        for r in range(n + 1):
            setmap = tuple(Y.face_tab[n][r])
            fmap = ChainMap(src, tgt, shift=0)
            mmap = {bp_src: bp_tgt} if module is not None else None
            for mono in level_monos[n]:
                image = apply_setmap(
                    A, setmap, mono, module=module, module_slot_map=mmap
                )
                for timg, v in image.items():
                    full = _pad(timg, Y.card(n - 1), A.unit)
                    if full in tgt.index:
                        fmap.set_entry(mono, full, v)
                    elif normalized:
                        if _is_nondegenerate(Y, n - 1, A, module, full):
                            raise AssertionError("missing face target")
                    else:
                        raise AssertionError("missing face target")
            faces[(n, r)] = fmap
    degeneracies = {}
    if not normalized:
        for n in range(top_level):
            src = levels[n]
            tgt = levels[n + 1]
            bp_src = Y.basepoint[n] if module is not None else None
            bp_tgt = Y.basepoint[n + 1] if module is not None else None
            for i in range(n + 1):
                setmap = tuple(Y.deg_tab[n][i])
                smap = ChainMap(src, tgt, shift=0)
                mmap = {bp_src: bp_tgt} if module is not None else None
                for mono in level_monos[n]:
                    image = apply_setmap(
                        A, setmap, mono, module=module, module_slot_map=mmap
                    )
                    for timg, v in image.items():
                        full = _pad(timg, Y.card(n + 1), A.unit)
                        if full in tgt.index:
                            smap.set_entry(mono, full, v)
                degeneracies[(n, i)] = smap
    return SimplicialChainComplex(levels, faces, degeneracies, exhausted)


def _pad(mono, card, unit):
    if len(mono) == card:
        return mono
    return tuple(list(mono) + [unit] * (card - len(mono)))


def hochschild_chain(Y, A, window=(-6, 0), weights=None, normalized=True,
                     monomial_cap=None):
    """CH_Y(A) as a HochschildComplex with a certified window."""
    scc = build_simplicial_ch(Y, A, None, window, weights, normalized,
                              monomial_cap=monomial_cap)
    tot = total_complex(scc, normalized=False)
    tot.weights_materialized = set(weights) if weights is not None else None
    return HochschildComplex(
        Y, A, None, tot, [list(l.index) for l in scc.levels], normalized
    )


def hochschild_chain_with_coeff(Y, A, module, window=(-6, 0), weights=None,
                                normalized=True, monomial_cap=None):
    """CH_Y(A, M): the basepoint slot carries M.

    M must be a symmetric bimodule for a general pointed space; the circle
    admits genuine bimodules through the classical complex.
    """
    if not Y.is_pointed():
        raise ValueError("module coefficients require a pointed space")
    if not module.symmetric:
        if Y.name != "circle":
            raise ValueError(
                "genuine bimodule coefficients are only supported over the "
                "circle"
            )
        classical = classical_hochschild(A, module, window)
        return HochschildComplex(Y, A, module, classical, [], True)
    scc = build_simplicial_ch(Y, A, module, window, weights, normalized,
                              monomial_cap=monomial_cap)
    tot = total_complex(scc, normalized=False)
    tot.weights_materialized = set(weights) if weights is not None else None
    return HochschildComplex(
        Y, A, module, tot, [list(l.index) for l in scc.levels], normalized
    )


# -- cochains (implementation in products.py, re-exported there) ------------


def hochschild_cochain(Y, A, module, window=(0, 4)):
    from .products import CochainComplexData

    return CochainComplexData(Y, A, module, window).complex


# -- classical oracles -------------------------------------------------------

# (deliberately independent of the simplicial machinery above)


def classical_hochschild(A, module, window=(-6, 0)):
    """The textbook Hochschild complex M ⊗ Ā^{⊗n}, normalized.

    Faces: d_0 = m·a_1, middle merges, d_n moves a_n to the front with its
    Koszul sign and acts on the left.  Total degree of level n is the
    internal degree minus n; the internal differential carries (-1)^n.
    """
    f = A.coefficients.field
    lo = window[0]
    top = max(0, 1 - lo)
    nonunit = A.nonunit()
    out = ChainComplex(A.coefficients)
    levels = []
    for n in range(top + 1):
        monos = []

        def build(prefix):
            if len(prefix) == n:
                monos.append(tuple(prefix))
                return
            for p in nonunit:
                build(prefix + [p])

        build([])
        level = []
        for m in range(module.dim):
            for mono in monos:
                deg = module.degrees[m] + sum(A.degrees[p] for p in mono)
                wt = module.weights[m] + sum(A.weights[p] for p in mono)
                if deg - n < lo - 1:
                    continue
                label = (n, m, mono)
                out.add_element(label, deg - n, wt)
                level.append(label)
        levels.append(level)
    for n in range(top + 1):
        for (lvl, m, mono) in levels[n]:
            src = (lvl, m, mono)
            sign_n = f.coerce(-1 if n % 2 else 1)
            # internal differential
            run = module.degrees[m]
            for q, c in module.d(m).items():
                _add_if(out, src, (n, q, mono), f.mul(sign_n, c), f)
            for s, p in enumerate(mono):
                sgn = f.coerce(-1 if run % 2 else 1)
                for q, c in A.d(p).items():
                    t = list(mono)
                    t[s] = q
                    if q == A.unit:
                        continue
                    _add_if(
                        out, src, (n, m, tuple(t)),
                        f.mul(sign_n, f.mul(sgn, c)), f,
                    )
                run += A.degrees[p]
            if n == 0:
                continue
            # d_0: m · a_1
            for q, c in module.act_right(m, mono[0]).items():
                _add_if(out, src, (n - 1, q, mono[1:]), c, f)
            # middle faces
            for r in range(1, n):
                sgn = f.coerce(-1 if r % 2 else 1)
                for q, c in A.product(mono[r - 1], mono[r]).items():
                    if q == A.unit:
                        continue
                    t = mono[: r - 1] + (q,) + mono[r + 1 :]
                    _add_if(out, src, (n - 1, m, t), f.mul(sgn, c), f)
            # d_n: a_n moves to the front and acts on the left
            last = mono[-1]
            crossed = module.degrees[m] + sum(A.degrees[p] for p in mono[:-1])
            sgn = f.coerce(-1 if (A.degrees[last] * crossed) % 2 else 1)
            sgn = f.mul(sgn, f.coerce(-1 if n % 2 else 1))
            for q, c in module.act_left(last, m).items():
                _add_if(out, src, (n - 1, q, mono[:-1]), f.mul(sgn, c), f)
    return out.freeze(window=(lo - 1, POS_INF), support=(NEG_INF, 0))


def _add_if(co, src, tgt, val, f):
    if f.is_zero(val):
        return
    if tgt in co.index:
        co.set_differential_entry(src, tgt, val)


def twisted_hochschild(B, mon, window=(-6, 0)):
    """HH(B, B twisted by mon) via the classical complex."""
    return classical_hochschild(B, dga.twisted_bimodule(B, mon), window)


def periodic_resolution_dims(truncation, twist_scalar, window=(-6, 0),
                             coefficients=None):
    """Betti of HH(k[x]/x^N, twisted by x -> c x) from the 2-periodic
    small free resolution; an oracle independent of every complex builder.

    d_odd(x^e)  = (c - 1)  x^{e+1}
    d_even(x^e) = (sum_{a<N} c^a) x^{e+N-1}

    >>> periodic_resolution_dims(2, 1, (-3, 0))
    {-3: 1, -2: 1, -1: 1, 0: 2}
    >>> periodic_resolution_dims(2, -1, (-3, 0))
    {-3: 1, -2: 1, -1: 1, 0: 1}
    """
    coefficients = coefficients or Coefficients()
    f = coefficients.field
    N = truncation
    c = f.coerce(twist_scalar)
    gamma = f.zero
    power = f.one
    for _ in range(N):
        gamma = f.add(gamma, power)
        power = f.mul(power, c)

    def mat(scalar, shift):
        m = SparseMatrix(N, N, f)
        for e in range(N):
            if e + shift < N and not f.is_zero(scalar):
                m.set(e + shift, e, scalar)
        return m

    d_odd = mat(f.sub(c, f.one), 1)
    d_even = mat(gamma, N - 1)
    lo, hi = window
    out = {}
    for deg in range(lo, min(hi, 0) + 1):
        i = -deg
        d_in = d_odd if i % 2 == 0 else d_even  # map C_{i+1} -> C_i
        d_out = d_even if i % 2 == 0 else d_odd  # map C_i -> C_{i-1}
        r_in = rank(d_in)
        r_out = rank(d_out) if i > 0 else 0
        out[deg] = N - r_in - r_out
    return out


# -- Bar constructions -------------------------------------------------------


def two_sided_bar(right_module, A, left_module, window=(-6, 0)):
    """Bar(M_r, A, M_l) = ⊕ M_r ⊗ Ā^{⊗n} ⊗ M_l, reduced, total degree
    -n + internal, internal differential signed (-1)^n."""
    f = A.coefficients.field
    lo = window[0]
    top = max(0, 1 - lo)
    nonunit = A.nonunit()
    out = ChainComplex(A.coefficients)
    levels = []
    for n in range(top + 1):
        monos = [()]
        for _ in range(n):
            monos = [m + (p,) for m in monos for p in nonunit]
        level = []
        for mr in range(right_module.dim):
            for ml in range(left_module.dim):
                for mono in monos:
                    deg = (
                        right_module.degrees[mr]
                        + left_module.degrees[ml]
                        + sum(A.degrees[p] for p in mono)
                    )
                    if deg - n < lo - 1:
                        continue
                    wt = (
                        right_module.weights[mr]
                        + left_module.weights[ml]
                        + sum(A.weights[p] for p in mono)
                    )
                    label = (n, mr, mono, ml)
                    out.add_element(label, deg - n, wt)
                    level.append(label)
        levels.append(level)
    for n in range(top + 1):
        for (lvl, mr, mono, ml) in levels[n]:
            src = (lvl, mr, mono, ml)
            sign_n = f.coerce(-1 if n % 2 else 1)
            run = right_module.degrees[mr]
            for q, c in right_module.d(mr).items():
                _add_if(out, src, (n, q, mono, ml), f.mul(sign_n, c), f)
            for s, p in enumerate(mono):
                sgn = f.coerce(-1 if run % 2 else 1)
                for q, c in A.d(p).items():
                    if q == A.unit:
                        continue
                    t = list(mono)
                    t[s] = q
                    _add_if(
                        out, src, (n, mr, tuple(t), ml),
                        f.mul(sign_n, f.mul(sgn, c)), f,
                    )
                run += A.degrees[p]
            sgn = f.coerce(-1 if run % 2 else 1)
            for q, c in left_module.d(ml).items():
                _add_if(
                    out, src, (n, mr, mono, q),
                    f.mul(sign_n, f.mul(sgn, c)), f,
                )
            if n == 0:
                continue
            # d_0: right action on M_r
            for q, c in right_module.act_right(mr, mono[0]).items():
                _add_if(out, src, (n - 1, q, mono[1:], ml), c, f)
            for r in range(1, n):
                sgn = f.coerce(-1 if r % 2 else 1)
                for q, c in A.product(mono[r - 1], mono[r]).items():
                    if q == A.unit:
                        continue
                    t = mono[: r - 1] + (q,) + mono[r + 1 :]
                    _add_if(out, src, (n - 1, mr, t, ml), f.mul(sgn, c), f)
            # d_n: left action on M_l
            sgn = f.coerce(-1 if n % 2 else 1)
            for q, c in left_module.act_left(mono[-1], ml).items():
                _add_if(
                    out, src, (n - 1, mr, mono[:-1], q), f.mul(sgn, c), f
                )
    return out.freeze(window=(lo - 1, POS_INF), support=(NEG_INF, 0))


def enveloping_modules(A):
    """(A as right A⊗A^op-module, A⊗A^op, A as left A⊗A^op-module)."""
    f = A.coefficients.field
    E = dga.tensor_algebra(A, dga.opposite(A), name=f"{A.name}^e")
    dimB = A.dim
    pos = lambda i, j: i * dimB + j
    # left action: (a ⊗ b^op) · m = (-1)^{|b||m|} a m b
    left = {}
    right = {}
    for i in range(A.dim):
        for j in range(A.dim):
            e = pos(i, j)
            for m in range(A.dim):
                sgn = f.coerce(-1 if (A.degrees[j] * A.degrees[m]) % 2 else 1)
                outv = {}
                for t, c in A.product(m, j).items():
                    for s, cc in A.product(i, t).items():
                        dga._acc(outv, s, f.mul(f.mul(c, cc), sgn), f)
                if outv:
                    left[(e, m)] = outv
                # right action: m · (a ⊗ b^op) = (-1)^{|b||m| + |a||b|} b m a
                # (the unique sign making the right-module axiom hold)
                sgn2 = f.coerce(
                    -1
                    if (A.degrees[j] * (A.degrees[m] + A.degrees[i])) % 2
                    else 1
                )
                outv2 = {}
                for t, c in A.product(m, i).items():
                    for s, cc in A.product(j, t).items():
                        dga._acc(outv2, s, f.mul(f.mul(c, cc), sgn2), f)
                if outv2:
                    right[(m, e)] = outv2
    basis = list(zip(A.labels, A.degrees, A.weights))
    mod_r = dga.DGModule(
        f"{A.name} (right over envelope)", E, basis, left={}, right=right,
        symmetric=False, diff={i: dict(v) for i, v in A.diff.items()},
        pointed_element=A.unit, audit=False,
    )
    mod_l = dga.DGModule(
        f"{A.name} (left over envelope)", E, basis, left=left,
        symmetric=False, diff={i: dict(v) for i, v in A.diff.items()},
        pointed_element=A.unit, audit=False,
    )
    _audit_one_sided(mod_r, side="right")
    _audit_one_sided(mod_l, side="left")
    return mod_r, E, mod_l


def _audit_one_sided(module, side):
    A = module.algebra
    f = module.coefficients.field
    for m in range(module.dim):
        act = (
            module.act_left(A.unit, m)
            if side == "left"
            else module.act_right(m, A.unit)
        )
        if act != {m: f.one}:
            raise ValueError(f"{module.name}: unit axiom fails")
    for a in range(A.dim):
        for b in range(A.dim):
            for m in range(module.dim):
                if side == "left":
                    lhs = {}
                    for k, c in A.product(a, b).items():
                        for t, e in module.act_left(k, m).items():
                            dga._acc(lhs, t, f.mul(c, e), f)
                    rhs = {}
                    for t, c in module.act_left(b, m).items():
                        for s, e in module.act_left(a, t).items():
                            dga._acc(rhs, s, f.mul(c, e), f)
                else:
                    lhs = {}
                    for k, c in A.product(a, b).items():
                        for t, e in module.act_right(m, k).items():
                            dga._acc(lhs, t, f.mul(c, e), f)
                    rhs = {}
                    for t, c in module.act_right(m, a).items():
                        for s, e in module.act_right(t, b).items():
                            dga._acc(rhs, s, f.mul(c, e), f)
                if lhs != rhs:
                    raise ValueError(f"{module.name}: {side} axiom fails")


def hh_via_enveloping(A, window=(-6, 0)):
    """A ⊗^L_{A⊗A^op} A computed as the two-sided Bar complex."""
    mod_r, E, mod_l = enveloping_modules(A)
    return two_sided_bar(mod_r, E, mod_l, window)


def iterated_bar(A, i, window=(-6, 0), weights=None):
    """Bar^{(i)}(A) = CH over the i-sphere with trivial coefficients."""
    from . import simp

    if A.augmentation is None:
        raise ValueError("iterated Bar needs an augmented algebra")
    if i == 0:
        ch = ChainComplex(A.coefficients)
        for p in range(A.dim):
            ch.add_element(A.labels[p], A.degrees[p], A.weights[p])
        for p in range(A.dim):
            for q, c in A.d(p).items():
                ch.set_differential_entry(A.labels[p], A.labels[q], c)
        return ch.freeze(support=(NEG_INF, 0))
    k_mod = dga.augmentation_module(A)
    Y = simp.sphere_small(i, _sphere_level(A, i, window, weights))
    hc = hochschild_chain_with_coeff(Y, A, k_mod, window, weights)
    return hc.complex


def _sphere_level(A, i, window, weights):
    if weights is not None and A.weight_graded:
        return min(max(0, 1 - window[0]), i * (max(weights) if weights else 0))
    return max(0, 1 - window[0])


# -- HKR predictions ---------------------------------------------------------


def free_graded_commutative_dims(generators, window, max_weight):
    """Dimension table of the free graded-commutative algebra on
    (degree, weight) generators: polynomial on even, exterior on odd."""
    lo = window[0]
    table = {(0, 0): 1}
    for (d, w) in generators:
        if d > 0:
            raise ValueError("generators must sit in non-positive degrees")
        series = [(0, 0, 1)]
        if d % 2:  # exterior
            series.append((d, w, 1))
        else:
            if d == 0 and w == 0:
                raise ValueError("even (0,0)-generator gives infinite dims")
            k = 1
            while True:
                if d < 0 and k * d < lo:
                    break
                if w > 0 and max_weight is not None and k * w > max_weight:
                    break
                if d == 0 and (w == 0 or max_weight is None):
                    raise ValueError("unbounded generator expansion")
                series.append((k * d, k * w, 1))
                k += 1
        new = {}
        for (deg, wt), m in table.items():
            for (dd, dw, c) in series:
                nd, nw = deg + dd, wt + dw
                if nd < lo:
                    continue
                if max_weight is not None and nw > max_weight:
                    continue
                new[(nd, nw)] = new.get((nd, nw), 0) + m * c
        table = new
    return {k: v for k, v in table.items() if v}


ALGEBRA_GENERATORS = {
    # descriptor -> list of (degree, weight) free generators
    "polynomial": [(0, 1)],
}


def hkr_prediction(algebra_descriptor, space_descriptor, window, weights):
    """Expected Betti table per (degree, weight) from the closed forms:
    for a d-sphere a shifted Kähler generator of degree |x| - d per
    generator x; for a genus-g surface one of degree |x| - 2 and 2g of
    degree |x| - 1."""
    gens = _descriptor_generators(algebra_descriptor)
    kind, param = space_descriptor
    out_gens = list(gens)
    for (d, w) in gens:
        if kind == "sphere":
            out_gens.append((d - param, w))
        elif kind == "surface":
            out_gens.append((d - 2, w))
            out_gens += [(d - 1, w)] * (2 * param)
        else:
            raise ValueError(space_descriptor)
    max_w = max(weights) if weights is not None else None
    table = free_graded_commutative_dims(out_gens, window, max_w)
    if weights is not None:
        table = {k: v for k, v in table.items() if k[1] in set(weights)}
    return {k: v for k, v in sorted(table.items())}


def _descriptor_generators(descriptor):
    if isinstance(descriptor, str):
        if descriptor in ALGEBRA_GENERATORS:
            return ALGEBRA_GENERATORS[descriptor]
        raise ValueError(f"not in the smooth/free catalogue: {descriptor}")
    if isinstance(descriptor, dict) and "free_generators" in descriptor:
        return [tuple(g) for g in descriptor["free_generators"]]
    if isinstance(descriptor, dga.DGAlgebra):
        name = descriptor.name
        if name.startswith("exterior"):
            return [(descriptor.degrees[1], descriptor.weights[1])]
        if name == "k[x]":
            return [(0, 1)]
        raise ValueError(f"not in the smooth/free catalogue: {name}")
    raise ValueError(descriptor)
