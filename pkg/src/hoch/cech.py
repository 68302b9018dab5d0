"""Prefactorization algebras on finite intersection-closed covers and
their Čech complexes, in the tensor and coproduct (cosheaf) regimes.

Finite covers of connected 1-manifolds are never factorizing (no finite
family of arcs separates arbitrarily many points), so descent is only
tested where it provably holds at finite scale: the coproduct regime
(ordinary Čech descent for cosheaves) and the excision identity routed
through Bar complexes.  The tensor-regime machinery (axioms, Čech
assembly) is validated exhaustively on the 1-dimensional instances:
arcs on a circle carrying an algebra, and the stratified interval
carrying a bimodule pair.
"""

from fractions import Fraction
from itertools import product as iproduct

from . import dga, simp
from .homalg import (
    NEG_INF,
    POS_INF,
    ChainComplex,
    ChainMap,
    Coefficients,
    SimplicialChainComplex,
    total_complex,
)
from .hochschild import hh_via_enveloping, hochschild_chain, two_sided_bar


class CoverError(ValueError):
    pass


# -- open posets -------------------------------------------------------------


class OpenPoset:
    """Finite intersection-closed collection of opens.

    opens: list of ids; inter[(i, j)]: id or None (empty); the partial
    order and disjointness derive from the intersection table.
    """

    def __init__(self, ambient, opens, inter, union_id=None):
        self.ambient = ambient
        self.opens = list(opens)
        self.inter = dict(inter)
        self.union_id = union_id
        for i in self.opens:
            self.inter[(i, i)] = i
        for (i, j), v in list(self.inter.items()):
            self.inter[(j, i)] = v
        for i in self.opens:
            for j in self.opens:
                if (i, j) not in self.inter:
                    raise CoverError(f"intersection table misses {(i, j)}")
                v = self.inter[(i, j)]
                if v is not None and v not in self.opens:
                    raise CoverError(f"poset not intersection-closed at {(i, j)}")

    def intersection(self, i, j):
        return self.inter[(i, j)]

    def family_intersection(self, ids):
        cur = ids[0]
        for nxt in ids[1:]:
            if cur is None:
                return None
            cur = self.inter[(cur, nxt)]
        return cur

    def disjoint(self, i, j):
        return i != j and self.inter[(i, j)] is None

    def leq(self, i, j):
        return self.inter[(i, j)] == i

    def disjoint_families(self, inside=None, max_size=None):
        """All nonempty pairwise-disjoint subsets (sorted tuples)."""
        pool = [
            u
            for u in self.opens
            if inside is None or self.leq(u, inside)
        ]
        out = []

        def rec(start, cur):
            if cur:
                out.append(tuple(cur))
            if max_size is not None and len(cur) >= max_size:
                return
            for k in range(start, len(pool)):
                u = pool[k]
                if all(self.disjoint(u, v) for v in cur):
                    cur.append(u)
                    rec(k + 1, cur)
                    cur.pop()

        rec(0, [])
        return out


def circle_arc_poset(arcs):
    """Intersection-closed poset of open arcs on the unit-length circle.

    arcs: list of (start, length) with rational entries, each length
    strictly less than 1/2 (so that intersections are single arcs).
    """
    arcs = [(Fraction(s) % 1, Fraction(l)) for (s, l) in arcs]
    for (_, l) in arcs:
        if not (0 < l < Fraction(1, 2)):
            raise CoverError("arcs must be shorter than a half-circle")
    named = {}

    def _name(a):
        return f"arc({a[0]},{a[1]})"

    work = list(arcs)
    for a in work:
        named[_name(a)] = a
    changed = True
    while changed:
        changed = False
        items = list(named.values())
        for a in items:
            for b in items:
                c = _arc_intersection(a, b)
                if c is not None and _name(c) not in named:
                    named[_name(c)] = c
                    changed = True
    ids = sorted(named)
    inter = {}
    for i in ids:
        for j in ids:
            c = _arc_intersection(named[i], named[j])
            inter[(i, j)] = _name(c) if c is not None else None
    poset = OpenPoset("circle", ids, inter)
    poset.arc_data = named
    return poset


def _arc_intersection(a, b):
    (s1, l1), (s2, l2) = a, b
    e1 = s1 + l1
    best = None
    for shift in (-1, 0, 1):
        lo = max(s1, s2 + shift)
        hi = min(e1, s2 + shift + l2)
        if hi > lo:
            if best is not None:
                raise CoverError("arcs intersect in two components")
            best = (lo % 1, hi - lo)
    return best


def interval_poset(opens):
    """Stratified-interval poset; opens are ('r', s) = [0, s),
    ('m', t, u) = (t, u) or ('l', t) = (t, 1], rational endpoints."""
    descs = {}
    for o in opens:
        descs[_iname(o)] = _inorm(o)
    changed = True
    while changed:
        changed = False
        items = list(descs.values())
        for a in items:
            for b in items:
                c = _interval_intersection(a, b)
                if c is not None and _iname(c) not in descs:
                    descs[_iname(c)] = c
                    changed = True
    ids = sorted(descs)
    inter = {}
    for i in ids:
        for j in ids:
            c = _interval_intersection(descs[i], descs[j])
            inter[(i, j)] = _iname(c) if c is not None else None
    poset = OpenPoset("interval", ids, inter)
    poset.interval_data = descs
    return poset


def _inorm(o):
    if o[0] == "r":
        return ("r", Fraction(o[1]))
    if o[0] == "l":
        return ("l", Fraction(o[1]))
    return ("m", Fraction(o[1]), Fraction(o[2]))


def _iname(o):
    if o[0] == "r":
        return f"[0,{o[1]})"
    if o[0] == "l":
        return f"({o[1]},1]"
    return f"({o[1]},{o[2]})"


def _interval_span(o):
    if o[0] == "r":
        return (Fraction(0), o[1], True, False)
    if o[0] == "l":
        return (o[1], Fraction(1), False, True)
    return (o[1], o[2], False, False)


def _interval_intersection(a, b):
    lo1, hi1, c01, c11 = _interval_span(a)
    lo2, hi2, c02, c12 = _interval_span(b)
    lo, hi = max(lo1, lo2), min(hi1, hi2)
    closed0 = c01 and c02 and lo == 0
    closed1 = c11 and c12 and hi == 1
    if hi < lo or (hi == lo and not (closed0 or closed1)):
        return None
    if closed0:
        return ("r", hi)
    if closed1:
        return ("l", lo)
    if hi <= lo:
        return None
    return ("m", lo, hi)


def abstract_poset(opens, inter):
    return OpenPoset("abstract", opens, inter)


# -- prefactorization data ----------------------------------------------------


class PrefactorizationData:
    """Values and structure maps of a prefactorization algebra on a poset.

    tensor mode: rho_raw(family_ids, factor_labels, target) gives the
    image chain {label: coeff} of a pure tensor of basis labels, for a
    pairwise-disjoint family in any order; pointed[target] is the image
    of 1 under the empty-family map k -> F(target).

    coproduct mode: structure maps are determined by the precosheaf
    extension maps ext(U, V, label) (Lemma: cosheaves are exactly the
    coproduct-regime prefactorization algebras).
    """

    def __init__(self, name, poset, values, mode, rho_raw=None, pointed=None,
                 ext=None):
        self.name = name
        self.poset = poset
        self.values = values
        self.mode = mode
        self.rho_raw = rho_raw
        self.pointed = pointed or {}
        self.ext = ext
        if mode not in ("tensor", "coproduct"):
            raise ValueError(mode)
        if mode == "tensor" and rho_raw is None:
            raise ValueError("tensor mode needs structure maps")
        if mode == "coproduct" and ext is None:
            raise ValueError("coproduct mode needs precosheaf maps")
        some = next(iter(values.values()))
        self.coefficients = some.coefficients

    def value(self, u):
        return self.values[u]

    def rho(self, family, factors, target):
        """Structure map on a pure tensor, any family order (tensor mode)."""
        if len(family) == 0:
            return dict(self.pointed[target])
        return self.rho_raw(family, factors, target)


def validate_prefactorization(F, max_family=3, max_inner=2):
    """Exhaustive audit: symmetry, identity on U ⊆ U, and the
    associativity square over all admissible nestings; (ok, witness)."""
    poset = F.poset
    f = F.coefficients.field
    if F.mode == "coproduct":
        return _validate_precosheaf(F)
    # identity: rho_{U,U} = id
    for u in poset.opens:
        for lab in _labels(F.value(u)):
            got = F.rho((u,), (lab,), u)
            if got != {lab: f.one}:
                return False, ("identity", u, lab)
    # symmetry under permutations with Koszul signs
    for w in poset.opens:
        for family in poset.disjoint_families(inside=w, max_size=max_family):
            if len(family) < 2:
                continue
            perms = _permutations(len(family))
            for factors in _factor_tuples(F, family):
                base = F.rho(family, factors, w)
                degs = [
                    _label_degree(F.value(u), lab)
                    for u, lab in zip(family, factors)
                ]
                for perm in perms:
                    pf = tuple(family[i] for i in perm)
                    pl = tuple(factors[i] for i in perm)
                    sign = _perm_koszul(perm, degs)
                    got = F.rho(pf, pl, w)
                    want = {
                        k: f.mul(f.coerce(sign), c) for k, c in base.items()
                    }
                    if got != want:
                        return False, ("symmetry", w, family, perm)
    # associativity square (nested families), inner families possibly empty
    for w in poset.opens:
        for mids in poset.disjoint_families(inside=w, max_size=max_family):
            inner_choices = []
            for v in mids:
                fams = [()] + poset.disjoint_families(
                    inside=v, max_size=max_inner
                )
                inner_choices.append(fams)
            for inners in iproduct(*inner_choices):
                flat = tuple(u for fam in inners for u in fam)
                if not _pairwise_disjoint(poset, flat):
                    continue
                for factors in _factor_tuples(F, flat):
                    direct = F.rho(flat, factors, w)
                    # composite: first into the mids, then into w
                    pos = 0
                    mid_values = []
                    ok = True
                    for v, fam in zip(mids, inners):
                        part = factors[pos : pos + len(fam)]
                        pos += len(fam)
                        mid_values.append(F.rho(fam, part, v))
                    composite = {}
                    for combo in _expand(mid_values):
                        coeff, labs = combo
                        for k, c in F.rho(mids, labs, w).items():
                            dga._acc(composite, k, f.mul(coeff, c), f)
                    if direct != composite:
                        return False, ("associativity", w, mids, inners)
    return True, None


def _validate_precosheaf(F):
    poset = F.poset
    f = F.coefficients.field
    for u in poset.opens:
        for lab in _labels(F.value(u)):
            if F.ext(u, u, lab) != {lab: f.one}:
                return False, ("identity", u, lab)
    for u in poset.opens:
        for v in poset.opens:
            if not (poset.leq(u, v) and u != v):
                continue
            for w in poset.opens:
                if not (poset.leq(v, w) and v != w):
                    continue
                for lab in _labels(F.value(u)):
                    once = {}
                    for k, c in F.ext(u, v, lab).items():
                        for k2, c2 in F.ext(v, w, k).items():
                            dga._acc(once, k2, f.mul(c, c2), f)
                    if once != F.ext(u, w, lab):
                        return False, ("functoriality", u, v, w, lab)
    return True, None


def _labels(complex_):
    return [lab for block in complex_.blocks.values() for lab in block]


def _label_degree(complex_, lab):
    return complex_.index[lab][0]


def _permutations(n):
    from itertools import permutations

    return list(permutations(range(n)))


def _perm_koszul(perm, degs):
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j] and degs[perm[i]] % 2 and degs[perm[j]] % 2:
                sign = -sign
    return sign


def _factor_tuples(F, family):
    pools = [_labels(F.value(u)) for u in family]
    return iproduct(*pools) if family else [()]


def _pairwise_disjoint(poset, ids):
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            if not poset.disjoint(ids[i], ids[j]):
                return False
    return True


def _expand(value_dicts):
    """Pure-tensor expansion of a list of chains: (coeff, labels)."""
    prods = [((), 1)]
    for vd in value_dicts:
        new = []
        for labs, c in prods:
            for k, v in vd.items():
                new.append((labs + (k,), v if c == 1 else c * v))
        prods = new
    return [(c, labs) for labs, c in prods]


# -- builders -----------------------------------------------------------------


def _complex_of_algebra(A):
    c = ChainComplex(A.coefficients)
    for p in range(A.dim):
        c.add_element(A.labels[p], A.degrees[p], A.weights[p])
    for p in range(A.dim):
        for q, v in A.d(p).items():
            c.set_differential_entry(A.labels[p], A.labels[q], v)
    return c.freeze(support=(NEG_INF, 0))


def _complex_of_module(M):
    c = ChainComplex(M.coefficients)
    for p in range(M.dim):
        c.add_element(M.labels[p], M.degrees[p], M.weights[p])
    for p in range(M.dim):
        for q, v in M.d(p).items():
            c.set_differential_entry(M.labels[p], M.labels[q], v)
    return c.freeze(support=(NEG_INF, 0))


def trivial_prefactorization(poset, coefficients=None):
    """U ↦ k with multiplication as structure maps (tensor mode)."""
    coefficients = coefficients or Coefficients()
    f = coefficients.field
    values = {}
    for u in poset.opens:
        c = ChainComplex(coefficients)
        c.add_element("1", 0, 0)
        values[u] = c.freeze(support=(0, 0))

    def rho_raw(family, factors, target):
        return {"1": f.one}

    pointed = {u: {"1": f.one} for u in poset.opens}
    return PrefactorizationData(
        "trivial", poset, values, "tensor", rho_raw, pointed
    )


def constant_precosheaf(poset, coefficients=None):
    """U ↦ k with identity extension maps (coproduct/cosheaf mode)."""
    coefficients = coefficients or Coefficients()
    f = coefficients.field
    values = {}
    for u in poset.opens:
        c = ChainComplex(coefficients)
        c.add_element("1", 0, 0)
        values[u] = c.freeze(support=(0, 0))

    def ext(u, v, lab):
        return {"1": f.one}

    return PrefactorizationData(
        "constant-Q", poset, values, "coproduct", ext=ext
    )


def circle_arc_algebra(A, poset, orientation=1):
    """Arcs carry A; disjoint arcs multiply in the cyclic order induced
    by the chosen orientation (increasing start angle inside the target
    for orientation +1, decreasing for -1)."""
    if poset.ambient != "circle":
        raise CoverError("circle_arc_algebra needs a circle-arc poset")
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    f = A.coefficients.field
    values = {u: _complex_of_algebra(A) for u in poset.opens}
    arc = poset.arc_data

    def rho_raw(family, factors, target):
        # positions measured from the start of the target arc
        t0 = arc[target][0]
        keyed = []
        for u, lab in zip(family, factors):
            rel = (arc[u][0] - t0) % 1
            keyed.append((rel, u, lab))
        order = sorted(
            range(len(keyed)),
            key=lambda i: keyed[i][0],
            reverse=(orientation == -1),
        )
        degs = [A.degrees[A.position[lab]] for (_, _, lab) in keyed]
        sign = _perm_koszul(tuple(order), degs)
        out = {A.labels[A.unit]: f.coerce(sign)}
        for i in order:
            lab = keyed[i][2]
            new = {}
            for cur, c in out.items():
                for k, v in A.product(A.position[cur], A.position[lab]).items():
                    dga._acc(new, A.labels[k], f.mul(c, v), f)
            out = new
        return out

    pointed = {u: {A.labels[A.unit]: f.one} for u in poset.opens}
    return PrefactorizationData(
        f"arcs({A.name})", poset, values, "tensor", rho_raw, pointed
    )


def interval_stratified(Mr, A, Ml, poset):
    """The stratified-interval data: [0,s) ↦ M^r, (t,1] ↦ M^ℓ, else A;
    structure maps multiply in position order through the module actions;
    the empty family hits the distinguished elements."""
    if poset.ambient != "interval":
        raise CoverError("interval_stratified needs an interval poset")
    if Mr.pointed_element is None or Ml.pointed_element is None:
        raise ValueError("modules must be pointed")
    f = A.coefficients.field
    data = poset.interval_data
    values = {}
    for u in poset.opens:
        kind = data[u][0]
        if kind == "r":
            values[u] = _complex_of_module(Mr)
        elif kind == "l":
            values[u] = _complex_of_module(Ml)
        else:
            values[u] = _complex_of_algebra(A)

    def _pos(u):
        return _interval_span(data[u])[0]

    def rho_raw(family, factors, target):
        kinds = [data[u][0] for u in family]
        keyed = sorted(
            range(len(family)), key=lambda i: _pos(family[i])
        )
        def deg_of(i):
            kind = kinds[i]
            if kind == "r":
                return Mr.degrees[Mr.labels.index(factors[i])]
            if kind == "l":
                return Ml.degrees[Ml.labels.index(factors[i])]
            return A.degrees[A.position[factors[i]]]
        sign = _perm_koszul(tuple(keyed), [deg_of(i) for i in keyed])
        tkind = data[target][0]
        # fold in position order
        if tkind == "m":
            out = {A.labels[A.unit]: f.coerce(sign)}
            for i in keyed:
                out = _fold_algebra(A, out, factors[i], f)
            return out
        if tkind == "r":
            if kinds and kinds[keyed[0]] == "r":
                cur = {Mr.labels[Mr.labels.index(factors[keyed[0]])]: f.coerce(sign)}
                rest = keyed[1:]
            else:
                cur = {
                    Mr.labels[Mr.pointed_element]: f.coerce(sign)
                }
                rest = keyed
            for i in rest:
                new = {}
                for curlab, c in cur.items():
                    mpos = Mr.labels.index(curlab)
                    apos = A.position[factors[i]]
                    for k, v in Mr.act_right(mpos, apos).items():
                        dga._acc(new, Mr.labels[k], f.mul(c, v), f)
                cur = new
            return cur
        # target contains 1: fold from the right
        if kinds and kinds[keyed[-1]] == "l":
            cur = {Ml.labels[Ml.labels.index(factors[keyed[-1]])]: f.coerce(sign)}
            rest = keyed[:-1]
        else:
            cur = {Ml.labels[Ml.pointed_element]: f.coerce(sign)}
            rest = keyed
        for i in reversed(rest):
            new = {}
            for curlab, c in cur.items():
                mpos = Ml.labels.index(curlab)
                apos = A.position[factors[i]]
                for k, v in Ml.act_left(apos, mpos).items():
                    dga._acc(new, Ml.labels[k], f.mul(c, v), f)
            cur = new
        return cur

    pointed = {}
    for u in poset.opens:
        kind = data[u][0]
        if kind == "r":
            pointed[u] = {Mr.labels[Mr.pointed_element]: f.one}
        elif kind == "l":
            pointed[u] = {Ml.labels[Ml.pointed_element]: f.one}
        else:
            pointed[u] = {A.labels[A.unit]: f.one}
    F = PrefactorizationData(
        "stratified-interval", poset, values, "tensor", rho_raw, pointed
    )
    F.modules = (Mr, A, Ml)
    return F


def _fold_algebra(A, out, lab, f):
    new = {}
    for cur, c in out.items():
        for k, v in A.product(A.position[cur], A.position[lab]).items():
            dga._acc(new, A.labels[k], f.mul(c, v), f)
    return new


def interval_global_sections(F, window=(-6, 0)):
    """F([0,1]) for the stratified interval: M^r ⊗^L_A M^ℓ via Bar."""
    Mr, A, Ml = F.modules
    return two_sided_bar(Mr, A, Ml, window)


# -- Čech complexes -----------------------------------------------------------


class CechComplex:
    def __init__(self, cover, total, truncation, augmentation=None):
        self.cover = cover
        self.total = total
        self.simplicial_truncation = truncation
        self.augmentation = augmentation

    def homology_dims(self, window, weights=None, threads=1):
        return self.total.homology_dims(window, weights, threads)

    def betti(self, window, weights=None, threads=1):
        return self.total.betti(window, weights, threads)


def cech_complex(F, cover, truncation=2, max_family=3):
    """Čech complex over PU^{i+1} tuples (adjacent-distinct, i.e. the
    normalized total complex), faces discard one collection."""
    poset = F.poset
    for u in cover:
        for v in cover:
            w = poset.intersection(u, v)
            if w is not None and w not in cover:
                raise CoverError("sub-cover is not intersection-closed")
    PU = sorted(
        set(
            fam
            for fam in poset.disjoint_families(max_size=max_family)
            if all(u in cover for u in fam)
        )
    )
    coeff = F.coefficients
    f = coeff.field
    levels = []
    level_basis = []
    for i in range(truncation + 1):
        tuples = _adjacent_distinct(PU, i + 1)
        c = ChainComplex(coeff)
        basis = []
        for alpha in tuples:
            for lab in _family_tensor_basis(F, alpha):
                basis.append((alpha, lab))
        for (alpha, lab) in basis:
            deg, wt = _family_label_degree(F, alpha, lab)
            c.add_element((alpha, lab), deg, wt)
        for (alpha, lab) in basis:
            for tgt, v in _family_internal_diff(F, alpha, lab).items():
                c.set_differential_entry((alpha, lab), (alpha, tgt), v)
        levels.append(c.freeze(support=(NEG_INF, POS_INF)))
        level_basis.append(basis)
    faces = {}
    for i in range(1, truncation + 1):
        src, tgt = levels[i], levels[i - 1]
        for s in range(i + 1):
            fmap = ChainMap(src, tgt)
            for (alpha, lab) in level_basis[i]:
                beta = alpha[:s] + alpha[s + 1 :]
                if any(beta[j] == beta[j + 1] for j in range(len(beta) - 1)):
                    continue  # degenerate target is zero in the quotient
                for tlab, v in _face_image(F, alpha, lab, s).items():
                    fmap.set_entry((alpha, lab), (beta, tlab), v)
            faces[(i, s)] = fmap
    scc = SimplicialChainComplex(levels, faces, {}, exhausted=False)
    tot = total_complex(scc, normalized=False)
    augmentation = None
    if F.poset.union_id is not None and F.poset.union_id in F.values:
        augmentation = _augmentation_map(F, levels[0], level_basis[0])
    return CechComplex(tuple(cover), tot, truncation, augmentation)


def _adjacent_distinct(PU, length):
    out = []

    def rec(cur):
        if len(cur) == length:
            out.append(tuple(cur))
            return
        for fam in PU:
            if cur and cur[-1] == fam:
                continue
            cur.append(fam)
            rec(cur)
            cur.pop()

    rec([])
    return out


def _combos(F, alpha):
    """Tuples (U_0..U_i) ∈ Πα_j with nonempty intersection, sorted."""
    out = []
    for combo in iproduct(*alpha):
        inter = F.poset.family_intersection(list(combo))
        if inter is not None:
            out.append((combo, inter))
    return out


def _family_tensor_basis(F, alpha):
    combos = _combos(F, alpha)
    if F.mode == "coproduct":
        out = []
        for combo, inter in combos:
            for lab in _labels(F.value(inter)):
                out.append(("sum", combo, lab))
        return out
    pools = []
    for combo, inter in combos:
        pools.append([(combo, lab) for lab in _labels(F.value(inter))])
    return [("tens",) + tuple(t) for t in iproduct(*pools)]


def _family_label_degree(F, alpha, lab):
    if lab[0] == "sum":
        _, combo, l = lab
        inter = F.poset.family_intersection(list(combo))
        d, w, _ = F.value(inter).index[l]
        return d, w
    deg = 0
    wt = 0
    for combo, l in lab[1:]:
        inter = F.poset.family_intersection(list(combo))
        d, w, _ = F.value(inter).index[l]
        deg += d
        wt += w
    return deg, wt


def _family_internal_diff(F, alpha, lab):
    f = F.coefficients.field
    out = {}
    if lab[0] == "sum":
        _, combo, l = lab
        inter = F.poset.family_intersection(list(combo))
        for tgt, v in F.value(inter).d_apply({l: f.one}).items():
            out[("sum", combo, tgt)] = v
        return out
    parts = lab[1:]
    run = 0
    for idx, (combo, l) in enumerate(parts):
        inter = F.poset.family_intersection(list(combo))
        cx = F.value(inter)
        d_img = cx.d_apply({l: f.one})
        if d_img:
            sign = f.coerce(-1 if run % 2 else 1)
            for tgt, v in d_img.items():
                new = list(parts)
                new[idx] = (combo, tgt)
                dga._acc(out, ("tens",) + tuple(new), f.mul(sign, v), f)
        run += cx.index[l][0]
    return out


def _face_image(F, alpha, lab, s):
    """∂_s on a basis vector of F(alpha): discard collection s, regroup,
    apply structure maps per target combo."""
    f = F.coefficients.field
    poset = F.poset
    beta = alpha[:s] + alpha[s + 1 :]
    if F.mode == "coproduct":
        _, combo, l = lab
        tcombo = combo[:s] + combo[s + 1 :]
        src_open = poset.family_intersection(list(combo))
        tgt_open = poset.family_intersection(list(tcombo))
        out = {}
        for k, v in F.ext(src_open, tgt_open, l).items():
            out[("sum", tcombo, k)] = v
        return out
    parts = list(lab[1:])
    groups = {}
    for idx, (combo, l) in enumerate(parts):
        tcombo = combo[:s] + combo[s + 1 :]
        groups.setdefault(tcombo, []).append((idx, combo, l))
    # target combos not hit by any source factor receive the pointed element
    for combo, _inter in _combos(F, beta):
        groups.setdefault(combo, [])
    # Koszul sign: regroup the tensor factors by target combo
    degs = []
    keys = []
    target_sorted = sorted(groups)
    rankof = {c: r for r, c in enumerate(target_sorted)}
    for idx, (combo, l) in enumerate(parts):
        tcombo = combo[:s] + combo[s + 1 :]
        inter = poset.family_intersection(list(combo))
        degs.append(F.value(inter).index[l][0])
        keys.append((rankof[tcombo], idx))
    sign = 1
    for i in range(len(keys)):
        for j in range(i + 1, len(keys)):
            if keys[j] < keys[i] and degs[i] % 2 and degs[j] % 2:
                sign = -sign
    results = [(f.coerce(sign), {})]
    for tcombo in target_sorted:
        members = groups[tcombo]
        tgt_open = poset.family_intersection(list(tcombo))
        family = []
        factors = []
        for (_idx, combo, l) in members:
            src_open = poset.family_intersection(list(combo))
            family.append(src_open)
            factors.append(l)
        image = F.rho(tuple(family), tuple(factors), tgt_open)
        new = []
        for coeff, assign in results:
            for k, v in image.items():
                a2 = dict(assign)
                a2[tcombo] = k
                new.append((f.mul(coeff, v), a2))
        results = new
    out = {}
    for coeff, assign in results:
        if f.is_zero(coeff):
            continue
        new_parts = []
        for combo, inter in _combos(F, beta):
            new_parts.append((combo, assign[combo]))
        key = ("tens",) + tuple(new_parts)
        dga._acc(out, key, coeff, f)
    return out


def _augmentation_map(F, level0, basis0):
    f = F.coefficients.field
    target = F.values[F.poset.union_id]
    amap = ChainMap(level0, target)
    for (alpha, lab) in basis0:
        if F.mode == "coproduct":
            _, combo, l = lab
            src = F.poset.family_intersection(list(combo))
            for k, v in F.ext(src, F.poset.union_id, l).items():
                amap.set_entry((alpha, lab), k, v)
        else:
            parts = lab[1:]
            family = []
            factors = []
            for combo, l in parts:
                family.append(F.poset.family_intersection(list(combo)))
                factors.append(l)
            for k, v in F.rho(tuple(family), tuple(factors),
                              F.poset.union_id).items():
                amap.set_entry((alpha, lab), k, v)
    return amap


# -- excision report -----------------------------------------------------------


def excision_report(A, window=(-5, 0)):
    """The computable shadow of excision over the circle: Betti of
    A ⊗^L_{A⊗A^op} A versus CH_{S^1}(A)."""
    env = hh_via_enveloping(A, window)
    lo = window[0]
    Y = simp.circle(max(0, 1 - lo) + 1)
    circ = hochschild_chain(Y, A, window)
    left = env.betti(window)
    right = circ.betti(window)
    return {
        "enveloping": left,
        "circle": right,
        "equal": left == right,
    }
