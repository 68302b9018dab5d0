"""Chain-level products: shuffle, cup, wedge; exactness of their axioms."""

import random

import pytest

from hoch import dga, simp
from hoch import hochschild as hh
from hoch import products as pr
from hoch.linalg import SubquotientSpace, kernel_basis


def add(field, a, b, sign=1):
    out = dict(a)
    for k, v in b.items():
        acc = field.add(out.get(k, field.zero), field.mul(field.coerce(sign), v))
        if field.is_zero(acc):
            out.pop(k, None)
        else:
            out[k] = acc
    return out


def chains_by_degree(C, min_deg=-2, max_level=2):
    degs = {}
    for lab in C.index:
        d, _w, _ = C.index[lab]
        if lab[0] <= max_level and d >= min_deg:
            degs.setdefault(d, []).append(lab)
    return degs


# -- shuffle ------------------------------------------------------------------


@pytest.fixture(scope="module", params=["exterior", "trunc3"])
def shuffle_setup(request, QQ):
    if request.param == "exterior":
        A = dga.exterior(QQ)
    else:
        A = dga.truncated_polynomial(QQ, 3)
    H = hh.hochschild_chain(simp.circle(9), A, window=(-8, 0))
    return A, H


def rand_chain(rng, field, degs):
    d = rng.choice(sorted(degs))
    labs = rng.sample(degs[d], min(2, len(degs[d])))
    return d, {lab: field.coerce(rng.choice([-2, -1, 1, 2])) for lab in labs}


def test_shuffle_battery(QQ, shuffle_setup):
    A, H = shuffle_setup
    f = QQ.field
    C = H.complex
    one = pr.unit_chain(H)
    degs = chains_by_degree(C)
    rng = random.Random(17)
    for _ in range(150):
        du, u = rand_chain(rng, f, degs)
        dv, v = rand_chain(rng, f, degs)
        assert pr.shuffle_product(H, one, u) == u
        assert pr.shuffle_product(H, u, one) == u
        uv = pr.shuffle_product(H, u, v)
        # Leibniz
        lhs = C.d_apply(uv)
        rhs = add(
            f,
            pr.shuffle_product(H, C.d_apply(u), v),
            pr.shuffle_product(H, u, C.d_apply(v)),
            sign=(-1) ** (du % 2),
        )
        assert lhs == rhs
        # graded commutativity
        vu = pr.shuffle_product(H, v, u)
        sgn = (-1) ** ((du * dv) % 2)
        assert uv == {k: f.mul(f.coerce(sgn), c) for k, c in vu.items()}
        # associativity
        dw, w = rand_chain(rng, f, degs)
        left = pr.shuffle_product(H, uv, w)
        right = pr.shuffle_product(H, u, pr.shuffle_product(H, v, w))
        assert left == right


def test_shuffle_on_sphere(QQ, exterior):
    H = hh.hochschild_chain(simp.sphere_small(2, 9), exterior, window=(-8, 0))
    f = QQ.field
    C = H.complex
    degs = chains_by_degree(C)
    rng = random.Random(23)
    for _ in range(40):
        du, u = rand_chain(rng, f, degs)
        dv, v = rand_chain(rng, f, degs)
        uv = pr.shuffle_product(H, u, v)
        vu = pr.shuffle_product(H, v, u)
        sgn = (-1) ** ((du * dv) % 2)
        assert uv == {k: f.mul(f.coerce(sgn), c) for k, c in vu.items()}
        lhs = C.d_apply(uv)
        rhs = add(
            f,
            pr.shuffle_product(H, C.d_apply(u), v),
            pr.shuffle_product(H, u, C.d_apply(v)),
            sign=(-1) ** (du % 2),
        )
        assert lhs == rhs


def test_shuffle_requires_commutative(QQ, trunc2):
    nc = dga.DGAlgebra(
        "nc", QQ,
        list(zip(trunc2.labels, trunc2.degrees, trunc2.weights)),
        trunc2.mult, unit=0, commutative=False,
        augmentation=dict(trunc2.augmentation), weight_graded=True,
    )
    H = hh.hochschild_chain(simp.circle(5), nc, window=(-3, 0))
    with pytest.raises(ValueError):
        pr.shuffle_product(H, pr.unit_chain(H), pr.unit_chain(H))


# -- classical cochains and cup ------------------------------------------------


def basis_cochains(cc, max_arity):
    f = cc.A.coefficients.field
    out = []
    for n in range(max_arity + 1):
        for arg in cc.args[n]:
            for v in range(cc.A.dim):
                out.append({(n, arg, v): f.one})
    return out


def test_classical_cochain_complex(QQ, trunc2, exterior):
    for A, dims in ((trunc2, [2, 2, 2, 2, 2]), (exterior, None)):
        cc = pr.ClassicalCochains(A, 6)
        X = cc.as_complex()
        assert X.check_differential()[0], A.name
        if dims:
            assert [X.dim(d) for d in range(5)] == dims
            assert X.betti((0, 4)) == {0: 2, 1: 1, 2: 1, 3: 1, 4: 1}


def test_cup_unital_associative_exhaustive(QQ, trunc2, exterior):
    for A in (trunc2, exterior):
        cc = pr.ClassicalCochains(A, 7)
        f = QQ.field
        basis = basis_cochains(cc, 2)
        one = {(0, (), A.unit): f.one}
        cases = 0
        for a in basis:
            assert cc.cup(one, a) == a and cc.cup(a, one) == a
            for b in basis:
                for c in basis:
                    assert cc.cup(cc.cup(a, b), c) == cc.cup(a, cc.cup(b, c))
                    cases += 1
        assert cases >= 200


def test_cup_chain_map(QQ, trunc2, exterior):
    f = QQ.field
    rng = random.Random(5)
    for A in (trunc2, exterior):
        cc = pr.ClassicalCochains(A, 7)
        basis = basis_cochains(cc, 2)
        for _ in range(150):
            a = rng.choice(basis)
            b = rng.choice(basis)
            ((n1, arg1, v1),) = a.keys()
            deg_a = n1 + cc.internal_degree(n1, v1, arg1)
            lhs = cc.coboundary(cc.cup(a, b))
            rhs = add(
                f, cc.cup(cc.coboundary(a), b),
                cc.cup(a, cc.coboundary(b)), sign=(-1) ** (deg_a % 2),
            )
            assert lhs == rhs


def test_cup_hh0_is_center(QQ, trunc2):
    # HH^0 of a commutative algebra is the algebra; the induced product is
    # its multiplication
    f = QQ.field
    cc = pr.ClassicalCochains(trunc2, 4)
    for i in range(trunc2.dim):
        for j in range(trunc2.dim):
            a = {(0, (), i): f.one}
            b = {(0, (), j): f.one}
            prod = cc.cup(a, b)
            want = {
                (0, (), k): c for k, c in trunc2.product(i, j).items()
            }
            assert prod == want


def test_cup_commutative_in_homology_with_chain_witness(QQ, trunc3):
    f = QQ.field
    cc = pr.ClassicalCochains(trunc3, 6)
    X = cc.as_complex()

    def all_cocycles(deg):
        ker = kernel_basis(X.d_matrix(deg, 0))
        labels = X.blocks[(deg, 0)]
        return [{labels[i]: c for i, c in v.items()} for v in ker]

    witness = None
    checks = 0
    for p, q in ((1, 1), (1, 2), (2, 2)):
        fs, gs = all_cocycles(p), all_cocycles(q)
        sub = SubquotientSpace(
            X.d_matrix(p + q, 0), X.d_matrix(p + q - 1, 0), f
        )
        labs = X.blocks[(p + q, 0)]
        pos = {lab: i for i, lab in enumerate(labs)}
        for fc in fs:
            for gc in gs:
                fg = cc.cup(fc, gc)
                gf = cc.cup(gc, fc)
                sign = (-1) ** ((p * q) % 2)
                gf_s = {k: f.mul(f.coerce(sign), v) for k, v in gf.items()}
                if fg != gf_s and witness is None:
                    witness = (p, q, fc, gc)
                lv = {pos[k]: v for k, v in fg.items()}
                rv = {pos[k]: v for k, v in gf_s.items()}
                checks += 1
                assert sub.same_class(lv, rv)
    assert checks >= 20
    assert witness is not None, "expected a chain-level noncommuting pair"


# -- higher cochains and wedge --------------------------------------------------


@pytest.fixture(scope="module")
def wedge_setup(QQ, trunc2):
    N = 6
    m = dga.algebra_as_bimodule(trunc2)
    c1, c2 = simp.circle(N), simp.circle(N)
    W = simp.wedge(c1, c2)
    d1 = pr.CochainComplexData(c1, trunc2, m, window=(0, 3), top=N)
    d2 = pr.CochainComplexData(c2, trunc2, m, window=(0, 3), top=N)
    dw = pr.CochainComplexData(W, trunc2, m, window=(0, 3), top=N)
    return d1, d2, dw


def test_higher_cochain_d_squared(QQ, trunc2, exterior, wedge_setup):
    d1, d2, dw = wedge_setup
    assert d1.complex.check_differential()[0]
    assert dw.complex.check_differential()[0]
    mL = dga.algebra_as_bimodule(exterior)
    dL = pr.CochainComplexData(simp.circle(7), exterior, mL, window=(0, 3))
    assert dL.complex.check_differential()[0]


def test_wedge_identity_over_point(QQ, trunc2):
    N = 6
    f = QQ.field
    m = dga.algebra_as_bimodule(trunc2)
    Xp, Yc = simp.point(N), simp.circle(N)
    W = simp.wedge(Xp, Yc)
    dx = pr.CochainComplexData(Xp, trunc2, m, window=(0, 3), top=N)
    dy = pr.CochainComplexData(Yc, trunc2, m, window=(0, 3), top=N)
    dw = pr.CochainComplexData(W, trunc2, m, window=(0, 3), top=N)
    fid = {(0, (trunc2.unit,), trunc2.unit): f.one}
    for lab in list(dy.complex.index):
        g = {lab: f.one}
        got = pr.wedge_product(dx, dy, dw, fid, g)
        assert got == g  # wedge(point, circle) slots coincide with circle's


def test_wedge_chain_map(QQ, trunc2, wedge_setup):
    d1, d2, dw = wedge_setup
    f = QQ.field
    rng = random.Random(11)

    def rand_coch(data, maxlvl=2):
        degs = {}
        for lab in data.complex.index:
            if lab[0] <= maxlvl:
                d, _w, _ = data.complex.index[lab]
                degs.setdefault(d, []).append(lab)
        d = rng.choice(sorted(degs))
        labs = rng.sample(degs[d], min(2, len(degs[d])))
        return d, {l: f.coerce(rng.choice([-2, -1, 1, 2])) for l in labs}

    for _ in range(60):
        df_, fc = rand_coch(d1)
        _dg, gc = rand_coch(d2)
        lhs = dw.differential(pr.wedge_product(d1, d2, dw, fc, gc))
        rhs = add(
            f,
            pr.wedge_product(d1, d2, dw, d1.differential(fc), gc),
            pr.wedge_product(d1, d2, dw, fc, d2.differential(gc)),
            sign=(-1) ** (df_ % 2),
        )
        assert lhs == rhs


def test_wedge_homology_associativity(QQ, trunc2):
    """[μ(μ(f,g),h)] = [μ(f,μ(g,h))] on (S¹∨S¹)∨S¹ vs S¹∨(S¹∨S¹)."""
    N = 6
    f = QQ.field
    m = dga.algebra_as_bimodule(trunc2)
    c = simp.circle(N)
    CC = simp.wedge(c, c, name="cc")
    W3a = simp.wedge(CC, c)
    W3b = simp.wedge(c, CC)
    assert [W3a.card(n) for n in range(5)] == [W3b.card(n) for n in range(5)]
    d1 = pr.CochainComplexData(c, trunc2, m, window=(0, 3), top=5)
    dcc = pr.CochainComplexData(CC, trunc2, m, window=(0, 3), top=5)
    d3a = pr.CochainComplexData(W3a, trunc2, m, window=(0, 3), top=5)
    d3b = pr.CochainComplexData(W3b, trunc2, m, window=(0, 3), top=5)
    assert d3a.complex.check_differential()[0]

    def cocycles(data, deg, count):
        C = data.complex
        d_in = C.d_matrix(deg - 1, 0) if C.dim(deg - 1, 0) else None
        sub = SubquotientSpace(C.d_matrix(deg, 0), d_in, f)
        labels = C.blocks[(deg, 0)]
        return [
            {labels[i]: v for i, v in rep.items()} for rep in sub.reps[:count]
        ]

    compared = 0
    for dfq in (1, 2):
        for fch in cocycles(d1, dfq, 2):
            for gch in cocycles(d1, 1, 1):
                for hch in cocycles(d1, 1, 1):
                    left = pr.wedge_product(
                        dcc, d1, d3a,
                        pr.wedge_product(d1, d1, dcc, fch, gch), hch,
                    )
                    right = pr.wedge_product(
                        d1, dcc, d3b, fch,
                        pr.wedge_product(d1, d1, dcc, gch, hch),
                    )
                    deg = dfq + 2
                    C3 = d3a.complex
                    sub = SubquotientSpace(
                        C3.d_matrix(deg, 0), C3.d_matrix(deg - 1, 0), f
                    )
                    labels = C3.blocks[(deg, 0)]
                    pos = {lab: i for i, lab in enumerate(labels)}
                    lv = {pos[k]: v for k, v in left.items()}
                    rv = {pos[k]: v for k, v in right.items()}
                    assert sub.same_class(lv, rv)
                    compared += 1
    assert compared >= 2


def test_wedge_algebra_mismatch_rejected(QQ, trunc2, trunc3, wedge_setup):
    d1, d2, dw = wedge_setup
    f = QQ.field
    other = pr.CochainComplexData(
        simp.circle(6), trunc3, dga.algebra_as_bimodule(trunc3),
        window=(0, 2), top=6,
    )
    fid = {(0, (trunc2.unit,) * 0 + tuple([trunc2.unit]), trunc2.unit): f.one}
    some = {next(iter(d1.complex.index)): f.one}
    with pytest.raises(ValueError, match="share the algebra"):
        pr.wedge_product(other, d2, dw, some, some)
