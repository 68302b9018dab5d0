"""Batch front door: parse a JSON job spec, run, emit a report.

Exit codes: 0 pass, 1 fail, 2 usage/schema error, 3 infeasible.
Reports are deterministic for a fixed job spec apart from the timestamp
and wall-time fields.
"""

import argparse
import datetime
import json
import random
import sys
import time
from fractions import Fraction

from . import cech, dga, hochschild as hh, products, simp
from .dga import AlgebraClassError
from .homalg import Coefficients, WindowError
from .hochschild import EnumerationCapError, TruncationError


class SchemaError(ValueError):
    pass


class InfeasibleError(RuntimeError):
    pass


TASKS = (
    "homology",
    "hkr-check",
    "bar",
    "iterated-bar",
    "twisted-hh",
    "excision-check",
    "cech",
    "cup-table",
    "shuffle-check",
)

_TOP_FIELDS = {
    "schema",
    "task",
    "algebra",
    "space",
    "coefficients",
    "window",
    "weights",
    "module",
    "automorphism",
    "iterations",
    "cover",
    "output",
    "cap",
    "threads",
    "expect",
    "expect_per_degree",
    "trials",
    "seed",
}


def load_jobspec(obj):
    if not isinstance(obj, dict):
        raise SchemaError("job spec must be a JSON object")
    unknown = set(obj) - _TOP_FIELDS
    if unknown:
        raise SchemaError(f"unknown fields: {sorted(unknown)}")
    if obj.get("schema") != 1:
        raise SchemaError('job spec must declare "schema": 1')
    task = obj.get("task")
    if task not in TASKS:
        raise SchemaError(f"task must be one of {TASKS}")
    window = obj.get("window", [-6, 0])
    if (
        not isinstance(window, list)
        or len(window) != 2
        or not all(isinstance(x, int) for x in window)
        or window[0] > window[1]
    ):
        raise SchemaError("window must be [lo, hi] with lo <= hi")
    weights = obj.get("weights")
    if weights is not None:
        if not isinstance(weights, list) or not all(
            isinstance(w, int) and w >= 0 for w in weights
        ):
            raise SchemaError("weights must be a list of non-negative ints")
    cap = obj.get("cap", 20000)
    if not isinstance(cap, int) or cap <= 0:
        raise SchemaError("cap must be a positive int")
    out = dict(obj)
    out["window"] = tuple(window)
    out["weights"] = list(weights) if weights is not None else None
    out["cap"] = cap
    out.setdefault("output", "text")
    out.setdefault("threads", 1)
    if out["output"] not in ("text", "json"):
        raise SchemaError("output must be text or json")
    return out


def parse_coefficients(spec):
    return Coefficients.parse(spec.get("coefficients", "Q"))


def build_algebra(desc, coefficients, weights=None):
    if not isinstance(desc, dict) or "name" not in desc and "basis" not in desc:
        raise SchemaError("algebra descriptor needs a name or a presentation")
    if "basis" in desc:
        return _inline_algebra(desc, coefficients)
    name = desc["name"]
    if name == "exterior":
        return dga.exterior(coefficients, desc.get("degree", -1))
    if name == "truncated-polynomial":
        return dga.truncated_polynomial(
            coefficients, desc.get("truncation", 2), desc.get("degree", 0)
        )
    if name == "polynomial":
        max_w = desc.get("max_weight")
        if max_w is None:
            max_w = max(weights) if weights else 8
        return dga.polynomial(coefficients, max_w)
    raise SchemaError(f"unknown algebra {name!r}")


def _inline_algebra(desc, coefficients):
    f = coefficients.field
    basis = [
        (b["label"], int(b["degree"]), int(b.get("weight", 0)))
        for b in desc["basis"]
    ]
    pos = {b[0]: i for i, b in enumerate(basis)}

    def coeff(x):
        return f.coerce(Fraction(x))

    mult = {}
    for (a, b, out) in desc["mult"]:
        mult[(pos[a], pos[b])] = {pos[k]: coeff(v) for k, v in out.items()}
    diff = {}
    for (a, out) in desc.get("differential", []):
        diff[pos[a]] = {pos[k]: coeff(v) for k, v in out.items()}
    aug = None
    if "augmentation" in desc:
        aug = {pos[k]: coeff(v) for k, v in desc["augmentation"].items()}
    try:
        return dga.DGAlgebra(
            desc.get("label", "inline"),
            coefficients,
            basis,
            mult,
            unit=pos[desc["unit"]],
            diff=diff,
            commutative=desc.get("commutative", True),
            augmentation=aug,
            weight_graded=desc.get("weight_graded", False),
        )
    except (KeyError, AlgebraClassError, ValueError) as exc:
        raise SchemaError(f"bad algebra presentation: {exc}") from exc


def build_space(desc, level):
    name = desc.get("name")
    if name == "point":
        return simp.point(level)
    if name == "interval":
        return simp.interval(level)
    if name == "circle":
        return simp.circle(level)
    if name == "torus":
        return simp.torus(level)
    if name == "sphere-standard":
        return simp.sphere_standard(desc.get("d", 2), level)
    if name == "sphere-small":
        return simp.sphere_small(desc.get("d", 2), level)
    if name == "surface":
        return simp.surface(desc.get("g", 1), level)
    if name == "wedge-circles":
        c = simp.circle(level)
        return simp.wedge(c, c)
    raise SchemaError(f"unknown space {desc!r}")


def space_level_for(spec, A, space_desc):
    lo = spec["window"][0]
    level = space_desc.get("level")
    if level is not None:
        return level
    weights = spec["weights"]
    n_deg = max(0, 1 - lo) + 1
    if weights is not None and A.weight_graded:
        probe = build_space(space_desc, 0)
        if probe.hitcap_coeff is not None:
            return min(n_deg, probe.hitcap_coeff * (max(weights) if weights else 0))
    return n_deg


def _check_cap(complex_, cap):
    size = complex_.max_block_dim()
    if size > cap:
        raise InfeasibleError(
            f"largest (degree, weight) block has dimension {size} > cap {cap}"
        )
    return size


def _betti_entries(table, window):
    entries = []
    for (d, w), v in sorted(table.items()):
        entries.append({"degree": d, "weight": w, "dim": v})
    return entries


def run_job(spec):
    """Execute a parsed job spec; returns the report dict."""
    t0 = time.time()
    coefficients = parse_coefficients(spec)
    window = spec["window"]
    weights = spec["weights"]
    cap = spec["cap"]
    threads = spec["threads"]
    deltas = []
    betti_table = {}
    extra = {}
    task = spec["task"]

    if task in ("homology", "hkr-check", "shuffle-check"):
        A = build_algebra(spec["algebra"], coefficients, weights)
        space_desc = spec.get("space", {"name": "circle"})
        level = space_level_for(spec, A, space_desc)
        Y = build_space(space_desc, level)
    elif task == "bar":
        A = build_algebra(spec["algebra"], coefficients, weights)
    mono_cap = 50 * cap
    if task == "homology":
        module = None
        if spec.get("module") == "self":
            module = dga.algebra_as_bimodule(A)
            H = hh.hochschild_chain_with_coeff(
                Y, A, module, window, weights, monomial_cap=mono_cap
            )
        else:
            H = hh.hochschild_chain(
                Y, A, window, weights, monomial_cap=mono_cap
            )
        extra["max_block"] = _check_cap(H.complex, cap)
        betti_table = H.homology_dims(window, weights, threads)
    elif task == "hkr-check":
        H = hh.hochschild_chain(
            Y, A, window, weights, monomial_cap=mono_cap
        )
        extra["max_block"] = _check_cap(H.complex, cap)
        betti_table = H.homology_dims(window, weights, threads)
        pred = hh.hkr_prediction(
            _hkr_descriptor(spec["algebra"], A),
            _hkr_space(spec["space"]),
            window,
            weights,
        )
        deltas.append(_delta("hkr_prediction", pred, betti_table))
    elif task == "bar":
        module = dga.algebra_as_bimodule(A)
        H = hh.hochschild_chain_with_coeff(
            build_space({"name": "interval"}, space_level_for(
                spec, A, {"name": "interval"})),
            A, module, window, weights, monomial_cap=mono_cap,
        )
        extra["max_block"] = _check_cap(H.complex, cap)
        betti_table = H.homology_dims(window, weights, threads)
        acyclic = {}
        for p in range(A.dim):
            key = (A.degrees[p], A.weights[p])
            if weights is not None and A.weights[p] not in weights:
                continue
            if window[0] <= A.degrees[p] <= window[1]:
                acyclic[key] = acyclic.get(key, 0) + 1
        deltas.append(_delta("bar_acyclicity(dims of A)", acyclic, betti_table))
    elif task == "iterated-bar":
        A = build_algebra(spec["algebra"], coefficients, weights)
        i = spec.get("iterations", 1)
        C = hh.iterated_bar(A, i, window, weights)
        extra["max_block"] = _check_cap(C, cap)
        betti_table = C.homology_dims(window, weights, threads)
        if i == 1:
            k_mod = dga.augmentation_module(A)
            B = hh.two_sided_bar(k_mod, A, k_mod, window)
            deltas.append(
                _delta(
                    "two_sided_bar(k,A,k)",
                    B.homology_dims(window, weights, threads),
                    betti_table,
                )
            )
    elif task == "twisted-hh":
        A = build_algebra(spec["algebra"], coefficients, weights)
        scalar = Fraction(spec.get("automorphism", {}).get("x", -1))
        sigma = _scaling_automorphism(A, scalar)
        C = hh.twisted_hochschild(A, sigma, window)
        extra["max_block"] = _check_cap(C, cap)
        betti_table = C.homology_dims(window, None, threads)
        trunc = spec["algebra"].get("truncation", 2)
        oracle = hh.periodic_resolution_dims(trunc, scalar, window, coefficients)
        got = _per_degree(betti_table, window)
        deltas.append(_delta("periodic_resolution", oracle, got))
    elif task == "excision-check":
        A = build_algebra(spec["algebra"], coefficients, weights)
        report = cech.excision_report(A, window)
        betti_table = {(d, 0): v for d, v in report["enveloping"].items() if v}
        deltas.append(
            _delta("circle_vs_enveloping", report["circle"],
                   report["enveloping"])
        )
        extra["max_block"] = 0
    elif task == "cech":
        C, aug_ok = _run_cech(spec, coefficients)
        extra["max_block"] = _check_cap(C.total, cap)
        betti_table = C.homology_dims(window, None, threads)
        if spec.get("cover", {}).get("compare_cone_gluing"):
            cone_dims = _cone_gluing_dims(coefficients)
            deltas.append(
                _delta("cone_excision_gluing", cone_dims,
                       _per_degree(betti_table, window))
            )
    elif task == "cup-table":
        A = build_algebra(spec["algebra"], coefficients, weights)
        table, ok = _cup_table(A, spec)
        extra["cup_table"] = table
        extra["max_block"] = 0
        deltas.append({"name": "cup_chain_level_axioms", "delta": 0 if ok else 1})
    elif task == "shuffle-check":
        ok, checked = _shuffle_check(Y, A, spec)
        extra["max_block"] = 0
        extra["cases"] = checked
        deltas.append({"name": "shuffle_axioms", "delta": 0 if ok else 1})

    if "expect" in spec:
        want = {
            _parse_key(k): v for k, v in spec["expect"].items()
        }
        got = {k: v for k, v in betti_table.items()}
        deltas.append(_delta("expected_betti", want, got))
    if "expect_per_degree" in spec:
        want = {int(k): v for k, v in spec["expect_per_degree"].items()}
        got = _per_degree(betti_table, window)
        deltas.append(_delta("expected_betti_per_degree", want, got))

    verdict = "pass" if all(d["delta"] == 0 for d in deltas) else "fail"
    report = {
        "job": _echo(spec),
        "betti": _betti_entries(betti_table, window),
        "oracles": deltas,
        "max_block": extra.get("max_block", 0),
        "verdict": verdict,
        "wall_time_s": round(time.time() - t0, 3),
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    for k, v in extra.items():
        if k not in ("max_block",):
            report[k] = v
    return report


def _echo(spec):
    out = {k: v for k, v in spec.items() if v is not None}
    out["window"] = list(spec["window"])
    return out


def _parse_key(key):
    parts = key.split(",")
    if len(parts) == 1:
        return (int(parts[0]), 0)
    return (int(parts[0]), int(parts[1]))


def _per_degree(table, window):
    out = {d: 0 for d in range(window[0], window[1] + 1)}
    for (d, _w), v in table.items():
        out[d] += v
    return out


def _delta(name, expected, got):
    exp = {k: v for k, v in expected.items() if v}
    g = {k: v for k, v in got.items() if v}
    mismatches = 0
    for k in set(exp) | set(g):
        if exp.get(k, 0) != g.get(k, 0):
            mismatches += 1
    return {"name": name, "delta": mismatches}


def _hkr_descriptor(desc, A):
    if desc.get("name") == "polynomial":
        return "polynomial"
    if desc.get("name") == "exterior":
        return {"free_generators": [(desc.get("degree", -1), 1)]}
    raise SchemaError("hkr-check needs a polynomial or exterior algebra")


def _hkr_space(desc):
    name = desc.get("name")
    if name in ("sphere-small", "sphere-standard"):
        return ("sphere", desc.get("d", 2))
    if name == "torus":
        return ("surface", 1)
    if name == "surface":
        return ("surface", desc.get("g", 1))
    raise SchemaError("hkr-check needs a sphere or surface model")


def _scaling_automorphism(A, scalar):
    f = A.coefficients.field
    images = {}
    for p in range(A.dim):
        images[p] = {p: f.coerce(Fraction(scalar) ** A.weights[p])}
    return dga.AlgebraAutomorphism(A, images)


def _run_cech(spec, coefficients):
    cover_desc = spec.get("cover")
    if not isinstance(cover_desc, dict):
        raise SchemaError("cech task needs a cover descriptor")
    ambient = cover_desc.get("ambient", "circle")
    mode = cover_desc.get("mode", "coproduct")
    trunc = cover_desc.get("truncation", 2)
    if ambient == "circle":
        arcs = [
            (Fraction(a), Fraction(l)) for (a, l) in cover_desc.get("arcs", [])
        ]
        poset = cech.circle_arc_poset(arcs)
    elif ambient == "interval":
        opens = [tuple(o) for o in cover_desc.get("opens", [])]
        poset = cech.interval_poset(opens)
    else:
        raise SchemaError("cech cover ambient must be circle or interval")
    value = cover_desc.get("value", "constant-Q")
    if value == "constant-Q" and mode == "coproduct":
        F = cech.constant_precosheaf(poset, coefficients)
    elif value == "trivial" and mode == "tensor":
        F = cech.trivial_prefactorization(poset, coefficients)
    elif value == "arc-algebra" and mode == "tensor":
        A = build_algebra(spec["algebra"], coefficients)
        F = cech.circle_arc_algebra(A, poset)
    else:
        raise SchemaError(f"unsupported cech value/mode {value}/{mode}")
    ok, wit = cech.validate_prefactorization(F)
    if not ok:
        raise SchemaError(f"prefactorization audit failed: {wit}")
    return cech.cech_complex(F, poset.opens, trunc), True


def _cone_gluing_dims(coefficients):
    from .homalg import ChainComplex, ChainMap, cone

    f = coefficients.field
    Z = ChainComplex(coefficients)
    Z.add_element("z1", 0, 0)
    Z.add_element("z2", 0, 0)
    Z.freeze(support=(0, 0))
    XY = ChainComplex(coefficients)
    XY.add_element("x", 0, 0)
    XY.add_element("y", 0, 0)
    XY.freeze(support=(0, 0))
    fm = ChainMap(Z, XY)
    for z in ("z1", "z2"):
        fm.set_entry(z, "x", f.one)
        fm.set_entry(z, "y", f.coerce(-1))
    return cone(fm).betti((-1, 0))


def _cup_table(A, spec):
    f = A.coefficients.field
    cc = products.ClassicalCochains(A, 4)
    basis = []
    for n in range(3):
        for arg in cc.args[n]:
            for v in range(A.dim):
                basis.append({(n, arg, v): f.one})
    one = {(0, (), A.unit): f.one}
    ok = all(cc.cup(one, b) == b and cc.cup(b, one) == b for b in basis)
    for a in basis:
        for b in basis:
            for c in basis:
                if cc.cup(cc.cup(a, b), c) != cc.cup(a, cc.cup(b, c)):
                    ok = False
    table = []
    for i in range(A.dim):
        row = []
        for j in range(A.dim):
            prod = A.product(i, j)
            row.append(
                {A.labels[k]: str(v) for k, v in sorted(prod.items())}
            )
        table.append(row)
    return {"hh0_basis": list(A.labels), "product": table}, ok


def _shuffle_check(Y, A, spec):
    f = A.coefficients.field
    window = spec["window"]
    H = hh.hochschild_chain(Y, A, window, spec["weights"])
    C = H.complex
    rng = random.Random(spec.get("seed", 0))
    labels = sorted(
        lab for lab in C.index if lab[0] <= 2 and C.index[lab][0] >= -2
    )
    degs = {}
    for lab in labels:
        degs.setdefault(C.index[lab][0], []).append(lab)
    one = products.unit_chain(H)
    trials = spec.get("trials", 100)
    ok = True

    def rand_chain():
        d = rng.choice(sorted(degs))
        labs = rng.sample(degs[d], min(2, len(degs[d])))
        return d, {lab: f.coerce(rng.choice([-2, -1, 1, 2])) for lab in labs}

    def add(a, b, sign=1):
        out = dict(a)
        for k, v in b.items():
            acc = f.add(out.get(k, f.zero), f.mul(f.coerce(sign), v))
            if f.is_zero(acc):
                out.pop(k, None)
            else:
                out[k] = acc
        return out

    for _ in range(trials):
        du, u = rand_chain()
        dv, v = rand_chain()
        if products.shuffle_product(H, one, u) != u:
            ok = False
        uv = products.shuffle_product(H, u, v)
        lhs = C.d_apply(uv)
        rhs = add(
            products.shuffle_product(H, C.d_apply(u), v),
            products.shuffle_product(H, u, C.d_apply(v)),
            sign=(-1) ** (du % 2),
        )
        if lhs != rhs:
            ok = False
        vu = products.shuffle_product(H, v, u)
        sgn = (-1) ** ((du * dv) % 2)
        if uv != {k: f.mul(f.coerce(sgn), c) for k, c in vu.items()}:
            ok = False
    return ok, trials


def explain_job(spec):
    """Truncation level, per-level chain dimensions, estimated cost."""
    coefficients = parse_coefficients(spec)
    window = spec["window"]
    weights = spec["weights"]
    task = spec["task"]
    if task not in ("homology", "hkr-check", "bar"):
        return {"job": _echo(spec), "note": f"explain supports chain tasks"}
    A = build_algebra(spec["algebra"], coefficients, weights)
    space_desc = spec.get(
        "space", {"name": "interval" if task == "bar" else "circle"}
    )
    level = space_level_for(spec, A, space_desc)
    Y = build_space(space_desc, level)
    module = dga.algebra_as_bimodule(A) if task == "bar" else None
    top, exhausted = hh.required_level(Y, A, window, weights)
    dims = []
    est = 0
    for n in range(top + 1):
        monos = hh._level_monomials(
            Y, n, A, module, weights,
            None if exhausted else window[0] - 1 + n, True,
        )
        dims.append(len(monos))
        est += len(monos) ** 3
    report = {
        "job": _echo(spec),
        "truncation_level": top,
        "exhausted": exhausted,
        "level_dims": dims,
        "estimated_elimination_cost": est,
        "cap": spec["cap"],
        "feasible": max(dims, default=0) <= spec["cap"],
    }
    if not report["feasible"]:
        raise InfeasibleError(
            f"estimated level dimension {max(dims)} exceeds cap {spec['cap']}"
        )
    return report


# -- entry points -------------------------------------------------------------


def render(report, fmt):
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True, default=str)
    lines = [f"task: {report['job']['task']}"]
    if "truncation_level" in report:
        lines.append(f"truncation level: {report['truncation_level']}")
        lines.append(f"level dims: {report['level_dims']}")
        lines.append(
            f"estimated cost: {report['estimated_elimination_cost']}"
        )
        return "\n".join(lines) + "\n"
    lines.append("betti (degree, weight, dim):")
    for e in report.get("betti", []):
        lines.append(f"  {e['degree']:4d} {e['weight']:3d} {e['dim']:4d}")
    for d in report.get("oracles", []):
        lines.append(f"oracle {d['name']}: delta={d['delta']}")
    lines.append(f"max block: {report.get('max_block', 0)}")
    lines.append(f"wall time: {report.get('wall_time_s', 0)}s")
    lines.append(f"verdict: {report.get('verdict', 'n/a')}")
    return "\n".join(lines) + "\n"


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="hoch",
        description="exact higher Hochschild / factorization-homology jobs",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd in ("run", "explain"):
        p = sub.add_parser(cmd)
        p.add_argument("jobspec", help="path to a JSON job spec")
        p.add_argument("--coefficients", default=None, help="Q or Fp:<p>")
        p.add_argument("--window", default=None, help="a..b")
        p.add_argument("--weights", default=None, help="w1,w2,...")
        p.add_argument("--format", default=None, choices=("text", "json"))
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--cap", type=int, default=None)
    args = parser.parse_args(argv)
    try:
        with open(args.jobspec) as handle:
            raw = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.coefficients:
            raw["coefficients"] = args.coefficients
        if args.window:
            lo, _, hi = args.window.partition("..")
            raw["window"] = [int(lo), int(hi)]
        if args.weights:
            raw["weights"] = [int(w) for w in args.weights.split(",")]
        if args.format:
            raw["output"] = args.format
        if args.threads is not None:
            raw["threads"] = args.threads
        if args.cap is not None:
            raw["cap"] = args.cap
        spec = load_jobspec(raw)
    except (SchemaError, ValueError) as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command == "explain":
            report = explain_job(spec)
            sys.stdout.write(render(report, spec["output"]))
            return 0
        report = run_job(spec)
    except (InfeasibleError, EnumerationCapError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3
    except (TruncationError, WindowError, AlgebraClassError,
            cech.CoverError, SchemaError, ValueError) as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(render(report, spec["output"]))
    return 0 if report["verdict"] == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
