"""Command line front end.

Verbs: ``element``, ``table``, ``verify``, ``euler`` and ``proxies``.  Every
verb prints deterministic output and exits with status 0 exactly when all
identities it checked hold (status 2 is reserved for usage errors).
"""

from __future__ import annotations

import argparse
import sys
from itertools import combinations
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import yaml

from . import linalg
from .bgg_ops import (
    PROXY_DIMS,
    binom,
    build_S_dagger,
    build_S_p,
    proxy_table,
    w_dim,
    w_tilde_dim,
)
from .bubbles import (
    bubble_basis,
    bubble_dim_formula,
    bubble_nullspace,
    reference_bubbles,
    reference_simplex,
    span_equal,
)
from .elements import (
    FAMILIES,
    ElementError,
    build_element,
    conformity_check,
    dof_table,
    normalize,
    proxy_name,
    unisolvency_check,
)
from .exterior import alt_dim, free_matrix, s_map, y_blocks
from .meshcomplex import MeshError, euler_audit, euler_valid, load_complex, sample_meshes

FORMATS = ("text", "tsv", "markdown")
TABLES = ("dim11", "dim22", "dim33", "dim22j", "dim33j", "threeD", "fourD")
SUITES = ("appendixA", "adjoint", "bubbles", "unisolvency", "conformity", "all")


# ---------------------------------------------------------------------------
# Output


def render(headers: list, rows: list, fmt: str = "text") -> str:
    """Render a table as aligned text, TSV or a markdown pipe table."""
    cells = [[str(h) for h in headers]] + [[str(c) for c in r] for r in rows]
    if fmt == "tsv":
        return "\n".join("\t".join(r) for r in cells)
    if fmt == "markdown":
        out = ["| " + " | ".join(cells[0]) + " |", "|" + "|".join("---" for _ in headers) + "|"]
        out += ["| " + " | ".join(r) + " |" for r in cells[1:]]
        return "\n".join(out)
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells)


def status(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


# ---------------------------------------------------------------------------
# Expected data


@lru_cache(maxsize=None)
def expected_tables() -> dict:
    text = resources.files("tensorwhitney").joinpath("data/expected_tables.yaml").read_text()
    return yaml.safe_load(text)


def _face_row(family: str, ambient: int, ncols: int, k: int, l: int, p: int, q) -> list[int]:
    """Per-face counts for face dimensions 1..ncols-1, then the trailing column on an ncols-face."""
    row = dof_table(family, ambient, k, l, p, 1, "minus", q)[1:ncols]
    row += [dof_table(family, ncols, k, l, p, 1, "minus", q)[ncols]]
    return row


@dataclass(frozen=True)
class TableRow:
    label: str
    ambient: int
    computed: list
    expected: list

    @property
    def ok(self) -> bool:
        return self.computed == self.expected


def dimension_table(which: str) -> tuple[list, list[TableRow]]:
    spec = expected_tables()[which]
    rows = []
    columns = spec[0]["columns"]
    for entry in spec:
        ambients = entry.get("ambients", [entry.get("ambient")])
        ncols = len(entry["columns"])
        for n in ambients:
            expected = [n if v == "n" else int(v) for v in entry["expected"]]
            computed = _face_row(entry["family"], n, ncols, entry["k"], entry["l"], entry.get("p", 1), entry.get("q"))
            rows.append(TableRow(entry["label"], n, computed, expected))
    return columns, rows


@dataclass(frozen=True)
class CatalogEntry:
    table: str
    k: int
    l: int
    name: str
    expected_dim: int
    dim: int
    per_face: list
    unisolvent: bool

    @property
    def ok(self) -> bool:
        return self.dim == self.expected_dim and self.unisolvent


def catalog_3d() -> list[CatalogEntry]:
    out = []
    for tname, spec in expected_tables()["threeD"].items():
        for k, l, name, dim in spec["entries"]:
            e = build_element(spec["family"], 3, k, l, spec["p"], 1)
            u = unisolvency_check(e)
            out.append(CatalogEntry(tname, k, l, name, dim, e.dim, e.per_face_counts(), u.verdict))
    return out


def proxies_4d() -> list[tuple]:
    """(table, k, l, name, name dimension, computed dimension)."""
    data = expected_tables()["fourD"]
    out = []
    for table in ("alt", "W"):
        for k, row in enumerate(data[table]):
            for l, name in enumerate(row):
                if table == "alt":
                    d = alt_dim(4, k, l)
                else:
                    d = w_dim(4, k, l) if k <= l else w_tilde_dim(4, k, l)
                out.append((table, k, l, name, data["dims"][name], d))
    return out


# ---------------------------------------------------------------------------
# Verification suites


@dataclass(frozen=True)
class Case:
    suite: str
    name: str
    ok: bool
    detail: str = ""


def suite_appendix_a(nmax: int = 6) -> list[Case]:
    """Rank thresholds of the free-group maps s_[p] on single and double index groups."""
    out = []
    for n in range(1, nmax + 1):
        for k in range(n + 1):
            for p in range(1, n - k + 1):
                m = free_matrix(n, (k,), s_map, p)
                rank = linalg.bareiss_rank(m, binom(n, k))
                inj = rank == binom(n, k)
                sur = rank == binom(n, k + p)
                ok = inj == (n >= 2 * k + p) and sur == (n <= 2 * k + p)
                out.append(Case("appendixA", f"s_[{p}] on X({n},{k})", ok, f"rank {rank}"))
        for k in range(n + 1):
            for l in range(n + 1):
                for p in range(1, l + 1):
                    if k + p > n:
                        continue
                    blocks = y_blocks(n, k, l)
                    targets = y_blocks(n, k + p, l - p)
                    ok = True
                    # s_[p] preserves union and intersection, so it acts block by block
                    for key in sorted(set(blocks) | set(targets)):
                        gens, tgt = blocks.get(key, []), targets.get(key, [])
                        index = {g: i for i, g in enumerate(tgt)}
                        mat = [[0] * len(gens) for _ in tgt]
                        for j, (I, J) in enumerate(gens):
                            pool = tuple(x for x in J if x not in I)
                            for P in combinations(pool, p):
                                key = (tuple(sorted(I + P)), tuple(x for x in J if x not in P))
                                mat[index[key]][j] += 1
                        rank = linalg.bareiss_rank(mat, len(gens)) if tgt and gens else 0
                        inj = rank == len(gens)
                        sur = rank == len(tgt)
                        ok &= inj == (l >= k + p) and sur == (l <= k + p)
                    out.append(Case("appendixA", f"s_[{p}] on Y({n},{k},{l}) blocks", ok))
    return out


def suite_adjoint(nmax: int = 6) -> list[Case]:
    """matrix(S_[p]^{k,l}) equals the transpose of matrix(S-dagger_[p]^{k+p,l-p})."""
    out = []
    for n in range(1, nmax + 1):
        for k in range(n + 1):
            for l in range(n + 1):
                for p in range(1, n + 1):
                    if k + p > n or l - p < 0:
                        continue
                    S = build_S_p(n, k, l, p)
                    D = build_S_dagger(n, k + p, l - p, p)
                    ok = S.rows() == D.transpose().rows()
                    out.append(Case("adjoint", f"S_[{p}]^{{{k},{l}}} n={n}", ok))
    return out


def suite_bubbles(nmax: int = 4, rmax: int = 2) -> list[Case]:
    out = []
    for poly in ("minus", "full"):
        for m in range(1, nmax + 1):
            for r in range(1, rmax + 1):
                for k in range(m + 1):
                    for l in range(m + 1):
                        got = len(reference_bubbles(poly, m, r, k, l))
                        want = bubble_dim_formula(poly, m, r, k, l)
                        out.append(Case("bubbles", f"B {poly} r={r} ({k},{l}) m={m}", got == want, f"{got} vs {want}"))
    for poly in ("minus", "full"):
        for m in range(1, min(nmax, 3) + 1):
            for r in range(1, min(rmax, 2) + 1):
                for k in range(m + 1):
                    for l in range(m + 1):
                        K = reference_simplex(m)
                        a = bubble_basis(K, poly, k, l, 1, r).basis
                        b = bubble_nullspace(K, poly, k, l, r)
                        out.append(Case("bubbles", f"structural=nullspace {poly} r={r} ({k},{l}) m={m}", span_equal(list(a), b)))
    return out


def family_instances(nmax: int, rmax: int, polys=("minus", "full"), pmax: int | None = None) -> list[tuple]:
    """All valid (family, n, k, l, p, r, poly) with n <= nmax, r <= rmax and p <= pmax (default n)."""
    out = []
    for n in range(1, nmax + 1):
        for fam in FAMILIES:
            for k in range(n + 1):
                for l in range(n + 1):
                    for p in range(1, (n if pmax is None else pmax) + 1):
                        for r in range(1, rmax + 1):
                            for poly in polys:
                                if fam == "const_W" and (r > 1 or poly != "minus"):
                                    continue
                                try:
                                    P = normalize(fam, n, k, l, p, r, poly)
                                except ElementError:
                                    continue
                                if P.p != p:
                                    continue
                                out.append((fam, n, k, l, p, r, poly))
    return out


def suite_unisolvency(nmax: int = 3, rmax: int = 1, polys=("minus", "full")) -> list[Case]:
    out = []
    for c in family_instances(nmax, rmax, polys):
        rep = unisolvency_check(build_element(*c))
        out.append(Case("unisolvency", rep.line().rsplit(" ", 1)[0], rep.verdict))
    return out


def suite_conformity(nmax: int = 3, rmax: int = 1, polys=("minus",)) -> list[Case]:
    out = []
    for c in family_instances(nmax, rmax, polys):
        if c[1] < 2:
            continue
        rep = conformity_check(*c)
        out.append(Case("conformity", rep.line().rsplit(" ", 1)[0], rep.verdict))
    return out


def run_suite(name: str, nmax: int, rmax: int) -> list[Case]:
    if name == "appendixA":
        return suite_appendix_a(nmax)
    if name == "adjoint":
        return suite_adjoint(nmax)
    if name == "bubbles":
        return suite_bubbles(min(nmax, 4), rmax)
    if name == "unisolvency":
        return suite_unisolvency(nmax, rmax)
    if name == "conformity":
        return suite_conformity(nmax, rmax)
    if name == "all":
        out = []
        for s in SUITES[:-1]:
            out += run_suite(s, nmax, rmax)
        return out
    raise ValueError(f"unknown suite {name!r}")


# ---------------------------------------------------------------------------
# Commands


def cmd_element(args) -> int:
    try:
        e = build_element(args.family, args.n, args.k, args.l, args.p, args.r, args.poly, args.q)
    except ElementError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    rep = unisolvency_check(e)
    name = proxy_name(e.params) or e.params.family
    counts = e.per_face_counts()
    lines = [
        f"{name}: dim {e.dim}, {rep.num_dofs} DoFs, unisolvency {status(rep.verdict)}",
        f"family {e.params.family} n={e.params.n} k={e.params.k} l={e.params.l} p={e.params.p} r={e.params.r} poly={e.params.poly}"
        + ("" if e.params.q is None else f" q={e.params.q}"),
        f"expected dimension {e.expected_dim}, rank {rep.rank}" + ("" if rep.determinant is None else f", det {rep.determinant}"),
    ]
    rows = [[m, counts[m], sum(1 for d in e.dofs if d.face.dim == m)] for m in range(e.params.n + 1)]
    ok = rep.verdict
    if args.conformity and e.params.n >= 2:
        cr = conformity_check(e)
        lines.append(f"conformity on a two-cell patch: {status(cr.verdict)} ({cr.checks} checks on {cr.shared_faces} shared faces)")
        ok &= cr.verdict
    for note in e.notes:
        lines.append(f"note: {note}")
    print("\n".join(lines))
    print(render(["face dim", "DoFs per face", "DoFs on cell"], rows, args.format))
    return 0 if ok else 1


def cmd_table(args) -> int:
    which = args.which
    ok = True
    if which in ("dim11", "dim22", "dim33", "dim22j", "dim33j"):
        columns, rows = dimension_table(which)
        headers = ["row", "n"] + columns + (["check"] if args.check else [])
        body = []
        for r in rows:
            line = [r.label, r.ambient] + r.computed
            if args.check:
                line.append(status(r.ok) if r.ok else f"FAIL expected {' '.join(map(str, r.expected))}")
                ok &= r.ok
            body.append(line)
        print(render(headers, body, args.format))
    elif which == "threeD":
        entries = catalog_3d()
        headers = ["table", "k", "l", "name", "dim", "DoFs per face"] + (["check"] if args.check else [])
        body = []
        for e in entries:
            line = [e.table, e.k, e.l, e.name, e.dim, " ".join(map(str, e.per_face))]
            if args.check:
                line.append(status(e.ok))
                ok &= e.ok
            body.append(line)
        print(render(headers, body, args.format))
    else:
        headers = ["table", "k", "l", "proxy", "proxy dim", "computed dim"] + (["check"] if args.check else [])
        body = []
        for t, k, l, name, pd, d in proxies_4d():
            line = [t, k, l, name, pd, d]
            if args.check:
                line.append(status(pd == d))
                ok &= pd == d
            body.append(line)
        print(render(headers, body, args.format))
    return 0 if ok else 1


def cmd_verify(args) -> int:
    cases = run_suite(args.suite, args.nmax, args.rmax)
    cases = sorted(cases, key=lambda c: (SUITES.index(c.suite), c.name))
    failed = [c for c in cases if not c.ok]
    if args.verbose:
        print(render(["suite", "case", "verdict", "detail"], [[c.suite, c.name, status(c.ok), c.detail] for c in cases], args.format))
    summary = {}
    for c in cases:
        s = summary.setdefault(c.suite, [0, 0])
        s[0] += 1
        s[1] += c.ok
    print(render(["suite", "cases", "passed", "verdict"], [[s, t, p, status(t == p)] for s, (t, p) in summary.items()], args.format))
    for c in failed[:20]:
        print(f"FAIL {c.suite}: {c.name} {c.detail}".rstrip())
    return 0 if not failed else 1


def cmd_euler(args) -> int:
    if args.mesh:
        try:
            meshes = [load_complex(args.mesh)]
        except (MeshError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    else:
        meshes = sample_meshes(args.sample)
    body = []
    ok = True
    for cx in meshes:
        n = cx.dim
        pairs = [(args.l, args.p)] if args.l is not None and args.p is not None else [
            (l, p) for l in range(n + 1) for p in range(1, n + 1) if euler_valid(n, l, p) and (args.l in (None, l)) and (args.p in (None, p))
        ]
        for l, p in pairs:
            if not euler_valid(n, l, p):
                print(f"error: the Euler audit needs p >= 1 and l + p <= n (got l={l}, p={p}, n={n})", file=sys.stderr)
                return 2
            a = euler_audit(cx, l, p)
            ok &= a.ok
            body.append([cx.name or "mesh", n, l, p, a.lhs, a.rhs, a.residual, a.skeletal_residual, status(a.ok)])
    print(render(["mesh", "n", "l", "p", "lhs", "rhs", "residual", "skeletal residual", "verdict"], body, args.format))
    return 0 if ok else 1


def cmd_proxies(args) -> int:
    table = proxy_table(args.n, not args.alt)
    size = args.n + 1
    headers = ["k \\ l"] + [str(l) for l in range(size)]
    body = [[k] + [table[(k, l)] for l in range(size)] for k in range(size)]
    print(render(headers, body, args.format))
    ok = True
    for (k, l), name in sorted(table.items()):
        if args.alt:
            d = alt_dim(args.n, k, l)
        else:
            d = w_dim(args.n, k, l) if k <= l else w_tilde_dim(args.n, k, l)
        ok &= PROXY_DIMS[args.n][name] == d
    print(f"proxy dimensions {status(ok)}")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tensorwhitney", description="Finite elements for form-valued forms with exact arithmetic.")
    sub = parser.add_subparsers(dest="verb", required=True)

    def fmt(p):
        p.add_argument("--format", choices=FORMATS, default="text")

    p = sub.add_parser("element", help="shape dimension, DoF counts and unisolvency of one family instance")
    p.add_argument("--family", required=True, help=f"one of {', '.join(FAMILIES)} (ij_Wp is accepted for ijp_W)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--poly", default="minus", help="minus (P_r^-, also Pminus or Pr_minus) or full (P_r, also Pr)")
    p.add_argument("--q", type=int, default=None, help="lower trace order for the mixed ijp_W variant")
    p.add_argument("--conformity", action="store_true", help="also run the two-cell patch test")
    fmt(p)
    p.set_defaults(func=cmd_element)

    p = sub.add_parser("table", help="reproduce a dimension-count or catalog table")
    p.add_argument("--which", choices=TABLES, required=True)
    p.add_argument("--check", action="store_true", help="compare with the embedded expected values")
    fmt(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--nmax", type=int, default=3)
    p.add_argument("--rmax", type=int, default=1)
    p.add_argument("--verbose", action="store_true", help="list every case")
    fmt(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("euler", help="Euler characteristic audit on a mesh")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--mesh", help="YAML or JSON mesh document")
    src.add_argument("--sample", type=int, help="use the built-in contractible meshes in this dimension")
    p.add_argument("--l", type=int, default=None)
    p.add_argument("--p", type=int, default=None)
    fmt(p)
    p.set_defaults(func=cmd_euler)

    p = sub.add_parser("proxies", help="vector proxy names of Alt^{k,l} or W^{k,l}")
    p.add_argument("--n", type=int, choices=(3, 4), required=True)
    p.add_argument("--alt", action="store_true", help="show Alt^{k,l} instead of the symmetric spaces")
    fmt(p)
    p.set_defaults(func=cmd_proxies)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
