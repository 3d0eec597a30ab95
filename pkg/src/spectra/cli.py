"""Command-line front end: experiment configuration, execution, emission.

Subcommands
-----------
``sample``       draw one matrix from an ensemble
``density``      spectral density of a pencil on a grid (CSV)
``support``      detected support intervals (JSON)
``norm``         spectral norm of a pencil
``fock-moment``  vacuum expectation of a *-polynomial on the Fock oracle
``verify X``     Monte-Carlo checks; X one of master-equation,
                 master-inequality, gn-vs-g, poincare, bias, containment,
                 norm-convergence, expected-norm, power-norm,
                 unitary-pairs, circular-bounds

Exit codes: 0 all bound checks passed, 1 invalid configuration,
2 solver failure, 3 a bound check failed.  Outputs embed the resolved
configuration and the package version; identical configurations produce
byte-identical files.  ``SPECTRA_SEED`` supplies the default seed.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import SolverFailure, __version__, dyson, experiments, fock
from .ncpoly import NCPolynomial, Pencil
from .sampling import SeedSpec, haar_unitary_qr, pseudo_haar_unitary, sample_grm, sample_sgrm

__all__ = ["main", "run", "parse_polynomial", "format_polynomial",
           "parse_complex", "parse_grid", "PolynomialParseError"]


class PolynomialParseError(ValueError):
    """Parse failure with the offending position in ``position``."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


# ---------------------------------------------------------------------------
# small parsers
# ---------------------------------------------------------------------------

def parse_complex(text):
    """Complex literal like ``0+1i``, ``2.5``, ``1-3e-2j``."""
    cleaned = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(cleaned)
    except ValueError as exc:
        raise ValueError(f"cannot parse complex literal {text!r}") from exc


def parse_grid(text):
    """Grid syntax ``lo:hi:count``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be lo:hi:count, got {text!r}")
    lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 2 or not hi > lo:
        raise ValueError(f"grid needs hi > lo and count >= 2, got {text!r}")
    return np.linspace(lo, hi, count)


def _tokenize_poly(text):
    tokens = []
    k = 0
    while k < len(text):
        ch = text[k]
        if ch.isspace():
            k += 1
        elif ch in "+-*":
            tokens.append((ch, ch, k))
            k += 1
        elif ch == "(":
            end = text.find(")", k)
            if end < 0:
                raise PolynomialParseError("unclosed parenthesis", k)
            tokens.append(("coeff", text[k + 1:end], k))
            k = end + 1
        elif ch == "x":
            j = k + 1
            while j < len(text) and text[j].isdigit():
                j += 1
            if j == k + 1:
                raise PolynomialParseError("variable needs an index, like x1", k)
            tokens.append(("var", int(text[k + 1:j]), k))
            k = j
        elif ch.isdigit() or ch == ".":
            j = k
            while j < len(text) and (text[j].isdigit() or text[j] in ".eE"
                                     or (text[j] in "+-" and text[j - 1] in "eE")):
                j += 1
            tokens.append(("coeff", text[k:j], k))
            k = j
        else:
            raise PolynomialParseError(f"unexpected character {ch!r}", k)
    return tokens


def parse_polynomial(text, num_vars=None):
    """Parse ``(2+1i)*x1*x2 + x2*x1 - 1`` style *-polynomial text.

    Grammar: terms joined by + or -; each term is an optional complex
    coefficient followed by variable factors ``x<k>`` with optional
    ``*`` separators.  Raises :class:`PolynomialParseError` with the
    offending position.
    """
    tokens = _tokenize_poly(text)
    if not tokens:
        raise PolynomialParseError("empty polynomial", 0)
    terms = {}
    max_var = 0
    pos = 0
    sign = 1.0
    k = 0

    def fail(msg, position):
        raise PolynomialParseError(msg, position)

    while k < len(tokens):
        kind, val, pos = tokens[k]
        if kind in "+-":
            if k == 0 and kind == "-":
                sign = -1.0
                k += 1
                continue
            fail("expected a term", pos)
        coeff = 1.0 + 0.0j
        have_any = False
        if kind == "coeff":
            try:
                coeff = parse_complex(str(val))
            except ValueError:
                fail(f"bad coefficient {val!r}", pos)
            have_any = True
            k += 1
        word = []
        expect_factor = False
        while k < len(tokens):
            kind, val, pos = tokens[k]
            if kind == "*":
                if expect_factor:
                    fail("dangling '*'", pos)
                expect_factor = True
                k += 1
            elif kind == "var":
                word.append(int(val))
                max_var = max(max_var, int(val))
                expect_factor = False
                have_any = True
                k += 1
            elif kind == "coeff" and expect_factor:
                fail("coefficient must lead its term", pos)
            else:
                break
        if expect_factor:
            fail("dangling '*'", pos)
        if not have_any:
            fail("expected a term", pos)
        w = tuple(word)
        terms[w] = terms.get(w, 0.0) + sign * coeff
        if k < len(tokens):
            kind, val, pos = tokens[k]
            if kind not in "+-":
                fail("expected '+' or '-' between terms", pos)
            sign = 1.0 if kind == "+" else -1.0
            k += 1
            if k >= len(tokens):
                fail("trailing operator", pos)
    nv = num_vars if num_vars is not None else max(max_var, 1)
    return NCPolynomial(terms, nv)


def format_polynomial(p):
    """Canonical printer; ``parse_polynomial`` round-trips its output exactly."""
    if not p.terms:
        return "(0.0+0.0i)"
    parts = []
    for w in sorted(p.terms, key=lambda w: (len(w), w)):
        c = p.terms[w]
        sign = "+" if c.imag >= 0 else "-"
        lit = f"({float(c.real)!r}{sign}{abs(float(c.imag))!r}i)"
        if w:
            parts.append(lit + "*" + "*".join(f"x{i}" for i in w))
        else:
            parts.append(lit)
    return " + ".join(parts)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _r(x):
    """Shortest round-trip decimal for a real number (CSV cells)."""
    return repr(float(x))

def _jsonable(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, SeedSpec):
        return {"master_seed": obj.master_seed, "trial_index": obj.trial_index,
                "stream_index": obj.stream_index}
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, experiments.RunRecord):
        return _jsonable({
            "experiment_id": obj.experiment_id,
            "seed": obj.seed,
            "params": obj.params,
            "aggregate": obj.aggregate,
            "bound_check": obj.bound_check,
            "details": obj.details,
            "per_trial": obj.per_trial,
        })
    if isinstance(obj, experiments.ScalingFit):
        return _jsonable({
            "n_values": obj.n_values,
            "observed": obj.observed,
            "slope": obj.slope,
            "intercept": obj.intercept,
            "r_squared": obj.r_squared,
        })
    return obj


def _emit(args, payload_builder_csv, payload_json):
    """Write the result envelope in the selected format."""
    envelope = {"version": __version__, "config": args._resolved_config,
                "results": _jsonable(payload_json)}
    if args.format == "json":
        text = json.dumps(envelope, indent=2)
    else:
        lines = [f"# version={__version__}",
                 "# config=" + json.dumps(args._resolved_config)]
        lines.extend(payload_builder_csv())
        text = "\n".join(lines)
    text += "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _collect_records(result):
    if isinstance(result, experiments.RunRecord):
        return [result]
    records = []
    for item in (result if isinstance(result, (list, tuple)) else [result]):
        if isinstance(item, experiments.RunRecord):
            records.append(item)
        elif isinstance(item, (list, tuple)):
            records.extend(r for r in item if isinstance(r, experiments.RunRecord))
    return records


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # invalid configuration exits 1, not argparse's default 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(1)


def _default_seed():
    env = os.environ.get("SPECTRA_SEED")
    return int(env) if env else 0


def _pencil_from_args(args):
    """Pencil from --pencil JSON, else a0 = 0, a_i = identity of size m."""
    m = getattr(args, "m", 1) or 1
    r = getattr(args, "r", 1) or 1
    spec = getattr(args, "pencil", None)
    if spec:
        if spec.startswith("@"):
            with open(spec[1:], encoding="utf-8") as fh:
                data = json.load(fh)
        else:
            data = json.loads(spec)
        mats = [_matrix_from_json(mat) for mat in data]
        return Pencil(mats)
    a = [np.zeros((m, m))]
    a.extend(np.eye(m) for _ in range(r))
    return Pencil(a)


def _matrix_from_json(data):
    arr = np.asarray(data, dtype=float) if _is_real_nested(data) else None
    if arr is not None:
        return arr.astype(complex)
    # entries as {"re":..,"im":..} or [re, im]
    rows = []
    for row in data:
        out = []
        for cell in row:
            if isinstance(cell, dict):
                out.append(complex(cell["re"], cell["im"]))
            elif isinstance(cell, (list, tuple)):
                out.append(complex(cell[0], cell[1]))
            else:
                out.append(complex(cell))
        rows.append(out)
    return np.array(rows, dtype=complex)


def _is_real_nested(data):
    try:
        np.asarray(data, dtype=float)
        return True
    except (TypeError, ValueError):
        return False


def _lambda_from_args(args, m):
    text = getattr(args, "lam", None) or "0+1i"
    text = text.strip()
    if text.startswith("["):
        return _matrix_from_json(json.loads(text))
    return parse_complex(text) * np.eye(m)


def _resolved(args, keys):
    cfg = {"seed": args.seed, "threads": args.threads, "format": args.format}
    for key in keys:
        cfg[key] = getattr(args, key.replace("-", "_"))
    return _jsonable(cfg)


def _apply_config_file(parser, argv):
    """Fold --config JSON file into argv as defaults (flags win)."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    try:
        path = argv[idx + 1]
    except IndexError:
        parser.error("--config needs a path")
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        parser.error("config file must hold a JSON object")
    known = {a.lstrip("-") for a in _ALL_OPTION_STRINGS}
    injected = []
    for key, val in data.items():
        if key not in known:
            parser.error(f"unknown config key {key!r}")
        if isinstance(val, bool):
            if val:
                injected.append(f"--{key}")
        elif isinstance(val, list):
            injected.extend([f"--{key}", ",".join(str(v) for v in val)])
        else:
            injected.extend([f"--{key}", str(val)])
    rest = argv[:idx] + argv[idx + 2:]
    # injected defaults go right after the subcommand words
    split = 2 if len(rest) > 1 and not rest[1].startswith("-") else 1
    return rest[:split] + injected + rest[split:]


_ALL_OPTION_STRINGS = set()


def _add(parser, *names, **kw):
    _ALL_OPTION_STRINGS.update(names)
    parser.add_argument(*names, **kw)


def _int_list(text):
    return [int(v) for v in str(text).split(",") if v != ""]


def _common(sub):
    _add(sub, "--seed", type=int, default=_default_seed(),
         help="master seed (default: SPECTRA_SEED or 0)")
    _add(sub, "--threads", type=int, default=1, help="trial worker budget")
    _add(sub, "--output", default=None, help="output path (default stdout)")
    _add(sub, "--format", choices=("json", "csv"), default="json")
    _add(sub, "--config", default=None, help=argparse.SUPPRESS)


def _pencil_opts(sub):
    _add(sub, "--m", type=int, default=1, help="coefficient dimension")
    _add(sub, "--r", type=int, default=1, help="number of matrix variables")
    _add(sub, "--pencil", default=None,
         help="JSON list of (r+1) Hermitian matrices, or @file")


def build_parser():
    parser = _Parser(prog="spectra",
                     description="random-matrix spectra against free-limit predictions")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("sample", help="draw one matrix")
    _add(p, "--ensemble", choices=("sgrm", "grm", "psi-unitary", "haar-unitary"),
         default="sgrm")
    _add(p, "--n", type=int, required=True)
    _add(p, "--sigma2", type=float, default=None, help="entry variance (default 1/n)")
    _common(p)

    p = subs.add_parser("density", help="spectral density on a grid")
    _pencil_opts(p)
    _add(p, "--grid", default="-3:3:601", help="lo:hi:count")
    _add(p, "--eta", type=float, default=1e-3)
    _add(p, "--no-richardson", action="store_true")
    _common(p)

    p = subs.add_parser("support", help="support intervals of the pencil spectrum")
    _pencil_opts(p)
    _add(p, "--eps-refine", type=float, default=1e-4)
    _common(p)

    p = subs.add_parser("norm", help="spectral norm of the pencil")
    _pencil_opts(p)
    _common(p)

    p = subs.add_parser("fock-moment", help="vacuum expectation of a polynomial")
    _add(p, "--poly", required=True, help="polynomial text, e.g. 'x1*x2 + x2*x1'")
    _add(p, "--depth", type=int, default=None)
    _common(p)

    v = subs.add_parser("verify", help="Monte-Carlo verification experiments")
    vsubs = v.add_subparsers(dest="experiment", required=True)

    def vsub(name, pencil=False, lam=False):
        q = vsubs.add_parser(name)
        if pencil:
            _pencil_opts(q)
        if lam:
            _add(q, "--lambda", dest="lam", default="0+1i",
                 help="complex scalar like 0+2i (times identity), or JSON matrix")
        _add(q, "--trials", type=int, default=200)
        _common(q)
        return q

    q = vsub("master-equation", pencil=True, lam=True)
    _add(q, "--n", type=int, default=100)

    q = vsub("master-inequality", pencil=True, lam=True)
    _add(q, "--n-list", type=_int_list, default=[50, 100, 200, 400])

    q = vsub("gn-vs-g", pencil=True, lam=True)
    _add(q, "--n", type=int, default=200)

    q = vsub("poincare", pencil=True)
    _add(q, "--n", type=int, default=100)
    _add(q, "--test-fn", default="gauss", help="gauss|cosine|square|bump")
    _add(q, "--bump-width", type=float, default=2.05)

    q = vsub("bias", pencil=True)
    _add(q, "--n-list", type=_int_list, default=[50, 100, 200, 400])
    _add(q, "--test-fn", default="bump")
    _add(q, "--bump-width", type=float, default=2.05)
    _add(q, "--trials-list", type=_int_list, default=None,
         help="per-n trial counts overriding --trials")

    q = vsub("containment", pencil=True)
    _add(q, "--n", type=int, default=400)
    _add(q, "--eps", type=float, default=0.3)

    q = vsub("norm-convergence")
    _add(q, "--poly", default="x1")
    _add(q, "--n-list", type=_int_list, default=[1000])
    _add(q, "--depth", type=int, default=None)

    q = vsub("expected-norm")
    _add(q, "--n-list", type=_int_list, default=[4, 16, 64, 256, 1000])

    q = vsub("power-norm")
    _add(q, "--p", type=int, default=1)
    _add(q, "--n", type=int, default=1000)

    q = vsub("unitary-pairs")
    _add(q, "--pairs-r", type=int, default=2)
    _add(q, "--n", type=int, default=80)
    _add(q, "--sampler", choices=("psi", "qr"), default="psi")

    q = vsub("circular-bounds")
    _add(q, "--n", type=int, default=500)
    _add(q, "--stacked", type=int, default=2,
         help="use r standard-basis column coefficients (c = r)")

    return parser


# ---------------------------------------------------------------------------
# command bodies
# ---------------------------------------------------------------------------

def _cmd_sample(args):
    seed = SeedSpec(args.seed)
    sigma2 = args.sigma2 if args.sigma2 is not None else 1.0 / args.n
    if args.ensemble == "sgrm":
        mat = sample_sgrm(args.n, sigma2, seed).entries
    elif args.ensemble == "grm":
        mat = sample_grm(args.n, sigma2, seed).entries
    elif args.ensemble == "psi-unitary":
        mat = pseudo_haar_unitary(args.n, seed)
    else:
        mat = haar_unitary_qr(args.n, seed)
    args._resolved_config = _resolved(args, ["ensemble", "n", "sigma2"])

    def csv_rows():
        rows = ["i,j,re,im"]
        for i in range(mat.shape[0]):
            for j in range(mat.shape[1]):
                rows.append(f"{i},{j},{_r(mat[i, j].real)},{_r(mat[i, j].imag)}")
        return rows

    _emit(args, csv_rows, {"matrix": mat.astype(complex)})
    return 0


def _cmd_density(args):
    P = _pencil_from_args(args)
    grid = parse_grid(args.grid)
    dens = dyson.spectral_density(P, grid, args.eta,
                                  richardson=not args.no_richardson)
    args._resolved_config = _resolved(args, ["m", "r", "pencil", "grid", "eta",
                                             "no_richardson"])

    def csv_rows():
        rows = ["x,rho,eta,residual"]
        for x, rho, res in zip(dens.grid, dens.rho, dens.residuals):
            rows.append(f"{_r(x)},{_r(rho)},{_r(dens.eta)},{_r(res)}")
        return rows

    _emit(args, csv_rows, {"density": {"grid": dens.grid, "rho": dens.rho,
                                       "eta": dens.eta, "support": dens.support}})
    return 0


def _cmd_support(args):
    P = _pencil_from_args(args)
    intervals = dyson.support(P, eps_refine=args.eps_refine)
    args._resolved_config = _resolved(args, ["m", "r", "pencil", "eps_refine"])

    def csv_rows():
        rows = ["lo,hi"]
        rows.extend(f"{_r(lo)},{_r(hi)}" for lo, hi in intervals)
        return rows

    _emit(args, csv_rows, {"support": [list(iv) for iv in intervals]})
    return 0


def _cmd_norm(args):
    P = _pencil_from_args(args)
    value = dyson.pencil_norm(P)
    args._resolved_config = _resolved(args, ["m", "r", "pencil"])
    _emit(args, lambda: ["norm", _r(value)], {"norm": value})
    return 0


def _cmd_fock_moment(args):
    p = parse_polynomial(args.poly)
    depth = args.depth if args.depth is not None else fock.default_depth(p.num_vars)
    basis = fock.make_basis(p.num_vars, depth)
    val = fock.vacuum_expectation(fock.evaluate_poly(p, basis))
    args._resolved_config = _resolved(args, ["poly", "depth"])
    _emit(args, lambda: ["re,im", f"{_r(val.real)},{_r(val.imag)}"],
          {"moment": val, "depth": depth, "polynomial": format_polynomial(p)})
    return 0


def _records_csv(records):
    rows = ["n,observed,bound,passed"]
    for rec in records:
        n = rec.params.get("n", "")
        if rec.bound_check:
            rows.append(f"{n},{_r(rec.bound_check['observed'])},"
                        f"{_r(rec.bound_check['bound'])},{rec.bound_check['passed']}")
        elif "bias" in rec.details:
            rows.append(f"{n},{_r(abs(rec.details['bias']))},,")
        else:
            rows.append(f"{n},{_r(rec.aggregate.get('mean'))},,")
    return rows


def _cmd_verify(args):
    name = args.experiment
    seed = SeedSpec(args.seed)
    fit = None
    if name in ("master-equation", "master-inequality", "gn-vs-g", "poincare",
                "bias", "containment"):
        P = _pencil_from_args(args)
    if name == "master-equation":
        lam = _lambda_from_args(args, P.m)
        result = experiments.master_equation_residual(
            P, lam, args.n, args.trials, seed, threads=args.threads)
        keys = ["m", "r", "pencil", "n", "trials", "lam"]
    elif name == "master-inequality":
        lam = _lambda_from_args(args, P.m)
        fit, result = experiments.master_inequality_scan(
            P, lam, args.n_list, args.trials, seed, threads=args.threads)
        keys = ["m", "r", "pencil", "n_list", "trials", "lam"]
    elif name == "gn-vs-g":
        lam = _lambda_from_args(args, P.m)
        result = experiments.gn_vs_g(P, lam, args.n, args.trials, seed,
                                     threads=args.threads)
        keys = ["m", "r", "pencil", "n", "trials", "lam"]
    elif name == "poincare":
        result = experiments.variance_poincare_check(
            P, args.test_fn, args.n, args.trials, seed,
            threads=args.threads, bump_width=args.bump_width)
        keys = ["m", "r", "pencil", "n", "trials", "test_fn", "bump_width"]
    elif name == "bias":
        trials = args.trials_list if args.trials_list else args.trials
        fit, result = experiments.bias_scan(
            P, args.test_fn, args.n_list, trials, seed,
            threads=args.threads, bump_width=args.bump_width)
        keys = ["m", "r", "pencil", "n_list", "trials", "trials_list",
                "test_fn", "bump_width"]
    elif name == "containment":
        result = experiments.spectrum_containment(
            P, args.n, args.eps, args.trials, seed, threads=args.threads)
        keys = ["m", "r", "pencil", "n", "eps", "trials"]
    elif name == "norm-convergence":
        poly = parse_polynomial(args.poly)
        result = experiments.norm_convergence(
            poly, args.n_list, args.trials, seed,
            threads=args.threads, fock_depth=args.depth)
        keys = ["poly", "n_list", "trials", "depth"]
    elif name == "expected-norm":
        result = experiments.expected_norm_bound(
            args.n_list, args.trials, seed, threads=args.threads)
        keys = ["n_list", "trials"]
    elif name == "power-norm":
        result = experiments.power_norm(args.p, args.n, args.trials, seed,
                                        threads=args.threads)
        keys = ["p", "n", "trials"]
    elif name == "unitary-pairs":
        result = experiments.unitary_pair_norm(
            args.pairs_r, args.n, args.trials, seed,
            sampler=args.sampler, threads=args.threads)
        keys = ["pairs_r", "n", "trials", "sampler"]
    elif name == "circular-bounds":
        r = args.stacked
        coeffs = [np.eye(r)[:, [i]] for i in range(r)]
        result = experiments.circular_sum_bounds(coeffs, args.n, args.trials,
                                                 seed, threads=args.threads)
        keys = ["stacked", "n", "trials"]
    else:  # pragma: no cover
        raise ValueError(f"unknown experiment {name!r}")

    args._resolved_config = _resolved(args, keys)
    args._resolved_config["experiment"] = name
    records = _collect_records(result)
    payload = {"records": records}
    if fit is not None:
        payload["fit"] = fit

    def csv_rows():
        rows = _records_csv(records)
        if fit is not None:
            rows.append(f"# slope={_r(fit.slope)} r_squared={_r(fit.r_squared)}")
        return rows

    _emit(args, csv_rows, payload)
    return 0 if all(rec.passed for rec in records) else 3


_NEGATIVE_VALUE_OPTS = ("--grid", "--lambda")


def _join_negative_values(argv):
    """Let ``--grid -3:3:600`` work although the value starts with a dash."""
    out = []
    k = 0
    while k < len(argv):
        tok = argv[k]
        if tok in _NEGATIVE_VALUE_OPTS and k + 1 < len(argv) and argv[k + 1].startswith("-"):
            out.append(f"{tok}={argv[k + 1]}")
            k += 2
        else:
            out.append(tok)
            k += 1
    return out


def run(argv=None):
    """Parse arguments, run the command, return the exit status."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    argv = _apply_config_file(parser, argv)
    argv = _join_negative_values(argv)
    args = parser.parse_args(argv)
    try:
        if args.command == "sample":
            return _cmd_sample(args)
        if args.command == "density":
            return _cmd_density(args)
        if args.command == "support":
            return _cmd_support(args)
        if args.command == "norm":
            return _cmd_norm(args)
        if args.command == "fock-moment":
            return _cmd_fock_moment(args)
        if args.command == "verify":
            return _cmd_verify(args)
        parser.error(f"unknown command {args.command!r}")
    except SolverFailure as exc:
        sys.stderr.write(f"solver failure: {exc}\n")
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"invalid configuration: {exc}\n")
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
