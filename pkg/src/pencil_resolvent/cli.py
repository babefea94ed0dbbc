"""Command-line interface: ``pencil-resolvent <command> ...``.

Exit codes
----------
0  every check passed
1  at least one check failed
2  usage error or malformed document
3  invalid family parameters
4  subspaces not complementary, or pencil not invertible on them
5  singular quadrature node or singular shift
6  sample outside the annulus
7  any other package error
"""
from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import click
import numpy as np

from . import errors
from .chains import (ascent_descent, chain_family, chain_rates, extend_chain,
                     verify_generating_inclusion)
from .linalg_core import Tolerances, contains, image, range_space
from .pencil import Annulus, OperatorPencil
from .pipeline import PipelineConfig, default_samples, resolve_annulus, run_pipeline
from .projections import separated_operators, verify_projection_identities
from .report import Check, Report
from .resolvent import (LaurentExpansion, OracleConfig, basic_checks, contour_oracle,
                        laurent_coeffs, terms_for, validate_resolvent)
from .zoo import FAMILIES, REGIONS, FamilySpec, analytic_reference, build

EXIT_CODES = [
    (errors.ParseError, 2),
    (errors.InvalidParams, 3),
    (errors.NotComplementary, 4),
    (errors.NotInvertibleOnSubspace, 4),
    (errors.SingularNode, 5),
    (errors.SingularShift, 5),
    (errors.OutsideAnnulus, 6),
    (errors.PencilError, 7),
]

GOLDEN_TOL = 1e-8


# ---------------------------------------------------------------- documents

@dataclass
class PencilDocument:
    """A parsed pencil document.

    Exactly one of ``matrices`` (``a0``, ``a1``) and ``family`` is set.
    """

    matrices: tuple[np.ndarray, np.ndarray] | None = None
    family: FamilySpec | None = None
    tolerances: dict = field(default_factory=dict)
    annulus_hint: Annulus | None = None
    samples: list[complex] | None = None

    def pencil(self) -> OperatorPencil:
        if self.family is not None:
            return build(self.family)
        return OperatorPencil(*self.matrices)


def _complex(value, where: str) -> complex:
    if (not isinstance(value, list) or len(value) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        raise errors.ParseError(f"{where}: complex scalars must be [re, im] pairs, got {value!r}")
    return complex(float(value[0]), float(value[1]))


def _matrix(value, where: str) -> np.ndarray:
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise errors.ParseError(f"{where}: expected a nonempty list of rows")
    width = len(value[0])
    if any(len(r) != width for r in value):
        raise errors.ParseError(f"{where}: rows have different lengths")
    return np.array([[_complex(x, f"{where}[{i}][{j}]") for j, x in enumerate(row)]
                     for i, row in enumerate(value)], dtype=complex)


def _radius(value, where: str) -> float:
    if value is None or value == "inf":
        return math.inf
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise errors.ParseError(f"{where}: expected a number, null or \"inf\"")
    return float(value)


def parse_document(text: str) -> PencilDocument:
    """Parse the JSON pencil document.

    Top-level keys: ``pencil`` (``{"a0": ..., "a1": ...}`` or
    ``{"family": ..., "params": ..., "truncation": ...}``), and the optional
    ``tolerances``, ``annulus_hint`` (``{"s": ..., "r": ...}``) and
    ``samples``. Matrix entries and samples are ``[re, im]`` pairs.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise errors.ParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise errors.ParseError("document must be a JSON object")
    unknown = set(data) - {"pencil", "tolerances", "annulus_hint", "samples"}
    if unknown:
        raise errors.ParseError(f"unknown top-level keys: {sorted(unknown)}")
    if "pencil" not in data or not isinstance(data["pencil"], dict):
        raise errors.ParseError("missing 'pencil' object")
    doc = PencilDocument()
    pen = data["pencil"]
    if "family" in pen:
        params = pen.get("params", {})
        if not isinstance(params, dict):
            raise errors.ParseError("pencil.params must be an object")
        params = dict(params)
        if "beta" in params:
            params["beta"] = _complex(params["beta"], "pencil.params.beta")
        trunc = pen.get("truncation")
        if trunc is not None and (isinstance(trunc, bool) or not isinstance(trunc, int)):
            raise errors.ParseError("pencil.truncation must be an integer")
        doc.family = FamilySpec(pen["family"], params, trunc)
    elif "a0" in pen and "a1" in pen:
        doc.matrices = (_matrix(pen["a0"], "pencil.a0"), _matrix(pen["a1"], "pencil.a1"))
        if doc.matrices[0].shape != doc.matrices[1].shape or \
                doc.matrices[0].shape[0] != doc.matrices[0].shape[1]:
            raise errors.ParseError("a0 and a1 must be square and of equal size")
    else:
        raise errors.ParseError("pencil needs either a0 and a1, or family")
    tols = data.get("tolerances", {})
    if not isinstance(tols, dict) or set(tols) - {"rank_rel", "residual_abs", "angle_tol"}:
        raise errors.ParseError("tolerances must hold only rank_rel, residual_abs, angle_tol")
    doc.tolerances = {k: float(v) for k, v in tols.items()}
    hint = data.get("annulus_hint")
    if hint is not None:
        if not isinstance(hint, dict):
            raise errors.ParseError("annulus_hint must be an object with s and r")
        try:
            doc.annulus_hint = Annulus(_radius(hint.get("s", 0.0), "annulus_hint.s"),
                                       _radius(hint.get("r"), "annulus_hint.r"))
        except ValueError as exc:
            raise errors.ParseError(f"annulus_hint: {exc}") from exc
    samples = data.get("samples")
    if samples is not None:
        if not isinstance(samples, list):
            raise errors.ParseError("samples must be a list of [re, im] pairs")
        doc.samples = [_complex(z, f"samples[{i}]") for i, z in enumerate(samples)]
    return doc


def dump_document(p: OperatorPencil, **extra) -> str:
    """Serialize an inline pencil document that parses back bit-exactly."""
    def pairs(m):
        return [[[float(x.real), float(x.imag)] for x in row] for row in m]

    doc = {"pencil": {"a0": pairs(p.a0), "a1": pairs(p.a1)}}
    doc.update(extra)
    return json.dumps(doc)


# ---------------------------------------------------------------- CSV

def emit_growth_csv(exp: LaurentExpansion, path=None) -> str:
    """Write ``j, ||R_j||_F, ||R_j||^(1/|j|)`` rows; the root is blank at ``j = 0``.

    Numbers use 17 significant digits and lines end with LF. Returns the
    text and also writes it when ``path`` is given.
    """
    table = getattr(exp, "coeffs", exp)
    if not table:
        raise ValueError("expansion is empty")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["j", "norm_fro", "root_norm"])
    for j in sorted(table):
        norm = float(np.linalg.norm(table[j]))
        root = "" if j == 0 else "%.17g" % norm ** (1.0 / abs(j))
        writer.writerow([j, "%.17g" % norm, root])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="", encoding="ascii") as fh:
            fh.write(text)
    return text


# ---------------------------------------------------------------- commands

def _summary_dims(res) -> dict:
    dec = res.decomposition
    return {"n": res.pencil.n, "dim_Xs": dec.xs.dim, "dim_Xr": dec.xr.dim,
            "dim_Ys": dec.ys.dim, "dim_Yr": dec.yr.dim, "interior_block": res.block}


def _scaled(p: OperatorPencil, tol: Tolerances) -> float:
    return tol.residual_abs * max(1.0, float(np.linalg.norm(p.a0)), float(np.linalg.norm(p.a1)))


def cmd_analyze(p, annulus, cfg, doc, region) -> Report:
    rep = Report("analyze")
    ad = ascent_descent(p, cfg.probe_limit, cfg.tol, margin=cfg.margin)
    dims = {}
    checks = []
    for kind in ("S", "T", "U", "V", "U_rg", "V_rg"):
        fam = chain_family(p, kind, cfg.probe_limit, cfg.tol)
        dims[kind] = fam.dims()
        checks.append(Check(f"{kind} chain monotone", 0.0 if fam.is_monotone(cfg.tol) else 1.0, 0.0))
    rep.sections["ascent_descent"] = {k: v for k, v in ad.as_dict().items() if k != "evidence"}
    rep.sections["evidence"] = ad.evidence
    rep.sections["chain_dims"] = dims
    if ad.ascent is not None and ad.descent is not None:
        checks.append(Check("finite ascent equals descent", abs(ad.ascent - ad.descent), 0))
    rep.checks = checks
    return rep


def cmd_chains(p, annulus, cfg, doc, region) -> Report:
    from .chains import generating_subspace

    rep = Report("chains")
    tol = cfg.tol
    out = {}
    checks = []
    for kind in ("singular", "regular"):
        sub = generating_subspace(p, kind, cfg.depth, tol=tol, annulus=annulus)
        chain_annulus = annulus if kind == "singular" else annulus.flipped()
        rates = []
        for v in sub.basis.T:
            rec = extend_chain(p, kind, v, cfg.depth, tol)
            rates.append(rec.rate)
            worst = max((r / max(nv, 1.0) for r, nv in zip(rec.residuals, rec.norms)),
                        default=0.0)
            checks.append(Check(f"{kind} chain recurrence", worst, tol.residual_abs))
        out[kind] = {
            "dim": sub.dim,
            "rate_threshold": chain_annulus.rate_threshold(),
            "measured_rates": rates,
            "chain_operator_moduli": chain_rates(p, kind, tol).tolist(),
            "basis": sub.basis,
        }
    dim_sum = out["singular"]["dim"] + out["regular"]["dim"]
    checks.append(Check("dim Xs + dim Xr - n", abs(dim_sum - p.n), 0))
    rep.sections["generating_subspaces"] = out
    rep.checks = checks
    return rep


def cmd_project(p, annulus, cfg, doc, region) -> Report:
    rep = Report("project")
    res = run_pipeline(p, annulus, cfg)
    dec = res.decomposition
    bound = _scaled(p, cfg.tol)
    rep.sections["summary"] = _summary_dims(res)
    rep.sections["projections"] = {"P": dec.p, "Pc": dec.pc, "Q": dec.q, "Qc": dec.qc}
    rep.checks = [Check(k, v, bound) for k, v in verify_projection_identities(p, dec).items()]
    for name, sub, proj in (("range(P) = Xs", dec.xs, dec.p), ("range(Pc) = Xr", dec.xr, dec.pc),
                            ("range(Q) = Ys", dec.ys, dec.q), ("range(Qc) = Yr", dec.yr, dec.qc)):
        _, angle = verify_generating_inclusion(sub, proj, cfg.tol)
        rep.checks.append(Check(name, angle, cfg.tol.angle_tol))
    rng_p = range_space(dec.p, cfg.tol)
    usg = chain_family(p, "U_sg", cfg.probe_limit, cfg.tol).spaces[-1]
    rep.checks.append(Check("U_sg inside range(P)",
                            0.0 if contains(rng_p, usg, cfg.tol) else 1.0, 0.0))
    return rep


def cmd_solve(p, annulus, cfg, doc, region) -> Report:
    rep = Report("solve")
    res = run_pipeline(p, annulus, cfg)
    rep.sections["summary"] = _summary_dims(res)
    rep.sections["basic_solution"] = {"R_-1": res.basic.r_m1, "R_0": res.basic.r_0}
    bound = _scaled(p, cfg.tol)
    rep.checks = [Check(c.name, c.value, bound) for c in basic_checks(p, res.basic,
                                                                       res.decomposition, cfg.tol)]
    rep.checks += [Check(k, v, bound) for k, v in
                   separated_operators(p, res.decomposition, res.basic, cfg.tol).items()]
    return rep


def cmd_laurent(p, annulus, cfg, doc, region, out=None) -> Report:
    rep = Report("laurent")
    res = run_pipeline(p, annulus, cfg)
    exp = res.expansion
    rep.sections["summary"] = _summary_dims(res)
    rep.sections["rates"] = {"inner_rate (estimates s)": exp.inner_rate,
                             "outer_rate (estimates 1/r)": exp.outer_rate}
    norms = exp.norms()
    rep.sections["coefficient_norms"] = {str(j): v for j, v in norms.items()}
    text = emit_growth_csv(exp, out)
    if out is None:
        rep.sections["growth_csv"] = text.splitlines()
    else:
        rep.sections["growth_csv"] = str(out)
    from .pencil import fundamental_residuals

    fund = fundamental_residuals(p, exp, block=res.block)
    rep.checks = [Check(f"fundamental residual j={j}", max(l, r), cfg.tol.residual_abs)
                  for j, l, r in fund.rows()]
    return rep


def cmd_validate(p, annulus, cfg, doc, region) -> Report:
    rep = Report("validate")
    samples = doc.samples if doc is not None and doc.samples else default_samples(annulus)
    outside = [z for z in samples if not annulus.contains(z)]
    if outside:
        raise errors.OutsideAnnulus(f"samples {outside} lie outside ({annulus.s}, {annulus.r})")
    res = run_pipeline(p, annulus, cfg)
    # enough terms that the Laurent tail is negligible at every sample
    rates = (res.expansion.inner_rate, res.expansion.outer_rate)
    need = [terms_for(rates, z) for z in samples]
    k_max = max(cfg.k_max, *(k for k, _ in need))
    l_max = max(cfg.l_max, *(l for _, l in need))
    exp = laurent_coeffs(res.basic, p, k_max, l_max)
    rep.sections["summary"] = {**_summary_dims(res), "terms_used": [-k_max, l_max]}
    rep.sections["samples"] = samples
    rep.checks = validate_resolvent(p, res.basic, exp, samples, cfg.tol, block=res.block)
    return rep


def cmd_reproduce(p, annulus, cfg, doc, region) -> Report:
    rep = Report("reproduce")
    if p.provenance is None:
        raise errors.NoReference("reproduce needs a named family")
    ref = analytic_reference(p.provenance, region)
    res = run_pipeline(p, ref.annulus, cfg)
    k = res.block
    got = {"P": res.decomposition.p, "Pc": res.decomposition.pc, "Q": res.decomposition.q,
           "Qc": res.decomposition.qc, "R_-1": res.basic.r_m1, "R_0": res.basic.r_0}
    devs = {}
    for name, want in ref.matrices.items():
        devs[name] = float(np.abs(got[name][:k, :k] - want[:k, :k]).max())
        rep.checks.append(Check(f"golden {name}", devs[name], GOLDEN_TOL))
    if ref.coefficient is not None:
        for j in range(-cfg.k_max, cfg.l_max + 1):
            d = float(np.abs(res.coeffs[j][:k, :k] - ref.coefficient(j)[:k, :k]).max())
            rep.checks.append(Check(f"golden R_{j}", d, GOLDEN_TOL))
    if ref.pole_order is not None:
        ad = ascent_descent(p, cfg.probe_limit, cfg.tol, margin=cfg.margin)
        rep.sections["ascent_descent"] = {"ascent": ad.describe(ad.ascent),
                                          "descent": ad.describe(ad.descent),
                                          "pole_order": ref.pole_order}
        rep.checks.append(Check("ascent - pole order", abs((ad.ascent or -99) - ref.pole_order), 0))
        rep.checks.append(Check("descent - pole order", abs((ad.descent or -99) - ref.pole_order), 0))
    rep.sections["summary"] = {**_summary_dims(res), "region": region,
                               "max_golden_deviation": max(devs.values())}
    return rep


COMMANDS = {
    "analyze": cmd_analyze, "chains": cmd_chains, "project": cmd_project,
    "solve": cmd_solve, "laurent": cmd_laurent, "validate": cmd_validate,
    "reproduce": cmd_reproduce,
}


# ---------------------------------------------------------------- click glue

def _parse_value(text: str):
    for conv in (int, float, complex):
        try:
            return conv(text)
        except ValueError:
            pass
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    return text


def _parse_params(items) -> dict:
    params = {}
    for item in items:
        for part in item.split(","):
            if not part.strip():
                continue
            if "=" not in part:
                raise click.BadParameter(f"expected key=value, got {part!r}", param_hint="--params")
            key, value = part.split("=", 1)
            params[key.strip()] = _parse_value(value.strip())
    return params


def common_options(fn):
    options = [
        click.option("--file", "file_", type=click.Path(exists=True, dir_okay=False),
                     help="Pencil document (JSON)."),
        click.option("--family", type=click.Choice(FAMILIES), help="Named pencil family."),
        click.option("--params", multiple=True, help="Family parameters as key=value[,key=value]."),
        click.option("--m", "m", type=int, help="Block size for jordan_block."),
        click.option("--trunc", type=int, help="Truncation order N for example1/2/3."),
        click.option("--region", type=click.Choice(REGIONS), default="near-zero",
                     show_default=True, help="Which annulus to expand on."),
        click.option("--depth", type=int, default=24, show_default=True,
                     help="Chain probe depth."),
        click.option("--probe-limit", type=int, default=10, show_default=True,
                     help="Largest m probed for ascent and descent."),
        click.option("--k-max", type=int, default=20, show_default=True,
                     help="Number of negative-index coefficients."),
        click.option("--l-max", type=int, default=20, show_default=True,
                     help="Largest nonnegative coefficient index."),
        click.option("--out", type=click.Path(dir_okay=False), help="Output path."),
        click.option("--json", "as_json", is_flag=True, help="Emit JSON instead of text."),
    ]
    for opt in reversed(options):
        fn = opt(fn)
    return fn


def execute(command: str, file_=None, family=None, params=(), m=None, trunc=None,
            region="near-zero", depth=24, probe_limit=10, k_max=20, l_max=20,
            out=None, as_json=False, echo=click.echo) -> int:
    """Run one command and return its exit code."""
    try:
        doc = None
        if file_ and family:
            raise errors.ParseError("give either --file or --family, not both")
        if file_:
            doc = parse_document(Path(file_).read_text())
            p = doc.pencil()
        elif family:
            prm = _parse_params(params)
            if m is not None:
                prm["m"] = m
            p = build(FamilySpec(family, prm, trunc))
        else:
            raise errors.ParseError("one of --file or --family is required")
        tol = Tolerances(**(doc.tolerances if doc else {}))
        cfg = PipelineConfig(tol=tol, depth=depth, probe_limit=probe_limit,
                             k_max=k_max, l_max=l_max)
        annulus = resolve_annulus(p, region, doc.annulus_hint if doc else None)
        if command == "laurent":
            rep = cmd_laurent(p, annulus, cfg, doc, region, out)
        else:
            rep = COMMANDS[command](p, annulus, cfg, doc, region)
        rep.settings = {
            "source": p.provenance.as_dict() if p.provenance is not None else "inline",
            "region": region,
            "annulus": annulus.as_list(),
            "rate_threshold_singular": annulus.rate_threshold(),
            "rate_threshold_regular": annulus.flipped().rate_threshold(),
            "contour": {"radius": annulus.contour_radius(), "nodes": cfg.nodes},
            **cfg.as_dict(),
        }
        text = rep.to_json() if as_json else rep.to_text()
        if out and command != "laurent":
            Path(out).write_text(text + "\n")
        echo(text)
        return 0 if rep.passed else 1
    except errors.PencilError as exc:
        for cls, code in EXIT_CODES:
            if isinstance(exc, cls):
                echo(f"error: {type(exc).__name__}: {exc}", err=True)
                return code
        raise
    except ValueError as exc:
        echo(f"error: {exc}", err=True)
        return 2


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def cli():
    """Laurent expansions and spectral projections of linear pencils A0 + z A1."""


def _make_command(name: str, help_text: str):
    @cli.command(name=name, help=help_text)
    @common_options
    def command(**kwargs):
        sys.exit(execute(name, **kwargs))

    return command


for _name, _help in (
    ("analyze", "Ascent, descent and chain subspace dimensions."),
    ("chains", "Generating subspaces of singular and regular chains with growth rates."),
    ("project", "Spectral projections and their structural identities."),
    ("solve", "Basic solution {R_-1, R_0} and its residuals."),
    ("laurent", "Laurent coefficients, growth rates and growth CSV."),
    ("validate", "Resolvent checks at sample points."),
    ("reproduce", "Compare against the closed-form reference of a family."),
):
    _make_command(_name, _help)


def main(argv=None):
    cli.main(args=argv, prog_name="pencil-resolvent")


if __name__ == "__main__":
    main()
