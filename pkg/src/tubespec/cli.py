"""Command-line front end.

Every subcommand reads an optional TOML config (flags override file values)
and emits deterministic tables: '.' decimal point, 17 significant digits,
and header comments carrying the package version and the config hash, so
identical configs produce byte-identical output.

Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure.
"""

from __future__ import annotations

import math
import sys

import click

from . import __version__
from .assembly import ModelManifold, overlap_coordinate, scaling_fit, theorem1_bounds, theorem2_sequence
from .config import ConfigError, RunConfig, config_hash, load_config
from .covering import CoverSpec, OpenPiece, Overlap
from .covering import evaluate as evaluate_cover
from .spectra import (
    collar_function_problem,
    t_form_problem,
    theta_form_problem,
    tube_mu1,
)
from .sturm import EigensolverError, convergence_study
from .tube import FillingSlope, Tube

EXIT_IO = 1
EXIT_NUMERICAL = 3


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _table(cfg: RunConfig, columns, rows, trailer=()) -> str:
    import numpy
    import scipy

    sep = "\t" if cfg.format == "tsv" else ","
    lines = [
        f"# tubespec {__version__} numpy={numpy.__version__} scipy={scipy.__version__}",
        f"# config sha256={config_hash(cfg)}",
        sep.join(columns),
    ]
    lines.extend(sep.join(_fmt(v) for v in row) for row in rows)
    lines.extend(trailer)
    return "\n".join(lines) + "\n"


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out is None:
        click.echo(text, nl=False)
        return
    try:
        with open(cfg.out, "w", newline="\n") as f:
            f.write(text)
    except OSError as e:
        click.echo(f"cannot write {cfg.out}: {e}", err=True)
        sys.exit(EXIT_IO)


def _load(config_path, **overrides) -> RunConfig:
    try:
        return load_config(config_path, overrides)
    except ConfigError as e:
        raise click.UsageError(str(e)) from None


def _common(f):
    for opt in reversed(
        (
            click.option("--config", "config_path", default=None, help="TOML config file."),
            click.option("--out", default=None, help="Output path (default stdout)."),
            click.option(
                "--format", "format_", type=click.Choice(["csv", "tsv"]), default=None
            ),
            click.option("--mesh-n", type=int, default=None, help="Element count."),
            click.option("--ct-exponent", type=int, default=None, help="1 or 2."),
            click.option("--growth-exponent", type=float, default=None),
            click.option(
                "--constant-weights/--no-constant-weights",
                default=None,
                help="Swap all weights for 1 (closed-form debug mode).",
            ),
        )
    ):
        f = opt(f)
    return f


@click.group()
@click.version_option(version=__version__, prog_name="tubespec")
def main() -> None:
    """Desk-scale spectral lower bounds: tube eigenproblems, covering
    bounds and their diameter scaling."""


@main.command("tube-spectrum")
@_common
def cmd_tube_spectrum(config_path, out, format_, mesh_n, ct_exponent, growth_exponent, constant_weights):
    """First tube eigenvalues over the configured radius sweep."""
    cfg = _load(
        config_path,
        out=out,
        format=format_,
        mesh_n=mesh_n,
        ct_exponent=ct_exponent,
        growth_exponent=growth_exponent,
        constant_weights=constant_weights,
    )
    mesh = cfg.mesh()
    rows = []
    try:
        for R in cfg.radii:
            tube = Tube(R=R, l=cfg.core_length, slope=FillingSlope(*cfg.slope))
            ts = tube_mu1(tube, mesh, cfg.constant_weights)
            rows.append(
                (R, ts.lambda_t, ts.lambda_theta, ts.mu1, ts.mu1 * R * R, ts.invariance_valid)
            )
    except EigensolverError as e:
        click.echo(f"numerical failure: {e}", err=True)
        sys.exit(EXIT_NUMERICAL)
    _emit(
        cfg,
        _table(
            cfg,
            ("R", "lambda_t", "lambda_theta", "mu1", "mu1_r2", "invariance_valid"),
            rows,
        ),
    )


@main.command("covering-bound")
@click.option("--config", "config_path", default=None, help="TOML config file.")
@click.option("--out", default=None, help="Optional CSV path.")
@click.option("--format", "format_", type=click.Choice(["csv", "tsv"]), default=None)
@click.option("--ct-exponent", type=int, default=None, help="1 or 2.")
@click.option(
    "--mu-open",
    "mu_opens",
    multiple=True,
    help="Open piece as id=value; repeat per open.",
)
@click.option(
    "--mu-overlap",
    "mu_overlaps",
    multiple=True,
    help="Overlap as i,j=value; repeat per overlap.",
)
@click.option("--c-rho", type=float, default=0.0, show_default=True)
@click.option("--ct", type=float, default=0.0, show_default=True)
@click.option("--k-offset", type=int, default=0, show_default=True)
def cmd_covering_bound(
    config_path, out, format_, ct_exponent, mu_opens, mu_overlaps, c_rho, ct, k_offset
):
    """Evaluate the covering lower bound for an explicit cover."""
    cfg = _load(config_path, out=out, format=format_, ct_exponent=ct_exponent)
    if not mu_opens:
        raise click.UsageError("at least one --mu-open id=value is required")

    def parse(spec: str, what: str) -> tuple[str, float]:
        name, sep, value = spec.partition("=")
        if not sep or not name:
            raise click.UsageError(f"malformed {what} {spec!r}; expected name=value")
        try:
            return name, float(value)
        except ValueError:
            raise click.UsageError(f"{what} {spec!r}: {value!r} is not a number") from None

    try:
        opens = tuple(OpenPiece(*parse(s, "--mu-open")) for s in mu_opens)
        overlaps = []
        for s in mu_overlaps:
            pair, mu = parse(s, "--mu-overlap")
            i, sep, j = pair.partition(",")
            if not sep or not i or not j:
                raise click.UsageError(
                    f"malformed --mu-overlap {s!r}; expected i,j=value"
                )
            overlaps.append(Overlap(i, j, mu))
        cover = CoverSpec(
            opens=opens,
            overlaps=tuple(overlaps),
            c_rho=c_rho,
            C_T=ct,
            k_offset=k_offset,
            ct_exponent=cfg.ct_exponent,
        )
    except ValueError as e:
        raise click.UsageError(str(e)) from None
    result = evaluate_cover(cover)
    click.echo(f"bound = {_fmt(result.bound)}")
    click.echo(f"rank  = {result.rank}")
    for oid, term in result.terms:
        click.echo(f"term[{oid}] = {_fmt(term)}")
    if cfg.out is not None:
        trailer = (
            f"# bound={_fmt(result.bound)}",
            f"# rank={result.rank}",
        )
        _emit(cfg, _table(cfg, ("open", "mu", "term"), [
            (o.id, o.mu, dict(result.terms)[o.id]) for o in cover.opens
        ], trailer))


@main.command("theorem1")
@_common
def cmd_theorem1(config_path, out, format_, mesh_n, ct_exponent, growth_exponent, constant_weights):
    """General diameter bounds over the radius sweep, with scaling fits."""
    cfg = _load(
        config_path,
        out=out,
        format=format_,
        mesh_n=mesh_n,
        ct_exponent=ct_exponent,
        growth_exponent=growth_exponent,
        constant_weights=constant_weights,
    )
    mesh = cfg.mesh()
    reports = []
    rows = []
    try:
        for R in cfg.radii:
            rep = theorem1_bounds(
                cfg.manifold(R),
                mesh=mesh,
                ct_exponent=cfg.ct_exponent,
                growth_exponent=cfg.growth_exponent,
                constant_weights=cfg.constant_weights,
            )
            reports.append(rep)
            k = rep.constants["k"]
            norm_d = math.exp(math.log(rep.mu1_lb) + 4.0 * math.log(rep.d) + 2.0 * k * rep.d)
            r_max = rep.constants["R_max"]
            norm_r = math.exp(
                math.log(rep.mu1_lb) + 4.0 * math.log(r_max) + 2.0 * k * r_max
            )
            rows.append(
                (
                    R,
                    rep.d,
                    rep.mu1_lb,
                    rep.mu_k1_lb,
                    rep.mu_k1_lb * rep.d**2,
                    norm_d,
                    norm_r,
                )
            )
    except EigensolverError as e:
        click.echo(f"numerical failure: {e}", err=True)
        sys.exit(EXIT_NUMERICAL)
    trailer = []
    try:
        fit_k1 = scaling_fit(reports, "mu_k1")
        fit_1 = scaling_fit(reports, "mu1")
        trailer.append(
            f"# fit mu_k1 loglog: slope={_fmt(fit_k1.slope)} "
            f"intercept={_fmt(fit_k1.intercept)} rms={_fmt(fit_k1.residual_rms)}"
        )
        trailer.append(
            f"# fit mu1 semilog(d^4-normalized): slope={_fmt(fit_1.slope)} "
            f"intercept={_fmt(fit_1.intercept)} rms={_fmt(fit_1.residual_rms)}"
        )
    except ValueError as e:
        trailer.append(f"# fit skipped: {e}")
    _emit(
        cfg,
        _table(
            cfg,
            ("R", "d", "mu1_lb", "mu_k1_lb", "mu_k1_d2", "mu1_d4_e2kd", "mu1_r4_e2kR"),
            rows,
            trailer,
        ),
    )


@main.command("theorem2")
@_common
def cmd_theorem2(config_path, out, format_, mesh_n, ct_exponent, growth_exponent, constant_weights):
    """Filling-slope sequence (1, i) with the uniform section cap."""
    cfg = _load(
        config_path,
        out=out,
        format=format_,
        mesh_n=mesh_n,
        ct_exponent=ct_exponent,
        growth_exponent=growth_exponent,
        constant_weights=constant_weights,
    )
    template = ModelManifold(
        cfg.thick_part(), (Tube(R=1.0, l=cfg.core_length, slope=FillingSlope(1, 1)),)
    )
    try:
        fillings = theorem2_sequence(
            template,
            range(cfg.i_min, cfg.i_max + 1),
            mesh=cfg.mesh(),
            ct_exponent=cfg.ct_exponent,
            growth_exponent=cfg.growth_exponent,
            min_radius=cfg.min_filling_radius,
            constant_weights=cfg.constant_weights,
        )
    except EigensolverError as e:
        click.echo(f"numerical failure: {e}", err=True)
        sys.exit(EXIT_NUMERICAL)
    rows = [
        (row.i, row.R, row.d, row.regime_ok, row.mu1_lb, row.normalized)
        for row in fillings
    ]
    _emit(
        cfg,
        _table(cfg, ("i", "R_i", "d_i", "regime_ok", "mu1_lb", "mu1_d2"), rows),
    )


@main.command("convergence")
@_common
@click.option(
    "--problem",
    "which",
    type=click.Choice(["t", "theta", "collar", "all"]),
    default="all",
    show_default=True,
)
def cmd_convergence(
    config_path, out, format_, mesh_n, ct_exponent, growth_exponent, constant_weights, which
):
    """Mesh-doubling convergence study of the reduced problems."""
    cfg = _load(
        config_path,
        out=out,
        format=format_,
        mesh_n=mesh_n,
        ct_exponent=ct_exponent,
        growth_exponent=growth_exponent,
        constant_weights=constant_weights,
    )
    if cfg.mesh_n % 4 != 0 or cfg.mesh_n < 32:
        raise click.UsageError(
            f"solver.mesh_n must be a multiple of 4 and >= 32 for a doubling "
            f"study, got {cfg.mesh_n}"
        )
    ns = (cfg.mesh_n // 4, cfg.mesh_n // 2, cfg.mesh_n)
    mesh = cfg.mesh()
    R = cfg.radii[0]
    thick = cfg.thick_part()
    problems = []
    if which in ("t", "all"):
        problems.append(("t", t_form_problem(R, mesh, cfg.constant_weights), True))
    if which in ("theta", "all"):
        problems.append(("theta", theta_form_problem(R, mesh, cfg.constant_weights), False))
    if which in ("collar", "all"):
        R_a = overlap_coordinate(R, thick)
        problems.append(
            ("collar", collar_function_problem(R_a, R, mesh, cfg.constant_weights), True)
        )
    rows = []
    try:
        for name, prob, drop in problems:
            study = convergence_study(prob, ns, drop_kernel=drop)
            rows.append(
                (
                    name,
                    R,
                    ns[0],
                    ns[-1],
                    study.estimated_order if study.estimated_order is not None else math.nan,
                    study.extrapolated if study.extrapolated is not None else math.nan,
                    study.conclusive,
                )
            )
    except EigensolverError as e:
        click.echo(f"numerical failure: {e}", err=True)
        sys.exit(EXIT_NUMERICAL)
    _emit(
        cfg,
        _table(
            cfg,
            ("problem", "R", "n_min", "n_max", "estimated_order", "extrapolated", "conclusive"),
            rows,
        ),
    )


if __name__ == "__main__":
    main()
