"""Command-line front end.

Subcommands: three-state-sweep, bmm-sweep, embeddings (decompose /
neighborhoods / synth), assignments (rrh). Output is a CSV table with
``# key=value`` metadata comment lines, or an equivalent JSON document;
both are byte-identical across runs with identical inputs and seeds.

Exit codes: 0 success, 2 usage error, 3 validation/ingestion error,
4 numerical error.
"""

from __future__ import annotations

import functools
import math
import sys

import click

from . import betamix, classic, datasets
from .categorical import rrh_decompose
from .core import renyi_heterogeneity
from .errors import NumericalError, ValidationError

_VALIDATION_EXIT = 3
_NUMERICAL_EXIT = 4


def _exit_codes(fn):
    """Map library exceptions onto the documented process exit codes."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValidationError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(_VALIDATION_EXIT)
        except NumericalError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(_NUMERICAL_EXIT)
    return wrapper


def _parse_floats(text: str, name: str, *, allow_inf: bool = False) -> list:
    vals = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            v = math.inf if tok in ("inf", "Inf", "INF") else float(tok)
        except ValueError:
            raise click.UsageError(f"--{name}: cannot parse {tok!r} as a number")
        if math.isnan(v) or (math.isinf(v) and not allow_inf):
            raise click.UsageError(f"--{name}: value {tok!r} out of range")
        vals.append(v)
    if not vals:
        raise click.UsageError(f"--{name}: at least one value required")
    return vals


def _emit(result: datasets.SweepResult, out, fmt: str) -> None:
    text = result.to_string(fmt)
    if out is None:
        click.echo(text, nl=False)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


_out_option = click.option("--out", type=click.Path(dir_okay=False), default=None,
                           help="Output file (default: stdout).")
_format_option = click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
                              default="csv", show_default=True, help="Output format.")


@click.group()
def main():
    """Categorical and representational heterogeneity toolkit."""


@main.command("three-state-sweep")
@click.option("--grid", default="0.1:3.0:0.1", show_default=True,
              help="Triangle heights h: comma list or start:stop:step.")
@click.option("--b", type=float, default=1.0, show_default=True,
              help="Triangle base length.")
@click.option("--kappa", default="1", show_default=True,
              help="Comma list of skewness values (inf allowed).")
@click.option("--q", default="1", show_default=True, help="Comma list of orders.")
@click.option("--u", default="1", show_default=True,
              help="Comma list of similarity scaling factors.")
@_out_option
@_format_option
@_exit_codes
def three_state_sweep(grid, b, kappa, q, u, out, fmt):
    """Sweep the 3-state triangle system over heights, skewness, q and u."""
    h_list = _parse_grid(grid, "grid")
    kappa_list = _parse_floats(kappa, "kappa", allow_inf=True)
    q_list = _parse_floats(q, "q", allow_inf=True)
    u_list = _parse_floats(u, "u")
    if b <= 0:
        raise click.UsageError("--b must be positive")

    rows = []
    for h in h_list:
        dist = classic.three_state_distance(h, b)
        scaled = classic.rescale_distance(dist)
        metric = classic.is_metric(dist)
        ultra = classic.is_ultrametric(dist)
        for kap in kappa_list:
            p = classic.three_state_probs(kap)
            qe = classic.neqrqe(scaled, p)
            for qv in q_list:
                rrh = renyi_heterogeneity(p, qv)
                fhn = (classic.functional_hill(dist, p, qv)
                       if not math.isinf(qv) else None)
                for uv in u_list:
                    sim = classic.similarity_from_distance(dist, uv)
                    lci = classic.leinster_cobbold(sim, p, qv)
                    rows.append((h, b, kap, qv, uv, qe, fhn, lci, rrh,
                                 metric, ultra))
    result = datasets.SweepResult(
        columns=("h", "b", "kappa", "q", "u", "qe", "fhn", "lci", "rrh",
                 "metric", "ultrametric"),
        rows=tuple(rows),
        metadata={"command": "three-state-sweep", "b": b,
                  "n_h": len(h_list), "n_kappa": len(kappa_list),
                  "n_q": len(q_list), "n_u": len(u_list)},
    )
    _emit(result, out, fmt)


def _parse_grid(text: str, name: str) -> list:
    """A comma list of floats, or start:stop:step inclusive of the stop
    point (within half a step)."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise click.UsageError(f"--{name}: range syntax is start:stop:step")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError:
            raise click.UsageError(f"--{name}: cannot parse range {text!r}")
        if step <= 0 or stop < start:
            raise click.UsageError(f"--{name}: need step > 0 and stop >= start")
        count = int(math.floor((stop - start) / step + 0.5)) + 1
        return [start + i * step for i in range(count)]
    return _parse_floats(text, name)


@main.command("bmm-sweep")
@click.option("--grid", default="0.5:0.95:0.05", show_default=True,
              help="theta1 grid (tau-mode=optimal) or tau grid (tau-mode=grid).")
@click.option("--theta1", type=float, default=0.5, show_default=True,
              help="Fixed theta1, used only with tau-mode=grid.")
@click.option("--theta2", type=float, default=5.0, show_default=True)
@click.option("--theta3", type=float, default=20.0, show_default=True)
@click.option("--q", default="1,2", show_default=True, help="Comma list of orders.")
@click.option("--u", type=float, default=1.0, show_default=True,
              help="Similarity scaling factor for the Leinster-Cobbold column.")
@click.option("--tau-mode", type=click.Choice(["optimal", "grid"]),
              default="optimal", show_default=True,
              help="Threshold choice: posterior-optimal or swept over --grid.")
@_out_option
@_format_option
@_exit_codes
def bmm_sweep(grid, theta1, theta2, theta3, q, u, tau_mode, out, fmt):
    """Sweep the two-component beta mixture; optimal mode emits the full
    index comparison per theta1, grid mode emits the RRH curve over tau."""
    q_list = _parse_floats(q, "q", allow_inf=True)
    grid_vals = _parse_grid(grid, "grid")
    if u < 0:
        raise click.UsageError("--u must be >= 0")

    rows = []
    if tau_mode == "optimal":
        for t1 in grid_vals:
            if not 0.0 < t1 < 1.0:
                raise click.UsageError(f"--grid: theta1 value {t1} outside (0, 1)")
            theta = betamix.BetaMixtureParams(t1, theta2, theta3)
            tau = betamix.optimal_threshold(theta)
            for qv in q_list:
                row = betamix.bmm_index_comparison(theta, qv, u)
                rows.append((t1, theta2, theta3, qv, u, tau,
                             row.rrh, row.fhn, row.neqrqe, row.lci))
        columns = ("theta1", "theta2", "theta3", "q", "u", "tau",
                   "rrh", "fhn", "neqrqe", "lci")
    else:
        theta = betamix.BetaMixtureParams(theta1, theta2, theta3)
        for tau in grid_vals:
            if not 0.0 <= tau <= 1.0:
                raise click.UsageError(f"--grid: tau value {tau} outside [0, 1]")
            for qv in q_list:
                rows.append((theta1, theta2, theta3, tau, qv,
                             betamix.bmm_between_rrh(theta, tau, qv)))
        columns = ("theta1", "theta2", "theta3", "tau", "q", "rrh")
    result = datasets.SweepResult(
        columns=columns, rows=tuple(rows),
        metadata={"command": "bmm-sweep", "tau_mode": tau_mode,
                  "theta2": theta2, "theta3": theta3, "u": u,
                  "n_grid": len(grid_vals), "n_q": len(q_list)},
    )
    _emit(result, out, fmt)


@main.group()
def embeddings():
    """Gaussian embedding ingestion, decomposition and generation."""


@embeddings.command("decompose")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--q", default="1,2", show_default=True, help="Comma list of orders.")
@click.option("--group-by/--whole", "group_by", default=True, show_default=True,
              help="Decompose per label group or over the whole dataset.")
@click.option("--in-format", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True)
@_out_option
@_format_option
@_exit_codes
def embeddings_decompose(file, q, group_by, in_format, out, fmt):
    """Pooled/within/between heterogeneity per label group."""
    q_list = _parse_floats(q, "q")
    with open(file) as fh:
        dataset = datasets.read_embeddings(fh, in_format)
    result = datasets.group_decomposition(dataset, q_list, group_by_label=group_by)
    _emit(result, out, fmt)


@embeddings.command("neighborhoods")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--k", type=int, default=49, show_default=True,
              help="Neighbors per record (neighborhood = record + k).")
@click.option("--q", type=float, default=1.0, show_default=True)
@click.option("--top", type=int, default=10, show_default=True,
              help="How many highest and lowest neighborhoods to report.")
@click.option("--in-format", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True)
@_out_option
@_format_option
@_exit_codes
def embeddings_neighborhoods(file, k, q, top, in_format, out, fmt):
    """Heterogeneity of each record's k-nearest-neighbor neighborhood."""
    with open(file) as fh:
        dataset = datasets.read_embeddings(fh, in_format)
    if not 1 <= k < len(dataset):
        raise click.UsageError(f"--k must satisfy 1 <= k < N={len(dataset)}")
    if top < 1:
        raise click.UsageError("--top must be >= 1")
    result = datasets.neighborhood_sweep(dataset, k, q, top)
    _emit(result, out, fmt)


@embeddings.command("synth")
@click.option("--labels", type=int, default=10, show_default=True)
@click.option("--per-label", type=int, default=500, show_default=True)
@click.option("--nz", type=int, default=2, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--separation", type=float, default=10.0, show_default=True,
              help="Scale of the cluster-center draws.")
@click.option("--spread", type=float, default=1.0, show_default=True,
              help="Within-cluster standard deviation of the means.")
@click.option("--log-var-min", type=float, default=-2.0, show_default=True)
@click.option("--log-var-max", type=float, default=-1.0, show_default=True)
@click.option("--contract-label", type=int, default=None,
              help="Label index whose cluster is contracted.")
@click.option("--contract-factor", type=float, default=10.0, show_default=True)
@_out_option
@_format_option
@_exit_codes
def embeddings_synth(labels, per_label, nz, seed, separation, spread,
                     log_var_min, log_var_max, contract_label, contract_factor,
                     out, fmt):
    """Generate a deterministic synthetic embedding dataset."""
    if labels < 1 or per_label < 1 or nz < 1:
        raise click.UsageError("--labels, --per-label and --nz must be >= 1")
    dataset = datasets.synth_embeddings(
        labels, per_label, nz, seed,
        separation=separation, spread=spread,
        log_var_range=(log_var_min, log_var_max),
        contract_label=contract_label, contract_factor=contract_factor,
    )
    if out is None:
        import io
        buf = io.StringIO()
        datasets.write_embeddings(dataset, buf, fmt)
        click.echo(buf.getvalue(), nl=False)
    else:
        with open(out, "w", newline="") as fh:
            datasets.write_embeddings(dataset, fh, fmt)


@main.group()
def assignments():
    """Soft category assignment tables."""


@assignments.command("rrh")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--q", default="1,2", show_default=True, help="Comma list of orders.")
@click.option("--in-format", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True)
@_out_option
@_format_option
@_exit_codes
def assignments_rrh(file, q, in_format, out, fmt):
    """Pooled/within/between heterogeneity of a soft-assignment table."""
    q_list = _parse_floats(q, "q", allow_inf=True)
    with open(file) as fh:
        ids, batch = datasets.read_assignments(fh, in_format)
    rows = []
    for qv in q_list:
        res = rrh_decompose(batch, qv)
        rows.append((qv, res.pooled, res.within, res.between, res.lande_warning))
    result = datasets.SweepResult(
        columns=("q", "pooled", "within", "between", "lande_warning"),
        rows=tuple(rows),
        metadata={"command": "assignments-rrh", "n_records": len(ids),
                  "n_categories": batch.n_categories},
    )
    _emit(result, out, fmt)


if __name__ == "__main__":
    main()
