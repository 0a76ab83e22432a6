"""Command-line front end: a thin client over the runners / the service.

Subcommands mirror the service endpoints (invariants, classify, construct,
verify, flow) plus `serve`.  Each one assembles a RunConfig from a JSON
config file and/or inline flags, executes it locally by default or against
a running service with --server, then writes the returned artifacts next to
the output stem.

Exit codes: 0 success; 1 verification failure; 2 usage/config error;
3 numerical failure (degenerate surface, blow-up, inadmissible curve, ...).
"""

from __future__ import annotations

import json
import pathlib
import sys

import click
import httpx
from pydantic import ValidationError

from . import __version__
from .config import RunConfig, RunResult
from .errors import GeometryError, ParamsOutOfRange, UnknownSurface
from .runners import execute

_FILE_SUFFIX = {
    "report.json": ".report.json",
    "mesh.obj": ".obj",
    "trajectory.csv": ".csv",
}


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        text = pathlib.Path(path).read_text()
        data = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise click.UsageError(f"config {path} must hold a JSON object")
    return data


def _build_config(command: str, config_path: str | None, overrides: dict) -> RunConfig:
    data = _load_config(config_path)
    file_command = data.pop("command", None)
    if file_command is not None and file_command != command:
        raise click.UsageError(
            f"config file says command={file_command!r} but subcommand is {command!r}"
        )
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    try:
        return RunConfig(command=command, **data)
    except ValidationError as exc:
        raise click.UsageError(f"invalid configuration:\n{exc}") from exc


def _execute(cfg: RunConfig, server: str | None) -> RunResult:
    if server is None:
        return execute(cfg)
    body = cfg.model_dump(exclude={"command"})
    resp = httpx.post(f"{server.rstrip('/')}/v1/{cfg.command}", json=body, timeout=600.0)
    if resp.status_code == 400:
        payload = resp.json().get("error", {})
        raise GeometryError(f"{payload.get('type')}: {payload.get('detail')}")
    if resp.status_code == 422:
        raise click.UsageError(f"service rejected the config: {resp.text}")
    resp.raise_for_status()
    return RunResult(**resp.json())


def _write_artifacts(result: RunResult, stem: str) -> list[str]:
    written = []
    for name, content in sorted(result.files.items()):
        suffix = _FILE_SUFFIX.get(name, "." + name.rsplit(".", 1)[-1])
        path = pathlib.Path(f"{stem}{suffix}")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content)
        written.append(str(path))
    return written


def _run(command: str, config_path, server, overrides: dict):
    cfg = _build_config(command, config_path, overrides)
    try:
        result = _execute(cfg, server)
    except (UnknownSurface, ParamsOutOfRange) as exc:
        raise click.UsageError(str(exc)) from exc
    except GeometryError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(3)
    for path in _write_artifacts(result, cfg.output.stem):
        click.echo(f"wrote {path}")
    if result.status == "verify_failed":
        click.echo("verification FAILED", err=True)
        sys.exit(1)
    click.echo(f"{command}: {result.status}")
    sys.exit(0)


def _surface_overrides(surface, param, family_config):
    if surface is None:
        return None
    params = {}
    for item in param:
        key, _, val = item.partition("=")
        try:
            params[key] = float(val)
        except ValueError:
            raise click.UsageError(f"bad --param {item!r}; expected name=value")
    return {"catalog": surface, "params": params}


config_opt = click.option("--config", "config_path", type=click.Path(), default=None,
                          help="JSON config file (RunConfig schema).")
server_opt = click.option("--server", default=None,
                          help="Run against a service URL instead of in-process.")
output_opt = click.option("--output", default=None, help="Output file stem.")
seed_opt = click.option("--seed", type=int, default=None)
grid_opt = click.option("--grid", default=None,
                        help="Comma-separated per-axis sample counts, e.g. 5,5,5.")
surface_opt = click.option("--surface", default=None, help="Catalog surface name.")
param_opt = click.option("--param", multiple=True,
                         help="Catalog parameter, name=value (repeatable).")


def _common_overrides(output, seed, grid, surface, param):
    overrides: dict = {}
    if output is not None:
        overrides["output"] = {"stem": output}
    if seed is not None:
        overrides["seed"] = seed
    if grid is not None:
        try:
            overrides["grid"] = [int(c) for c in grid.split(",")]
        except ValueError:
            raise click.UsageError(f"bad --grid {grid!r}")
    sf = _surface_overrides(surface, param, None)
    if sf is not None:
        overrides["surface"] = sf
    return overrides


@click.group()
@click.version_option(__version__)
def main():
    """Equiaffine geometry workbench."""


def _geometry_command(name, help_text):
    @main.command(name=name, help=help_text)
    @config_opt
    @server_opt
    @output_opt
    @seed_opt
    @grid_opt
    @surface_opt
    @param_opt
    @click.option("--samples", type=int, default=None,
                  help="Random sample count (verify).")
    def cmd(config_path, server, output, seed, grid, surface, param, samples):
        overrides = _common_overrides(output, seed, grid, surface, param)
        if samples is not None:
            overrides["samples"] = samples
        _run(name, config_path, server, overrides)

    return cmd


_geometry_command("invariants", "Blaschke data (h, xi, S, K, J) on a chart grid.")
_geometry_command("classify", "Pointwise SO(2)/Z3 symmetry labels plus a histogram.")
_geometry_command("construct", "Build a family, write admissibility report and OBJ mesh.")
_geometry_command("verify", "Integrability residuals (and round-trip checks for families).")


@main.command(help="Integrate the structure ODEs and check the first integrals.")
@config_opt
@server_opt
@output_opt
@click.option("--init", default=None,
              help="a,eta,mu1,mu2[,beta[,f]] initial scalars.")
@click.option("--lambda", "lambda_expr", default=None,
              help="lambda(t) as an expression of t.")
@click.option("--t-span", default=None, help="start,end")
@click.option("--step", type=float, default=None)
def flow(config_path, server, output, init, lambda_expr, t_span, step):
    overrides: dict = {}
    if output is not None:
        overrides["output"] = {"stem": output}
    flow_block: dict = {}
    if init is not None:
        parts = [float(x) for x in init.split(",")]
        if len(parts) < 4 or len(parts) > 6:
            raise click.UsageError("--init needs a,eta,mu1,mu2[,beta[,f]]")
        keys = ("a", "eta", "mu1", "mu2", "beta", "f")
        flow_block.update(dict(zip(keys, parts)))
    if lambda_expr is not None:
        flow_block["lambda_expr"] = lambda_expr
    if t_span is not None:
        try:
            lo, hi = (float(x) for x in t_span.split(","))
        except ValueError:
            raise click.UsageError("--t-span needs start,end")
        flow_block["t_span"] = (lo, hi)
    if step is not None:
        flow_block["step"] = step
    if flow_block:
        data = _load_config(config_path).get("flow", {})
        data.update(flow_block)
        overrides["flow"] = data
    _run("flow", config_path, server, overrides)


@main.command(help="Serve the workbench over HTTP (FastAPI/uvicorn).")
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
