"""Thin command-line client of the laboratory service.

Every command speaks HTTP to the service API: against a remote server
when ``--server`` is given, otherwise against an in-process instance of
the application mounted on an ASGI transport.  ``scatterlab serve``
starts the service itself.

Suite commands follow the pattern

    scatterlab <suite> [--config file.json] [--seed K] [--out DIR]

with the suite names from ``scatterlab suites``; the spelled-out
aliases (``partition verify``, ``orbit run``, ``invariance run``,
``phase build|verify``, ``quantum evolve``, ``waveop probe``,
``channel profile``) reach the same endpoints.  Exit codes: 0 pass,
1 threshold violation, 2 configuration error.
"""

from __future__ import annotations

import asyncio
import json
import sys
from pathlib import Path

import click
import httpx

SUITE_NAMES = [
    "partition",
    "orbits",
    "invariance",
    "eikonal",
    "modifier",
    "waveop",
    "channels",
]

_SUITE_ENDPOINT = {name: f"/suites/{name}" for name in SUITE_NAMES}


def _call(server: str | None, method: str, path: str, payload: dict | None = None) -> tuple[int, dict]:
    async def go() -> tuple[int, dict]:
        if server:
            transport = None
            base = server.rstrip("/")
        else:
            from .service import app

            transport = httpx.ASGITransport(app=app)
            base = "http://scatterlab.local"
        async with httpx.AsyncClient(
            transport=transport, base_url=base, timeout=None
        ) as client:
            response = await client.request(method, path, json=payload)
            try:
                body = response.json()
            except json.JSONDecodeError:
                body = {"detail": response.text}
            return response.status_code, body

    return asyncio.run(go())


def _suite_payload(config: str | None, seed: int | None, out: str | None) -> dict:
    payload: dict = {}
    if config:
        payload["config_path"] = str(Path(config).resolve())
    if seed is not None:
        payload["seed"] = seed
    if out:
        payload["out_dir"] = out
    return payload


def _run_suite(ctx_server: str | None, name: str, config, seed, out) -> None:
    status, body = _call(
        ctx_server, "POST", _SUITE_ENDPOINT[name], _suite_payload(config, seed, out)
    )
    if status == 400:
        click.echo(json.dumps(body, indent=2, default=str))
        sys.exit(2)
    if status != 200:
        click.echo(json.dumps(body, indent=2, default=str))
        sys.exit(2)
    click.echo(json.dumps(body["report"], indent=2, default=str))
    sys.exit(body["exit_code"])


def _suite_options(fn):
    fn = click.option("--config", type=click.Path(exists=True), default=None,
                      help="JSON configuration file")(fn)
    fn = click.option("--seed", type=int, default=None, help="Master seed override")(fn)
    fn = click.option("--out", type=click.Path(), default=None, help="Artifact directory")(fn)
    return fn


@click.group()
@click.option("--server", default=None, help="Base URL of a running service; in-process when omitted")
@click.pass_context
def main(ctx, server):
    """Numerical laboratory for many-body scattering geometry."""
    ctx.obj = {"server": server}


@main.command()
@click.pass_context
def suites(ctx):
    """List the verification suites."""
    status, body = _call(ctx.obj["server"], "GET", "/suites")
    click.echo(json.dumps(body, indent=2))
    sys.exit(0 if status == 200 else 2)


@main.command("config")
@click.pass_context
def show_config(ctx):
    """Print the default configuration."""
    status, body = _call(ctx.obj["server"], "GET", "/config/default")
    click.echo(json.dumps(body.get("config", body), indent=2))
    sys.exit(0 if status == 200 else 2)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
def serve(host, port):
    """Run the laboratory service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


def _register_plain_suite(name: str, help_text: str):
    @main.command(name=name, help=help_text)
    @_suite_options
    @click.pass_context
    def _cmd(ctx, config, seed, out, _name=name):
        _run_suite(ctx.obj["server"], _name, config, seed, out)


_register_plain_suite("orbits", "Run the orbit-solver verification suite.")
_register_plain_suite("eikonal", "Run the limit-phase verification suite.")
_register_plain_suite("modifier", "Run the modifier verification suite.")
_register_plain_suite("channels", "Run the channel-diagnostics suite.")


@main.group(invoke_without_command=True)
@_suite_options
@click.pass_context
def partition(ctx, config, seed, out):
    """Partition-of-unity suite; subcommand: verify."""
    if ctx.invoked_subcommand is None:
        _run_suite(ctx.obj["server"], "partition", config, seed, out)
    else:
        ctx.obj["opts"] = (config, seed, out)


@partition.command("verify")
@_suite_options
@click.pass_context
def partition_verify(ctx, config, seed, out):
    """Monte-Carlo verification of the partition region claims."""
    _run_suite(ctx.obj["server"], "partition", config, seed, out)


@main.group()
@click.pass_context
def orbit(ctx):
    """Classical orbit commands."""


@orbit.command("run")
@_suite_options
@click.pass_context
def orbit_run(ctx, config, seed, out):
    """Run the orbit-solver verification suite."""
    _run_suite(ctx.obj["server"], "orbits", config, seed, out)


@main.group(invoke_without_command=True)
@_suite_options
@click.pass_context
def invariance(ctx, config, seed, out):
    """Forward-invariance suite; subcommand: run."""
    if ctx.invoked_subcommand is None:
        _run_suite(ctx.obj["server"], "invariance", config, seed, out)


@invariance.command("run")
@_suite_options
@click.pass_context
def invariance_run(ctx, config, seed, out):
    """Run the forward-invariance experiment."""
    _run_suite(ctx.obj["server"], "invariance", config, seed, out)


@main.group()
@click.pass_context
def phase(ctx):
    """Modifier phase commands."""


@phase.command("build")
@_suite_options
@click.pass_context
def phase_build(ctx, config, seed, out):
    """Build and persist the modifier phase table (modifier suite)."""
    _run_suite(ctx.obj["server"], "modifier", config, seed, out)


@phase.command("verify")
@_suite_options
@click.pass_context
def phase_verify(ctx, config, seed, out):
    """Verify the limit phase (eikonal suite)."""
    _run_suite(ctx.obj["server"], "eikonal", config, seed, out)


@main.group(invoke_without_command=True)
@_suite_options
@click.pass_context
def waveop(ctx, config, seed, out):
    """Wave-operator probes; subcommand: probe."""
    if ctx.invoked_subcommand is None:
        _run_suite(ctx.obj["server"], "waveop", config, seed, out)


@waveop.command("probe")
@_suite_options
@click.pass_context
def waveop_probe(ctx, config, seed, out):
    """Run the finite-time Cauchy probe."""
    _run_suite(ctx.obj["server"], "waveop", config, seed, out)


@main.group()
@click.pass_context
def channel(ctx):
    """Channel diagnostics commands."""


@channel.command("profile")
@_suite_options
@click.pass_context
def channel_profile(ctx, config, seed, out):
    """Run the channel mass-profile and orthogonality suite."""
    _run_suite(ctx.obj["server"], "channels", config, seed, out)


@main.group()
@click.pass_context
def quantum(ctx):
    """Grid quantum commands."""


@quantum.command("evolve")
@click.option("--extent", type=float, default=40.0)
@click.option("--points", type=int, default=512)
@click.option("--duration", type=float, default=1.0)
@click.option("--dt", type=float, default=0.005)
@click.option("--center", type=float, default=0.0)
@click.option("--momentum", type=float, default=1.0)
@click.option("--width", type=float, default=2.0)
@click.option("--potential", default=None, help='JSON profile spec, e.g. {"name":"sech2"}')
@click.option("--snapshot", type=click.Path(), default=None)
@click.pass_context
def quantum_evolve(ctx, extent, points, duration, dt, center, momentum, width, potential, snapshot):
    """Split-step evolution of a Gaussian packet."""
    payload = {
        "extent": extent,
        "points": points,
        "duration": duration,
        "dt": dt,
        "packet_center": center,
        "packet_momentum": momentum,
        "packet_width": width,
        "potential": json.loads(potential) if potential else None,
        "snapshot_path": snapshot,
    }
    status, body = _call(ctx.obj["server"], "POST", "/quantum/evolve", payload)
    click.echo(json.dumps(body, indent=2))
    sys.exit(0 if status == 200 else 2)


if __name__ == "__main__":
    main()
