"""Batch front end.

Thin client over the HTTP service: the system document is read here, the
computation happens behind the service API (mounted in-process through an
ASGI transport unless --server points at a running instance), and the
returned report is written as canonical JSON.

Exit codes: 0 every criterion passed, 1 some criterion or pipeline stage
failed, 2 usage or parse error.
"""

from __future__ import annotations

import asyncio
import json
import sys
from pathlib import Path

import click
import httpx

EXIT_PASS = 0
EXIT_CRITERION_FAILURE = 1
EXIT_USAGE = 2


def _post_pipeline(payload: dict, server: str | None) -> httpx.Response:
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            return client.post("/pipeline", json=payload)

    from .service import app

    async def go() -> httpx.Response:
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport,
                                     base_url="http://focusfocus.internal",
                                     timeout=None) as client:
            return await client.post("/pipeline", json=payload)

    return asyncio.run(go())


def _canonical(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


@click.command(context_settings={"max_content_width": 100})
@click.option("--input", "input_path", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="System document (JSON): pair of series plus truncation order.")
@click.option("--order", type=int, default=None,
              help="Override the truncation order from the input file (>= 2).")
@click.option("--verify-numeric", is_flag=True, default=False,
              help="Also run the numeric suites (flow contact, loop action, "
                   "right inverse, transport brackets). Default: off.")
@click.option("--samples", type=int, default=50, show_default=True,
              help="Sample points per numeric suite.")
@click.option("--radius", type=float, default=1.0, show_default=True,
              help="Sampling radius for the numeric suites.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for every randomized suite; reports are "
                   "byte-identical for identical config and seed.")
@click.option("--nodes", type=int, default=64, show_default=True,
              help="Circle-quadrature nodes (>= 8).")
@click.option("--fd-step", type=float, default=1e-4, show_default=True,
              help="Finite-difference step for bracket checks.")
@click.option("--output", "output_path", type=click.Path(dir_okay=False, path_type=Path),
              default=None, help="Write the JSON report here (default: stdout).")
@click.option("--server", type=str, default=None,
              help="Base URL of a running service; default runs in-process.")
def main(input_path: Path, order, verify_numeric, samples, radius, seed, nodes,
         fd_step, output_path, server):
    """Normalize a commuting pair at a focus-focus point and emit a report."""
    try:
        document = json.loads(input_path.read_text())
    except json.JSONDecodeError as exc:
        click.echo(f"error: invalid JSON in {input_path} at line {exc.lineno}: {exc.msg}",
                   err=True)
        sys.exit(EXIT_USAGE)

    payload = {
        "system": document,
        "options": {
            "order": order,
            "verify_numeric": verify_numeric,
            "samples": samples,
            "radius": radius,
            "seed": seed,
            "nodes": nodes,
            "fd_step": fd_step,
        },
    }
    try:
        response = _post_pipeline(payload, server)
    except httpx.HTTPError as exc:
        click.echo(f"error: cannot reach service: {exc}", err=True)
        sys.exit(EXIT_USAGE)

    if response.status_code != 200:
        try:
            detail = response.json()
        except json.JSONDecodeError:
            detail = {"message": response.text}
        message = detail.get("message") or detail.get("detail") or str(detail)
        click.echo(f"error: {message}", err=True)
        sys.exit(EXIT_USAGE)

    report = response.json()
    text = _canonical(report)
    if output_path is not None:
        output_path.write_text(text)
        click.echo(f"report written to {output_path} (status: {report['status']})",
                   err=True)
    else:
        click.echo(text, nl=False)
    sys.exit(int(report.get("exit_code", EXIT_CRITERION_FAILURE)))


if __name__ == "__main__":
    main()
