"""Command line entry points: serve the relay, publish a session, run benches."""

from __future__ import annotations

import logging
import sys
from pathlib import Path

import click

from .bench import (
    DEFAULT_HEADER_OVERHEAD,
    measure_fullframe,
    measure_tiled,
    write_report,
)
from .document import load_documents
from .privacy import PrivacyPolicy
from .protocol import CodecPolicy
from .publisher import HttpRelay, PublisherConfig, run_session
from .script import load_script
from .synth import generate_benchmark_assets


def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Debug logging.")
def main(verbose: bool):
    """Tile-based web session sharing."""
    _setup_logging(verbose)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON config file (TILECAST_* env vars override it).")
@click.option("--listen", default=None, help="host:port (default 127.0.0.1:8787).")
@click.option("--storage", default=None, help="Recording storage root.")
@click.option("--max-sessions", type=int, default=None)
@click.option("--long-poll-cap-ms", type=int, default=None)
@click.option("--viewer-dir", default=None, help="Static viewer bundle to serve at /viewer/.")
@click.option("--verify-signatures", is_flag=True, default=None,
              help="Recompute tile pixel hashes on upload.")
def serve(config_path, listen, storage, max_sessions, long_poll_cap_ms,
          viewer_dir, verify_signatures):
    """Run the relay server."""
    from .server import RelayServer, ServerConfig

    config = ServerConfig.load(config_path)
    if listen is not None:
        config.listen = listen
    if storage is not None:
        config.storage_root = storage or None
    if max_sessions is not None:
        config.max_sessions = max_sessions
    if long_poll_cap_ms is not None:
        config.long_poll_cap_ms = long_poll_cap_ms
    if viewer_dir is not None:
        config.viewer_dir = viewer_dir
    if verify_signatures:
        config.verify_signatures = True
    server = RelayServer(config)
    click.echo(f"relay listening on {server.url}")
    if config.viewer_dir:
        click.echo(f"viewer at {server.url}/viewer/")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.stop()


@main.command()
@click.option("--server", "server_url", required=True, help="Relay base URL.")
@click.option("--script", "script_path", required=True, type=click.Path(exists=True))
@click.option("--docs", "docs_dir", required=True, type=click.Path(exists=True))
@click.option("--tick-hz", type=float, default=4.0, show_default=True)
@click.option("--ref-interval-s", type=float, default=5.0, show_default=True,
              help="Reference capture interval; 0 disables.")
@click.option("--codec", default="png", show_default=True,
              help="png | jpeg:<quality> | auto.")
@click.option("--privacy", default="all", show_default=True,
              help="all | none | comma list of email,ssn,phone,address.")
@click.option("--viewport", default="1024x768", show_default=True)
@click.option("--pace", type=click.Choice(["realtime", "fast"]), default="realtime",
              show_default=True)
def publish(server_url, script_path, docs_dir, tick_hz, ref_interval_s, codec,
            privacy, viewport, pace):
    """Publish a scripted session to a relay."""
    width, _, height = viewport.partition("x")
    config = PublisherConfig(
        tick_hz=tick_hz,
        ref_interval_s=ref_interval_s,
        codec=CodecPolicy.parse(codec),
        privacy=PrivacyPolicy.parse(privacy),
        viewport_width=int(width),
        viewport_height=int(height),
        pace=pace,
    )
    documents = load_documents(docs_dir)
    script = load_script(script_path, Path(docs_dir))
    transport = HttpRelay(server_url)
    stats = run_session(script, documents, transport, config)
    click.echo(
        f"session {stats.session_id}: {stats.ticks} ticks, "
        f"{stats.tiles_uploaded} tiles, {stats.bytes_up} body bytes up"
    )


@main.group()
def bench():
    """Bandwidth benchmark harness."""


@bench.command()
@click.option("--seed", type=int, required=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
def gen(seed, out_dir):
    """Generate deterministic benchmark pages and script."""
    docs_dir, script_path = generate_benchmark_assets(seed, out_dir)
    click.echo(f"docs: {docs_dir}")
    click.echo(f"script: {script_path}")


@bench.command()
@click.option("--mode", type=click.Choice(["tiled", "fullframe"]), required=True)
@click.option("--script", "script_path", required=True, type=click.Path(exists=True))
@click.option("--docs", "docs_dir", required=True, type=click.Path(exists=True))
@click.option("--server", "server_url", default=None,
              help="Relay URL; embedded in-memory relay when omitted (tiled mode).")
@click.option("--viewers", type=int, default=0, show_default=True,
              help="Simulated polling viewers (tiled mode).")
@click.option("--jpeg-q", type=int, default=75, show_default=True)
@click.option("--codec", default="png", show_default=True, help="Tile codec (tiled mode).")
@click.option("--tick-hz", type=float, default=4.0, show_default=True)
@click.option("--ref-interval-s", type=float, default=0.0, show_default=True,
              help="Reference capture interval (tiled mode); 0 disables.")
@click.option("--pace", type=click.Choice(["realtime", "fast"]), default="fast",
              show_default=True)
@click.option("--header-overhead", type=int, default=DEFAULT_HEADER_OVERHEAD,
              show_default=True, help="Flat per-request header byte estimate.")
@click.option("--report", "report_path", required=True, type=click.Path())
def run(mode, script_path, docs_dir, server_url, viewers, jpeg_q, codec, tick_hz,
        ref_interval_s, pace, header_overhead, report_path):
    """Measure one mode and write the bandwidth report JSON."""
    documents = load_documents(docs_dir)
    script = load_script(script_path, Path(docs_dir))
    if mode == "tiled":
        config = PublisherConfig(
            tick_hz=tick_hz,
            ref_interval_s=ref_interval_s,
            codec=CodecPolicy.parse(codec),
            pace=pace,
        )
        report, _stats = measure_tiled(
            script, documents, relay_url=server_url, viewers=viewers,
            publisher_config=config, header_overhead=header_overhead,
        )
    else:
        report = measure_fullframe(
            script, documents, jpeg_q=jpeg_q, tick_hz=tick_hz,
            header_overhead=header_overhead,
        )
    write_report(report, report_path)
    click.echo(f"{report.mode}: {report.bytes_up} bytes up, {report.avg_kbps} kbps avg")
    click.echo(f"report written to {report_path}")


if __name__ == "__main__":
    main(sys.argv[1:])
