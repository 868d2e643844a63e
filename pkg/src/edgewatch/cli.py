"""Command-line client for the service.

The CLI is a thin HTTP client: every subcommand calls the FastAPI app,
either in-process (default; no sockets, no per-request network overhead) or
against a running server via ``--server``.  Bench runs execute inside the
service as a single request, so timings are identical either way.

Exit codes: 0 on success, 1 when ``diff`` finds diverging engines, 2 for
usage or request errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from .engines import ENGINE_NAMES


def _make_client(server: Optional[str]):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=None)
    from fastapi.testclient import TestClient

    from .service.app import create_app

    return TestClient(create_app())


def _post(client, path: str, payload: dict):
    resp = client.post(path, json=payload)
    if resp.status_code >= 400:
        try:
            detail = resp.json().get("detail", resp.text)
        except Exception:
            detail = resp.text
        print(f"error: {detail}", file=sys.stderr)
        raise SystemExit(2)
    return resp.json()


def _add_server(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--server",
        metavar="URL",
        default=None,
        help="talk to a running service instead of in-process",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edgewatch",
        description="continuous graph-pattern matching: workloads, benchmarks, service",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic workload")
    gen.add_argument("--out", required=True, help="output directory")
    gen.add_argument("--num-queries", type=int, required=True)
    gen.add_argument("--avg-size", type=int, required=True)
    gen.add_argument("--selectivity", type=float, required=True)
    gen.add_argument("--overlap", type=float, required=True)
    gen.add_argument("--edges", type=int, required=True, dest="num_edges")
    gen.add_argument("--alphabet", type=int, default=100, dest="alphabet")
    gen.add_argument("--vertex-pool", type=int, default=None, dest="vertex_pool")
    gen.add_argument("--literal-pool", type=int, default=None, dest="literal_pool")
    gen.add_argument("--hot-noise", type=float, default=0.25, dest="hot_noise")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument(
        "--measure",
        action="store_true",
        help="report oracle-measured achieved selectivity",
    )
    _add_server(gen)

    runp = sub.add_parser("run", help="replay a stream against one engine")
    runp.add_argument("--engine", required=True, choices=ENGINE_NAMES)
    runp.add_argument("--queries", required=True)
    runp.add_argument("--stream", required=True)
    runp.add_argument("--mode", default="homomorphism",
                      choices=("homomorphism", "isomorphism"))
    runp.add_argument("--output", default=None, help="per-update CSV path")
    runp.add_argument("--notify-log", default=None, help="notification TSV path")
    runp.add_argument("--warmup", type=int, default=0)
    runp.add_argument("--repetitions", type=int, default=1)
    _add_server(runp)

    diffp = sub.add_parser("diff", help="compare engines' notification logs")
    diffp.add_argument("--engines", required=True,
                       help="comma-separated engine names (at least two)")
    diffp.add_argument("--queries", required=True)
    diffp.add_argument("--stream", required=True)
    diffp.add_argument("--mode", default="homomorphism",
                       choices=("homomorphism", "isomorphism"))
    _add_server(diffp)

    trendp = sub.add_parser("trend", help="sweep one workload parameter")
    trendp.add_argument("--param", required=True,
                        choices=("num_queries", "avg_size", "selectivity",
                                 "overlap", "num_edges"))
    trendp.add_argument("--values", required=True,
                        help="comma-separated parameter values")
    trendp.add_argument("--engines", required=True,
                        help="comma-separated engine names")
    trendp.add_argument("--mode", default="homomorphism",
                        choices=("homomorphism", "isomorphism"))
    trendp.add_argument("--seeds", default="", help="comma-separated seeds")
    trendp.add_argument("--num-queries", type=int, default=100)
    trendp.add_argument("--avg-size", type=int, default=5)
    trendp.add_argument("--selectivity", type=float, default=0.25)
    trendp.add_argument("--overlap", type=float, default=0.35)
    trendp.add_argument("--edges", type=int, default=10000, dest="num_edges")
    trendp.add_argument("--alphabet", type=int, default=100)
    trendp.add_argument("--vertex-pool", type=int, default=None)
    trendp.add_argument("--literal-pool", type=int, default=None)
    trendp.add_argument("--hot-noise", type=float, default=0.25)
    trendp.add_argument("--seed", type=int, default=0)
    _add_server(trendp)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)

    return parser


def cmd_gen(args) -> int:
    with _make_client(args.server) as client:
        payload = {
            "out_dir": args.out,
            "num_queries": args.num_queries,
            "avg_size": args.avg_size,
            "selectivity": args.selectivity,
            "overlap": args.overlap,
            "num_edges": args.num_edges,
            "label_alphabet_size": args.alphabet,
            "seed": args.seed,
            "vertex_pool_size": args.vertex_pool,
            "literal_pool_size": args.literal_pool,
            "hot_noise_prob": args.hot_noise,
            "measure": args.measure,
        }
        data = _post(client, "/workloads/generate", payload)
    print(f"queries:  {data['queries']}")
    print(f"stream:   {data['stream']}")
    print(f"manifest: {data['manifest']}")
    print(f"planted queries: {data['planted_queries']} "
          f"({data['planted_edges']} edges)")
    if data.get("achieved_selectivity") is not None:
        print(f"achieved selectivity: {data['achieved_selectivity']:.3f}")
    return 0


def cmd_run(args) -> int:
    with _make_client(args.server) as client:
        payload = {
            "engine": args.engine,
            "query_file": args.queries,
            "stream_file": args.stream,
            "mode": args.mode,
            "output": args.output,
            "notify_log": args.notify_log,
            "warmup": args.warmup,
            "repetitions": args.repetitions,
        }
        data = _post(client, "/bench/run", payload)
    print(
        f"{data['engine']} mode={data['mode']} queries={data['queries']} "
        f"updates={data['updates']}"
    )
    print(
        f"mean={data['mean_us']:.2f}us p50={data['p50_us']:.2f}us "
        f"p99={data['p99_us']:.2f}us total={data['total_us'] / 1e6:.3f}s"
    )
    print(
        f"indexing={data['indexing_us'] / 1e6:.3f}s "
        f"notifications={data['notifications']} embeddings={data['embeddings']}"
    )
    print(f"examined={data['examined']} memory={data['memory_bytes']}B")
    if args.output:
        print(f"per-update CSV: {args.output}")
    if args.notify_log:
        print(f"notification log: {args.notify_log}")
    return 0


def cmd_diff(args) -> int:
    engines = [e.strip() for e in args.engines.split(",") if e.strip()]
    if len(engines) < 2:
        print("error: need at least two engines to diff", file=sys.stderr)
        return 2
    with _make_client(args.server) as client:
        payload = {
            "engines": engines,
            "query_file": args.queries,
            "stream_file": args.stream,
            "mode": args.mode,
        }
        data = _post(client, "/bench/diff", payload)
    print(data["description"])
    return 0 if data["identical"] else 1


def cmd_trend(args) -> int:
    engines = [e.strip() for e in args.engines.split(",") if e.strip()]
    values = [float(v) for v in args.values.split(",") if v.strip()]
    seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
    with _make_client(args.server) as client:
        payload = {
            "param": args.param,
            "values": values,
            "engines": engines,
            "mode": args.mode,
            "seeds": seeds,
            "num_queries": args.num_queries,
            "avg_size": args.avg_size,
            "selectivity": args.selectivity,
            "overlap": args.overlap,
            "num_edges": args.num_edges,
            "label_alphabet_size": args.alphabet,
            "seed": args.seed,
            "vertex_pool_size": args.vertex_pool,
            "literal_pool_size": args.literal_pool,
            "hot_noise_prob": args.hot_noise,
        }
        data = _post(client, "/bench/trend", payload)
    print(f"{args.param:>12} {'engine':>8} {'mean_us':>12} {'runs':>5}")
    for row in data["rows"]:
        print(
            f"{row['value']:>12g} {row['engine']:>8} "
            f"{row['mean_us']:>12.2f} {row['runs']:>5}"
        )
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "gen": cmd_gen,
        "run": cmd_run,
        "diff": cmd_diff,
        "trend": cmd_trend,
        "serve": cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except SystemExit as e:
        return int(e.code or 0)


if __name__ == "__main__":
    sys.exit(main())
