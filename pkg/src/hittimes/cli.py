"""Command-line client for the hitting-time service.

The CLI parses arguments, sends one request to the HTTP API and reports
the outcome.  By default it runs the service in-process (no socket, no
deployment needed); ``--server URL`` targets a remote instance instead,
in which case all paths refer to the server's filesystem.

Exit codes: 0 success, 1 validation error, 2 resource/cap error, 3 I/O
error.
"""

from __future__ import annotations

import argparse
import asyncio
import os
import sys

import httpx

from .errors import EXIT_CODES

IN_PROCESS_BASE_URL = "http://hittimes.internal"


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; the CLI contract says 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _str_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument(
        "--threads", type=int, default=os.cpu_count() or 1,
        help="worker parallelism (1 for bit-reproducible runs)",
    )
    common.add_argument("--quiet", action="store_true", help="suppress logs and timing fields")
    common.add_argument("--format", choices=("tsv", "json"), default="tsv", dest="fmt")
    common.add_argument("--server", default=None, help="base URL of a remote service (default: in-process)")

    parser = _Parser(prog="hittimes", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", parents=[common], help="generate a synthetic graph")
    p.add_argument("--model", choices=("sp1", "sp2", "den"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--edges", type=int, default=None)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("shard", parents=[common], help="shard a graph's transition matrix onto disk")
    p.add_argument("--graph", required=True)
    p.add_argument("--shards", type=int, required=True)
    p.add_argument("--dangling", choices=("self-loop", "reject"), default="self-loop")
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("hit", parents=[common], help="approximate hitting times from a start distribution")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph")
    src.add_argument("--shards", metavar="DIR")
    st = p.add_mutually_exclusive_group(required=True)
    st.add_argument("--start", type=int)
    st.add_argument("--start-dist", metavar="PATH")
    st.add_argument("--uniform", action="store_true")
    p.add_argument("--T", type=int, required=True, dest="horizon")
    p.add_argument("--order", type=int, choices=(0, 1), default=0)
    p.add_argument("--engine", choices=("mem", "stream"), default=None)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("exact", parents=[common], help="exact oracle hitting times (small graphs)")
    p.add_argument("--graph", required=True)
    p.add_argument("--method", choices=("recursive", "first-passage", "paths"), required=True)
    p.add_argument("--start", type=int, default=None)
    p.add_argument("--T", type=int, required=True, dest="horizon")
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("sample-diag", parents=[common], help="Monte-Carlo return-probability estimates")
    p.add_argument("--graph", required=True)
    p.add_argument("--T", type=int, required=True, dest="horizon")
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--walks", type=int, default=None)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("eval", parents=[common], help="run the accuracy benchmark")
    p.add_argument("--models", type=_str_list, required=True, metavar="LIST")
    p.add_argument("--sizes", type=_int_list, required=True, metavar="LIST")
    p.add_argument("--edges", type=_int_list, required=True, metavar="LIST")
    p.add_argument("--instances", type=int, default=30)
    p.add_argument("--T", type=int, required=True, dest="horizon")
    p.add_argument("--order", type=int, choices=(0, 1), default=0)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", required=True)

    return parser


def _request_for(args: argparse.Namespace) -> tuple[str, dict]:
    if args.command == "gen":
        return "/v1/gen", {
            "model": args.model,
            "n": args.n,
            "edges": args.edges,
            "seed": args.seed,
            "out_path": args.output,
        }
    if args.command == "shard":
        return "/v1/shard", {
            "graph_path": args.graph,
            "shards": args.shards,
            "out_dir": args.output,
            "dangling": args.dangling,
        }
    if args.command == "hit":
        return "/v1/hit", {
            "graph_path": args.graph,
            "shard_dir": args.shards,
            "start": args.start,
            "start_dist_path": args.start_dist,
            "uniform": args.uniform,
            "horizon": args.horizon,
            "order": args.order,
            "engine": args.engine,
            "out_path": args.output,
            "fmt": args.fmt,
            "quiet": args.quiet,
            "threads": args.threads,
        }
    if args.command == "exact":
        return "/v1/exact", {
            "graph_path": args.graph,
            "method": args.method,
            "start": args.start,
            "horizon": args.horizon,
            "out_path": args.output,
            "fmt": args.fmt,
        }
    if args.command == "sample-diag":
        return "/v1/sample-diag", {
            "graph_path": args.graph,
            "horizon": args.horizon,
            "eps": args.eps,
            "rho": args.rho,
            "walks": args.walks,
            "seed": args.seed,
            "out_path": args.output,
        }
    if args.command == "eval":
        return "/v1/eval", {
            "models": args.models,
            "sizes": args.sizes,
            "edges": args.edges,
            "instances": args.instances,
            "horizon": args.horizon,
            "order": args.order,
            "seed": args.seed,
            "out_path": args.output,
            "threads": args.threads,
        }
    raise AssertionError(f"unhandled command {args.command}")


def _summary_line(command: str, body: dict) -> str:
    if command == "gen":
        return f"wrote {body['out_path']} (n={body['n']}, {body['edge_count']} edges)"
    if command == "shard":
        return f"wrote {body['shards']} shards to {body['out_dir']} (n={body['n']}, nnz={body['nnz']})"
    if command == "hit":
        extra = f", wall={body['wall_time_s']:.3f}s" if "wall_time_s" in body else ""
        return (
            f"wrote {body['out_path']} (n={body['n']}, T={body['T']}, "
            f"order={body['order']}, engine={body['backend']}, passes={body['passes']}{extra})"
        )
    if command == "exact":
        return f"wrote {body['out_path']} (method={body['method']}, n={body['n']}, T={body['T']})"
    if command == "sample-diag":
        return f"wrote {body['out_path']} ({body['walks']} walks per vertex, T={body['T']})"
    if command == "eval":
        return f"wrote {body['out_path']}"
    return str(body)


def _client(args: argparse.Namespace) -> httpx.AsyncClient:
    if args.server:
        return httpx.AsyncClient(base_url=args.server.rstrip("/"), timeout=None)
    from .service.app import create_app

    return httpx.AsyncClient(
        transport=httpx.ASGITransport(app=create_app()),
        base_url=IN_PROCESS_BASE_URL,
        timeout=None,
    )


async def _dispatch(args: argparse.Namespace) -> int:
    path, payload = _request_for(args)
    try:
        async with _client(args) as client:
            response = await client.post(path, json=payload)
    except httpx.HTTPError as exc:
        print(f"hittimes: transport error: {exc}", file=sys.stderr)
        return 3

    if response.status_code == 200:
        body = response.json()
        if not args.quiet:
            if args.command == "eval":
                print(body["table"], end="")
            print(_summary_line(args.command, body))
        return 0

    try:
        body = response.json()
    except ValueError:
        print(f"hittimes: server error (HTTP {response.status_code})", file=sys.stderr)
        return 3
    if "error" in body:
        code = body["error"].get("code", "validation")
        print(f"hittimes: {code} error: {body['error'].get('message', '')}", file=sys.stderr)
        return EXIT_CODES.get(code, 1)
    # pydantic schema rejections arrive as {"detail": [...]}
    print(f"hittimes: invalid request: {body.get('detail')}", file=sys.stderr)
    return 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return asyncio.run(_dispatch(args))


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
