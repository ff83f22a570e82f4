"""Command-line front end.

Each subcommand is a thin client of the HTTP service: it reads input
files, posts them to the service (an in-process application by default,
or a remote server via --server), and writes the response to the output
files in the documented formats.  All computation lives behind the
service boundary.

Exit codes: 0 success; 1 error (or any FAIL verdict under `verify`);
under `verify` additionally 2 when a verdict is ASSUMPTION_UNVERIFIED
and 3 for malformed inputs or usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .analysis import EnsembleStats
from .exceptions import FormatError, OeocimError
from .io import (
    atomic_write,
    bounds_to_dict,
    ensemble_csv,
    problem_from_dict,
    read_bounds,
    read_ensemble_csv,
    read_oracle_report,
    write_problem,
    write_trajectory_csv,
)


class ClientError(OeocimError):
    """The service rejected a request."""


class ServiceClient:
    """POSTs to the in-process application or to a remote server."""

    def __init__(self, server: str | None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=600.0)
        else:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service import create_app

            self._client = TestClient(create_app())

    def post(self, path: str, payload: dict) -> dict:
        response = self._client.post(path, json=payload)
        if response.status_code != 200:
            raise ClientError(_describe_rejection(path, response))
        return response.json()


def _describe_rejection(path: str, response) -> str:
    try:
        body = response.json()
    except ValueError:
        body = response.text
    if isinstance(body, dict) and "message" in body:
        field = f" (field '{body['field']}')" if "field" in body else ""
        return f"{path} rejected: {body['message']}{field}"
    return f"{path} rejected with status {response.status_code}: {body}"


def _load_json_file(path: str) -> dict:
    try:
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise FormatError("(document)", f"{path} is not valid JSON: {exc}") from exc


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _cmd_generate(args, client: ServiceClient) -> int:
    spec = _load_json_file(args.spec)
    response = client.post("/generate", spec)
    write_problem(args.out, problem_from_dict(response))
    print(f"wrote {args.out} (n={response['n']}, label={response['label']})")
    return 0


def _cmd_solve(args, client: ServiceClient) -> int:
    payload = {
        "problem": _load_json_file(args.problem),
        "config": _load_json_file(args.config),
    }
    response = client.post("/solve", payload)
    write_trajectory_csv(args.out, response["energies"])
    spins = ",".join(f"{x:+d}" for x in response["discrete_spins"])
    print(f"final energy: {response['final_energy']!r}")
    print(f"spins: {spins}")
    print(f"discrete energy: {response['discrete_energy']!r}")
    return 0


def _cmd_oracle(args, client: ServiceClient) -> int:
    payload = {
        "problem": _load_json_file(args.problem),
        "sample_count": args.samples,
        "seed": args.seed,
    }
    response = client.post("/oracle", payload)
    atomic_write(args.out, _dump_json(response))
    print(
        f"e_star={response['e_star']!r} method={response['method']} "
        f"certified={response['certified']} definiteness={response['definiteness']} "
        f"mu_hat={response['mu_hat']!r}"
    )
    return 0


def _cmd_ensemble(args, client: ServiceClient) -> int:
    payload = {
        "problem": _load_json_file(args.problem),
        "config": _load_json_file(args.config),
        "M": args.M,
        "seed": args.seed,
    }
    if args.oracle is not None:
        payload["e_star"] = read_oracle_report(args.oracle)["e_star"]
    response = client.post("/ensemble", payload)
    stats = EnsembleStats(
        K=len(response["mean_gap"]) - 1,
        mean_gap=np.array(response["mean_gap"]),
        ci_halfwidth=np.array(response["ci_halfwidth"]),
    )
    atomic_write(args.out, ensemble_csv(stats))
    print(
        f"wrote {args.out} (K={stats.K}, M={args.M}, "
        f"final mean gap {float(stats.mean_gap[-1])!r})"
    )
    return 0


def _cmd_bounds(args, client: ServiceClient) -> int:
    oracle_fields = read_oracle_report(args.oracle)
    payload = {
        "problem": _load_json_file(args.problem),
        "config": _load_json_file(args.config),
        "oracle": {"e_star": oracle_fields["e_star"], "mu_hat": oracle_fields["mu_hat"]},
        "mu": args.mu,
        "epsilon": args.epsilon,
    }
    response = client.post("/bounds", payload)
    atomic_write(args.out, _dump_json(response))
    print(
        f"liminf_bound_original={response['liminf_bound_original']!r} "
        f"liminf_bound_modified={response['liminf_bound_modified']!r} "
        f"kappa={response['kappa']} mu={response['mu_used']!r} ({response['mu_source']})"
    )
    return 0


def _cmd_verify(args, client: ServiceClient) -> int:
    stats = read_ensemble_csv(args.ensemble)
    report = read_bounds(args.bounds)
    payload = {
        "mean_gap": [float(x) for x in stats.mean_gap],
        "ci_halfwidth": [float(x) for x in stats.ci_halfwidth],
        "bounds": bounds_to_dict(report),
        "tail_fraction": args.tail_fraction,
    }
    response = client.post("/verify", payload)
    atomic_write(
        args.out,
        _dump_json({"verdicts": response["verdicts"], "rate_fit": response["rate_fit"]}),
    )
    for v in response["verdicts"]:
        print(
            f"{v['check']}: {v['verdict']} "
            f"(observed={v['observed']!r}, bound={v['bound']!r})"
        )
    rate = response["rate_fit"]
    if rate is not None:
        print(
            f"rate_fit: exponent={rate['exponent']!r} r_squared={rate['r_squared']!r} "
            f"window={rate['window'][0]}..{rate['window'][1]}"
        )
    return response["exit_code"]


def _cmd_serve(args, client: ServiceClient) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oeocim",
        description="Coherent Ising machine simulator and bound-verification harness.",
    )
    parser.add_argument(
        "--server",
        default=None,
        help="base URL of a running service; default runs the service in-process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a problem instance from a spec")
    g.add_argument("--spec", required=True, help="generator spec JSON")
    g.add_argument("--out", required=True, help="output problem JSON")
    g.set_defaults(handler=_cmd_generate)

    s = sub.add_parser("solve", help="run a single trajectory")
    s.add_argument("--problem", required=True, help="problem JSON")
    s.add_argument("--config", required=True, help="run config JSON")
    s.add_argument("--out", required=True, help="output trajectory CSV")
    s.set_defaults(handler=_cmd_solve)

    o = sub.add_parser("oracle", help="compute E*, mu_hat and the definiteness class")
    o.add_argument("--problem", required=True, help="problem JSON")
    o.add_argument("--out", required=True, help="output oracle report JSON")
    o.add_argument("--samples", type=int, default=4096, help="PL sample count")
    o.add_argument("--seed", type=int, default=0, help="search/sampling seed")
    o.set_defaults(handler=_cmd_oracle)

    e = sub.add_parser("ensemble", help="run a seeded Monte Carlo ensemble")
    e.add_argument("--problem", required=True, help="problem JSON")
    e.add_argument("--config", required=True, help="run config JSON")
    e.add_argument("-M", "--runs", dest="M", type=int, required=True, help="run count")
    e.add_argument("--seed", type=int, required=True, help="base seed (run i uses seed XOR i)")
    e.add_argument("--out", required=True, help="output ensemble CSV")
    e.add_argument(
        "--oracle",
        default=None,
        help="oracle report JSON supplying E*; computed on the fly when omitted",
    )
    e.set_defaults(handler=_cmd_ensemble)

    b = sub.add_parser("bounds", help="compute the theoretical gap bounds")
    b.add_argument("--problem", required=True, help="problem JSON")
    b.add_argument("--config", required=True, help="run config JSON (constant schedule)")
    b.add_argument("--oracle", required=True, help="oracle report JSON")
    b.add_argument("--mu", type=float, default=None, help="override the PL constant")
    b.add_argument("--epsilon", type=float, default=None, help="accuracy for the kappa bound")
    b.add_argument("--out", required=True, help="output bounds JSON")
    b.set_defaults(handler=_cmd_bounds)

    v = sub.add_parser("verify", help="check an ensemble against the bounds")
    v.add_argument("--ensemble", required=True, help="ensemble CSV")
    v.add_argument("--bounds", required=True, help="bounds JSON")
    v.add_argument("--out", required=True, help="output verdict JSON")
    v.add_argument(
        "--tail-fraction",
        type=float,
        default=0.2,
        help="trailing fraction of iterations standing in for the liminf",
    )
    v.set_defaults(handler=_cmd_verify)

    srv = sub.add_parser("serve", help="run the HTTP service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)
    srv.set_defaults(handler=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    error_code = 3 if args.command == "verify" else 1
    try:
        client = None if args.command == "serve" else ServiceClient(args.server)
        return args.handler(args, client)
    except OeocimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return error_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return error_code


if __name__ == "__main__":
    sys.exit(main())
