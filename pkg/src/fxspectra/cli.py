"""Command-line front end.

A thin client of the HTTP service: every subcommand builds one request,
sends it (in-process by default, or to ``--server URL``), writes the
returned artifact files atomically, and maps the error envelope onto exit
codes: 0 success, 2 usage/input errors, 3 data-quality errors, 4 numerical
failures. The resolved run configuration is persisted as run_config.json
next to the outputs; ``--config`` re-runs from such a file, reproducing the
outputs byte for byte for a fixed seed.
"""

from __future__ import annotations

import argparse
import asyncio
import base64
import json
import os
import sys
import tempfile
from pathlib import Path

import httpx

from . import __version__

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

_CATEGORY_EXIT = {"input": EXIT_INPUT, "data": EXIT_DATA, "numeric": EXIT_NUMERIC}


class ServiceClient:
    """POSTs to a running server, or calls the ASGI app in-process."""

    def __init__(self, server: str | None = None):
        self.server = server.rstrip("/") if server else None

    def post(self, path: str, payload: dict) -> tuple[int, dict]:
        if self.server:
            resp = httpx.post(self.server + path, json=payload, timeout=600.0)
            return resp.status_code, resp.json()
        return asyncio.run(self._post_inprocess(path, payload))

    @staticmethod
    async def _post_inprocess(path: str, payload: dict) -> tuple[int, dict]:
        from .service.app import app

        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://fxspectra.local", timeout=600.0
        ) as client:
            resp = await client.post(path, json=payload)
            return resp.status_code, resp.json()


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _write_atomic(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".tmp-{path.name}-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_artifacts(out_dir: Path, body: dict) -> list[Path]:
    written = []
    for rel, text in body.get("artifacts", {}).items():
        path = out_dir / rel
        _write_atomic(path, text.encode("utf-8"))
        written.append(path)
    for rel, b64 in body.get("artifacts_binary", {}).items():
        path = out_dir / rel
        _write_atomic(path, base64.b64decode(b64))
        written.append(path)
    return written


def _write_run_config(out_dir: Path, command: str, params: dict) -> None:
    config = {"version": __version__, "command": command, "params": params}
    _write_atomic(
        out_dir / "run_config.json",
        (json.dumps(config, indent=2, sort_keys=True) + "\n").encode("utf-8"),
    )


def _load_config(path: str, command: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        config = json.load(fh)
    if config.get("command") != command:
        raise ValueError(
            f"config is for command {config.get('command')!r}, not {command!r}"
        )
    return config.get("params", {})


def _resolve(args: argparse.Namespace, config: dict, key: str, default):
    value = getattr(args, key, None)
    if value is None:
        value = config.get(key, default)
    return value


def _read_input(path: str) -> str:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(path)
    return p.read_text(encoding="utf-8")


def _read_sector(path: str) -> list[str]:
    tokens: list[str] = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(t for t in line.replace(",", " ").split() if t)
    return tokens


def _dispatch(client: ServiceClient, path: str, payload: dict, out_dir: Path,
              command: str, params: dict) -> tuple[int, dict | None]:
    """Send the request; on success persist artifacts and the run config."""
    try:
        status, body = client.post(path, payload)
    except httpx.HTTPError as exc:
        return _fail(f"service unreachable: {exc}", EXIT_INPUT), None
    if status == 422:  # request model validation
        return _fail(f"invalid request: {json.dumps(body.get('detail'))}", EXIT_INPUT), None
    if status != 200:
        category = body.get("category", "numeric")
        message = body.get("message", json.dumps(body))
        return _fail(f"{body.get('error', 'failure')}: {message}", _CATEGORY_EXIT.get(category, EXIT_NUMERIC)), None
    out_dir.mkdir(parents=True, exist_ok=True)
    written = _write_artifacts(out_dir, body)
    _write_run_config(out_dir, command, params)
    for path_ in written:
        print(f"wrote {path_}")
    return EXIT_OK, body


def cmd_ingest(args: argparse.Namespace) -> int:
    config = _load_config(args.config, "ingest") if args.config else {}
    params = {
        "input": _resolve(args, config, "input", None),
        "quote": _resolve(args, config, "quote", None),
        "spike_sigma": float(_resolve(args, config, "spike_sigma", 5.0)),
        "spike_cap": float(_resolve(args, config, "spike_cap", 0.005)),
        "max_passes": int(_resolve(args, config, "max_passes", 3)),
        "gap_policy": _resolve(args, config, "gap_policy", "carry_forward"),
        "min_length": int(_resolve(args, config, "min_length", 3)),
    }
    if not params["input"] or not params["quote"]:
        return _fail("--input and --quote are required", EXIT_INPUT)
    try:
        csv_text = _read_input(params["input"])
    except FileNotFoundError:
        return _fail(f"input not found: {params['input']}", EXIT_INPUT)
    payload = {
        "csv_text": csv_text,
        "quote_currency": params["quote"],
        "options": {
            "spike_sigma": params["spike_sigma"],
            "spike_fraction_cap": params["spike_cap"],
            "max_despike_passes": params["max_passes"],
            "gap_policy": params["gap_policy"],
            "min_series_length": params["min_length"],
        },
    }
    code, body = _dispatch(
        ServiceClient(args.server), "/ingest", payload, Path(args.out), "ingest", params
    )
    if code == EXIT_OK:
        print(
            f"panel: {len(body['codes'])} currencies x {body['n_dates']} dates "
            f"({body['first_date']}..{body['last_date']}), "
            f"{body['replaced_cells']} cells despiked "
            f"({body['replaced_fraction']:.4%})"
        )
    return code


def _null_spec_params(args: argparse.Namespace, config: dict) -> dict:
    return {
        "kind": _resolve(args, config, "kind", None),
        "seed": int(_resolve(args, config, "seed", 0)),
        "sigma": _resolve(args, config, "sigma", "match_median"),
        "loading": _resolve(args, config, "loading", None),
        "n": _resolve(args, config, "n", None),
        "m": _resolve(args, config, "m", None),
        "T": _resolve(args, config, "T", None),
        "distribution": _resolve(args, config, "distribution", "gaussian"),
    }


def _null_spec_payload(params: dict) -> dict:
    sigma = params["sigma"]
    if sigma != "match_median":
        sigma = float(sigma)
    return {
        "kind": params["kind"].replace("-", "_"),
        "seed": params["seed"],
        "sigma_fict": sigma,
        "factor_loading": None if params["loading"] is None else float(params["loading"]),
        "n": None if params["n"] is None else int(params["n"]),
        "m": None if params["m"] is None else int(params["m"]),
        "T": None if params["T"] is None else int(params["T"]),
        "distribution": params["distribution"],
    }


def cmd_analyze(args: argparse.Namespace) -> int:
    config = _load_config(args.config, "analyze") if args.config else {}
    null_cfg = config.get("null") or {}
    null_kind = args.null or null_cfg.get("kind")
    null_params = None
    if null_kind:
        null_params = _null_spec_params(args, null_cfg)
        null_params["kind"] = null_kind
    params = {
        "input": _resolve(args, config, "input", None),
        "quote": _resolve(args, config, "quote", None),
        "base": _resolve(args, config, "base", None),
        "tau": int(_resolve(args, config, "tau", 1)),
        "bins": int(_resolve(args, config, "bins", 80)),
        "eigenvectors": bool(args.eigenvectors or config.get("eigenvectors", False)),
        "binary": bool(args.binary or config.get("binary", False)),
        "null": null_params,
    }
    payload: dict = {
        "base": params["base"],
        "tau": params["tau"],
        "bins": params["bins"],
        "include_eigenvectors": params["eigenvectors"],
        "include_binary": params["binary"],
    }
    if params["null"]:
        payload["null"] = _null_spec_payload(params["null"])
    if params["input"]:
        try:
            payload["panel_csv"] = _read_input(params["input"])
        except FileNotFoundError:
            return _fail(f"input not found: {params['input']}", EXIT_INPUT)
        payload["quote_currency"] = params["quote"]
    code, body = _dispatch(
        ServiceClient(args.server), "/analyze", payload, Path(args.out), "analyze", params
    )
    if code == EXIT_OK:
        lam = body["spectrum"]["eigenvalues"]
        print(
            f"base {body['base']}: m={body['m']}, T={body['T']}, "
            f"lambda_max={lam[-1]:.4f}"
            + (f", excluded {body['excluded']}" if body["excluded"] else "")
        )
    return code


def cmd_ladder(args: argparse.Namespace) -> int:
    config = _load_config(args.config, "ladder") if args.config else {}
    params = {
        "input": _resolve(args, config, "input", None),
        "quote": _resolve(args, config, "quote", None),
        "tau": int(_resolve(args, config, "tau", 1)),
        "with_fict": bool(args.with_fict or config.get("with_fict", False)),
        "seed": int(_resolve(args, config, "seed", 0)),
        "sector": _resolve(args, config, "sector", None),
        "per_base": bool(args.per_base or config.get("per_base", False)),
        "bins": int(_resolve(args, config, "bins", 80)),
    }
    if not params["input"] or not params["quote"]:
        return _fail("--input and --quote are required", EXIT_INPUT)
    try:
        panel_csv = _read_input(params["input"])
    except FileNotFoundError:
        return _fail(f"input not found: {params['input']}", EXIT_INPUT)
    sector_codes = None
    if params["sector"]:
        try:
            sector_codes = _read_sector(params["sector"])
        except FileNotFoundError:
            return _fail(f"sector file not found: {params['sector']}", EXIT_INPUT)
    payload = {
        "panel_csv": panel_csv,
        "quote_currency": params["quote"],
        "tau": params["tau"],
        "include_fictitious": params["with_fict"],
        "seed": params["seed"],
        "sector": sector_codes,
        "per_base": params["per_base"],
        "bins": params["bins"],
    }
    code, body = _dispatch(
        ServiceClient(args.server), "/ladder", payload, Path(args.out), "ladder", params
    )
    if code == EXIT_OK:
        entries = body["entries"]
        print(f"ladder: {len(entries)} bases, T={body['T']}, tau={body['tau']}")
        for e in entries[:3]:
            print(f"  top {e['base']}: lambda_max={e['lambda_max']:.4f}")
        if entries:
            e = entries[-1]
            print(f"  bottom {e['base']}: lambda_max={e['lambda_max']:.4f}")
        for omission in body["omitted"]:
            print(f"  omitted {omission['base']}: {omission['reason']}")
    return code


def cmd_null(args: argparse.Namespace) -> int:
    config = _load_config(args.config, "null") if args.config else {}
    params = _null_spec_params(args, config)
    params["input"] = _resolve(args, config, "input", None)
    params["quote"] = _resolve(args, config, "quote", None)
    if not params["kind"]:
        return _fail("--kind is required", EXIT_INPUT)
    payload: dict = {"spec": _null_spec_payload(params)}
    if params["input"]:
        try:
            payload["panel_csv"] = _read_input(params["input"])
        except FileNotFoundError:
            return _fail(f"input not found: {params['input']}", EXIT_INPUT)
        payload["quote_currency"] = params["quote"]
    code, body = _dispatch(
        ServiceClient(args.server), "/null", payload, Path(args.out), "null", params
    )
    if code == EXIT_OK:
        print(f"{body['kind']} null: {len(body['codes'])} series, T={body['T']}")
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fxspectra",
        description="Per-base correlation spectra and collectivity ladders for FX panels",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--server", default=None, help="service URL (default: in-process)")
        p.add_argument("--config", default=None, help="re-run from a run_config.json")

    p = sub.add_parser("ingest", help="load, synchronize, and despike a raw quote CSV")
    p.add_argument("--input", default=None, help="raw CSV (date,currency,price)")
    p.add_argument("--quote", default=None, help="quote currency code")
    p.add_argument("--spike-sigma", dest="spike_sigma", type=float, default=None)
    p.add_argument("--spike-cap", dest="spike_cap", type=float, default=None)
    p.add_argument("--max-passes", dest="max_passes", type=int, default=None)
    p.add_argument("--gap-policy", dest="gap_policy", choices=["carry_forward", "intersect"], default=None)
    p.add_argument("--min-length", dest="min_length", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("analyze", help="per-base report: matrix, histogram, spectrum, bounds")
    p.add_argument("--input", default=None, help="panel CSV from ingest")
    p.add_argument("--quote", default=None, help="quote currency of the panel")
    p.add_argument("--base", default=None, help="base currency (default: quote)")
    p.add_argument("--tau", type=int, default=None)
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--eigenvectors", action="store_true", help="also write eigenvectors.csv")
    p.add_argument("--binary", action="store_true", help="also write correlation.fxcm")
    p.add_argument("--null", choices=["random", "one-factor", "fictitious"], default=None,
                   help="analyze a generated null panel instead of --input")
    _null_flags(p)
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("ladder", help="maximal-eigenvalue ladder over all bases")
    p.add_argument("--input", default=None, help="panel CSV from ingest")
    p.add_argument("--quote", default=None, help="quote currency of the panel")
    p.add_argument("--tau", type=int, default=None)
    p.add_argument("--with-fict", dest="with_fict", action="store_true",
                   help="append the fictitious noise currency")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--sector", default=None, help="file of codes for a sector sub-basket")
    p.add_argument("--per-base", dest="per_base", action="store_true",
                   help="also write per-base artifact directories")
    p.add_argument("--bins", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_ladder)

    p = sub.add_parser("null", help="generate a null-model panel")
    p.add_argument("--kind", choices=["random", "one-factor", "fictitious"], default=None)
    p.add_argument("--input", default=None, help="panel CSV (fictitious only)")
    p.add_argument("--quote", default=None, help="quote currency (fictitious only)")
    _null_flags(p)
    common(p)
    p.set_defaults(func=cmd_null)

    return parser


def _null_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--sigma", default=None, help="fictitious return sigma, or match_median")
    p.add_argument("--loading", type=float, default=None, help="one-factor loading in [0,1]")
    p.add_argument("--n", type=int, default=None, help="one-factor currency count")
    p.add_argument("--m", type=int, default=None, help="random-null row count")
    p.add_argument("--T", type=int, default=None, help="return sample count")
    p.add_argument("--distribution", choices=["gaussian", "uniform"], default=None)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        return _fail(str(exc), EXIT_INPUT)


if __name__ == "__main__":
    sys.exit(main())
