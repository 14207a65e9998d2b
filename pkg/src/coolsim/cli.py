"""Command-line interface.

Exit codes: 0 on success, 1 for configuration or usage errors, 2 for
numeric failures (non-convergence and similar); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .circuits import build_dc_mirror_circuit, build_tsac_circuit, circuit_to_text, count_cx, transpile
from .errors import ConfigError, CoolsimError, InvalidParam
from .experiments import load_config, run_experiment, write_csv
from . import gda as _gda
from . import markov as _markov
from . import simulate as _simulate


class _CliParser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _CliParser(prog="coolsim", description=__doc__)
    parser.add_argument("--version", action="version", version=f"coolsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a TOML-configured experiment")
    run.add_argument("--config", required=True, help="experiment TOML file")
    run.add_argument("--out", required=True, help="output directory for the CSV")

    eta = sub.add_parser("eta", help="effective depolarizing strength for a protocol circuit")
    eta.add_argument("--model", choices=("timekeeping", "bitflip"), required=True)
    eta.add_argument("--p", type=float, required=True, help="per-CX error probability")
    eta.add_argument("--n", type=int, required=True, help="total qubit count")
    eta.add_argument("--protocol", choices=("tsac", "dc"), default="tsac")

    limit = sub.add_parser("limit", help="analytic steady state of the cooling chain")
    limit.add_argument("--nc", type=int, required=True, help="computational qubit count")
    limit.add_argument("--eps", type=float, required=True, help="reset polarization")
    limit.add_argument("--eta", type=float, required=True, help="depolarizing strength")

    describe = sub.add_parser("describe", help="print a protocol circuit")
    describe.add_argument("--protocol", choices=("tsac", "dc"), required=True)
    describe.add_argument("--n", type=int, required=True)
    return parser


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = run_experiment(cfg)
    out_path = out_dir / cfg.output_name()
    write_csv(records, out_path)
    print(f"wrote {len(records)} records to {out_path}")
    return 0


def _protocol_gate_count(protocol: str, n: int) -> int:
    if protocol == "tsac":
        return _simulate.tsac_gate_count(n)
    return _simulate.dc_gate_count(n)


def _cmd_eta(args) -> int:
    n_tg = _protocol_gate_count(args.protocol, args.n)
    d = 2**args.n
    if args.model == "timekeeping":
        est = _gda.eta_timekeeping(args.p, n_tg, d)
    else:
        est = _gda.eta_bitflip(args.p, n_tg, d)
    print(f"protocol = {args.protocol}, n = {args.n}, d = {d}")
    print(f"n_TG = {est.n_tg}")
    print(f"q = {est.q:.10g}")
    print(f"eta = {est.eta:.10g}")
    if est.clamped:
        print("warning: eta clamped; p * n_TG >= 1 violates the first-order regime")
    elif est.regime_warning:
        print("warning: p * n_TG >= 0.1; first-order accuracy degrades")
    return 0


def _cmd_limit(args) -> int:
    limit = _markov.steady_state_analytic(args.nc, args.eps, args.eta)
    print(f"lambda1 = {limit.lambda1:.12g}")
    print(f"lambda2 = {limit.lambda2:.12g}")
    print(f"z1 = {limit.z1:.12g}")
    print(f"z2 = {limit.z2:.12g}")
    print(f"P = {_markov.target_population(limit):.12g}")
    return 0


def _cmd_describe(args) -> int:
    if args.protocol == "tsac":
        circuit = build_tsac_circuit(args.n)
    else:
        circuit = build_dc_mirror_circuit(args.n)
    text = circuit_to_text(circuit)
    if text:
        print(text)
    print(f"# CX count after transpilation: {count_cx(transpile(circuit))}")
    return 0


_COMMANDS = {"run": _cmd_run, "eta": _cmd_eta, "limit": _cmd_limit, "describe": _cmd_describe}


def cli_main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # --version and --help print and exit
            return int(exc.code or 0)
        return _COMMANDS[args.command](args)
    except (ConfigError, InvalidParam) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CoolsimError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
