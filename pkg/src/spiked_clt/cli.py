"""``spiked-clt`` command line: params, simulate, power, identities, selftest."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .clt import clt_params
from .closed_forms import TestPowerInput, capacity_T, test_power
from .ensembles import EnsembleSpec, Model, support_interval
from .errors import DomainError, NumericalError, SpikedCLTError
from .identities import identity_suite
from .montecarlo import SampleConfig, resolve_threads, run_experiment
from .quadrature import QuadratureConfig
from .statistics import parse_statistic
from .validation import run_selftest

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
IDENTITY_TOL = 1e-9


class UsageError(DomainError):
    pass


def _finite(kind):
    def parse(text):
        try:
            val = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
        if isinstance(val, float) and not math.isfinite(val):
            raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
        return val
    return parse


real = _finite(float)
integer = _finite(int)


def _model_flags(p, spike_default=None):
    p.add_argument("--model", choices=["A", "B", "C"], type=str.upper)
    p.add_argument("--c", type=real, help="m/n ratio (Models A/B)")
    p.add_argument("--c1", type=real, help="m1/n ratio (Model C)")
    p.add_argument("--c2", type=real, help="m2/n ratio (Model C)")
    p.add_argument("--spike", type=real, default=spike_default, help="delta (A) or nu (B/C)")
    p.add_argument("--statistic", default=None,
                   help="linear | lrt[:c=v] | capacity:T=v | log1p | poly:c0,c1,... | cheb[@lo,hi]:a0,a1,...")
    p.add_argument("--P-db", dest="P_db", type=real, help="SNR in dB (capacity convenience)")
    p.add_argument("--K0", type=real, help="Rician factor times m (capacity convenience; sets nu)")
    p.add_argument("--nr", type=integer, help="receive antennas")
    p.add_argument("--nt", type=integer, help="transmit antennas")


def _output_flags(p, default_format):
    p.add_argument("--format", choices=["json", "csv"], default=default_format)
    p.add_argument("--out", help="write to this path instead of stdout")


def build_parser():
    parser = argparse.ArgumentParser(prog="spiked-clt", description=(
        "Gaussian laws of linear spectral statistics for spiked Wishart and F ensembles."))
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="asymptotic mean, spike correction and variance")
    _model_flags(p, spike_default=None)
    p.add_argument("--n", type=integer, help="matrix dimension (default 100, or min(nr, nt))")
    p.add_argument("--max-order", type=integer, default=2048)
    _output_flags(p, "json")

    p = sub.add_parser("simulate", help="Monte Carlo comparison with the prediction")
    _model_flags(p, spike_default=None)
    p.add_argument("--n", type=integer)
    p.add_argument("--m", type=integer)
    p.add_argument("--m1", type=integer)
    p.add_argument("--m2", type=integer)
    p.add_argument("--trials", type=integer, default=1000)
    p.add_argument("--seed", type=integer, default=0)
    p.add_argument("--threads", type=integer, help="worker threads (fallback: SPIKED_CLT_THREADS)")
    p.add_argument("--bins", type=integer, default=50)
    p.add_argument("--histogram", help="also write the histogram CSV here")
    _output_flags(p, "json")

    p = sub.add_parser("power", help="asymptotic power of the multi-sample test")
    p.add_argument("--alpha", type=real, default=0.05)
    p.add_argument("--c1", type=real, required=True)
    p.add_argument("--c2", type=real, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--nu", type=real)
    g.add_argument("--nu-grid", help="start:stop:count (linear grid) or a comma-separated list")
    _output_flags(p, "csv")

    p = sub.add_parser("identities", help="closed-form integral catalogue against quadrature")
    p.add_argument("--draws", type=integer, default=100)
    p.add_argument("--seed", type=integer, default=0)
    _output_flags(p, "json")

    p = sub.add_parser("selftest", help="production paths against independent oracles")
    _output_flags(p, "json")
    return parser


def _snr_mode(args):
    return any(getattr(args, k, None) is not None for k in ("P_db", "K0", "nr", "nt"))


def _resolve_model(args):
    """``(spec, statistic, n_default)`` from model flags, honouring the SNR convenience flags."""
    T = None
    n_default = 100
    if _snr_mode(args):
        missing = [f for f, k in (("--P-db", "P_db"), ("--K0", "K0"), ("--nr", "nr"), ("--nt", "nt"))
                   if getattr(args, k) is None]
        if missing:
            raise UsageError(f"SNR flags need all of --P-db, --K0, --nr, --nt (missing {', '.join(missing)})")
        if args.model not in (None, "B"):
            raise UsageError("SNR flags describe a Model B channel")
        if args.c1 is not None or args.c2 is not None:
            raise UsageError("--c1/--c2 do not apply to Model B")
        n, m = min(args.nr, args.nt), max(args.nr, args.nt)
        c = m / n if args.c is None else args.c
        if args.spike is not None and args.spike != args.K0:
            raise UsageError("--spike conflicts with --K0 (the spike is nu = K0)")
        T = capacity_T(args.P_db, args.K0, args.nt, args.nr)
        spec = EnsembleSpec.model_b(c, args.K0)
        n_default = n
        text = args.statistic or "capacity"
    else:
        if args.model is None:
            raise UsageError("--model is required")
        spike = 0.0 if args.spike is None else args.spike
        if args.model == "C":
            if args.c is not None:
                raise UsageError("Model C takes --c1 and --c2, not --c")
            if args.c1 is None or args.c2 is None:
                raise UsageError("Model C needs --c1 and --c2")
            spec = EnsembleSpec.model_c(args.c1, args.c2, spike)
        else:
            if args.c1 is not None or args.c2 is not None:
                raise UsageError(f"Model {args.model} takes --c, not --c1/--c2")
            if args.c is None:
                raise UsageError(f"Model {args.model} needs --c")
            spec = EnsembleSpec(Model(args.model), c=args.c, spike=spike)
        text = args.statistic
        if text is None:
            raise UsageError("--statistic is required")
    stat = parse_statistic(text, c=spec.c, T=T, interval=support_interval(spec))
    return spec, stat, n_default


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def cmd_params(args):
    spec, stat, n_default = _resolve_model(args)
    n = args.n if args.n is not None else n_default
    p = clt_params(spec, stat, n, QuadratureConfig(max_order=args.max_order))
    g = p.geometry
    out = {"model": spec.variant.value}
    out.update({k: _num(v) for k, v in spec.ratios().items()})
    out.update({
        "spike": _num(spec.spike), "statistic": stat.name, "n": n,
        "a": _num(g.interval.a), "b": _num(g.interval.b),
        "z0": _num(g.z0), "S": _num(g.S), "w": _num(g.w), "threshold": _num(g.threshold),
        "regime": p.regime.value,
        "mu": _num(p.mu), "sigma2": _num(p.sigma2), "mu_bar": _num(p.mu_bar),
        "adjusted_mu_bar": _num(p.adjusted_mu_bar),
        "predicted_mean": _num(p.predicted_mean), "outlier_adjusted_mean": _num(p.outlier_adjusted_mean),
    })
    return [out]


def cmd_simulate(args):
    spec, stat, n_default = _resolve_model(args)
    n = args.n
    if _snr_mode(args):
        n = n or min(args.nr, args.nt)
        m = args.m or max(args.nr, args.nt)
    else:
        m = args.m
    if n is None:
        raise UsageError("simulate needs --n")
    if spec.variant is Model.C:
        if m is not None:
            raise UsageError("Model C takes --m1 and --m2, not --m")
        cfg = SampleConfig(n, m1=args.m1, m2=args.m2, trials=args.trials, seed=args.seed)
    else:
        if args.m1 is not None or args.m2 is not None:
            raise UsageError(f"Model {spec.variant.value} takes --m, not --m1/--m2")
        cfg = SampleConfig(n, m=m, trials=args.trials, seed=args.seed)
    report, params, _ = run_experiment(spec, stat, cfg, threads=resolve_threads(args.threads), bins=args.bins)
    if args.histogram:
        report.write_histogram_csv(args.histogram)
    if args.format == "csv":
        return [dict(zip(("bin_left", "bin_right", "count", "density"), row)) for row in report.histogram_rows()]
    out = report.to_dict()
    out.update({"model": spec.variant.value, "statistic": stat.name, "n": n, "trials_requested": args.trials,
                "seed": args.seed, "mu": params.mu, "sigma2": params.sigma2, "mu_bar": params.mu_bar,
                "outlier_adjusted_mean": params.outlier_adjusted_mean})
    return [out]


def _nu_grid(text):
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            return [float(v) for v in np.linspace(float(start), float(stop), int(count))]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"cannot parse --nu-grid {text!r}") from None


def cmd_power(args):
    grid = [args.nu] if args.nu is not None else _nu_grid(args.nu_grid)
    rows = []
    for nu in grid:
        beta = test_power(TestPowerInput(args.alpha, nu, args.c1, args.c2))
        rows.append({"alpha": args.alpha, "nu": nu, "c1": args.c1, "c2": args.c2, "beta": beta})
    return rows


def cmd_identities(args):
    rows = [{"identity": key, "draws": draws, "max_residual": worst, "ok": worst < IDENTITY_TOL}
            for key, draws, worst in identity_suite(args.draws, args.seed)]
    return rows


def cmd_selftest(args):
    return [{"check": c.name, "error": c.error, "tolerance": c.tol, "ok": c.ok} for c in run_selftest()]


COMMANDS = {"params": cmd_params, "simulate": cmd_simulate, "power": cmd_power,
            "identities": cmd_identities, "selftest": cmd_selftest}


def render(rows, fmt):
    if fmt == "json":
        payload = rows[0] if len(rows) == 1 and "check" not in rows[0] and "identity" not in rows[0] \
            and "beta" not in rows[0] else rows
        return json.dumps(payload, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


def _clean(rows):
    """Non-finite floats become nulls so JSON stays standard."""
    def fix(v):
        if isinstance(v, float):
            return v if math.isfinite(v) else None
        if isinstance(v, dict):
            return {k: fix(x) for k, x in v.items()}
        if isinstance(v, list):
            return [fix(x) for x in v]
        return v
    return [fix(r) for r in rows]


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rows = _clean(COMMANDS[args.command](args))
        text = render(rows, args.format)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except NumericalError as exc:
        print(f"spiked-clt: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (SpikedCLTError, OSError) as exc:
        print(f"spiked-clt: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if any(r.get("ok") is False for r in rows):
        print("spiked-clt: some checks failed", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
