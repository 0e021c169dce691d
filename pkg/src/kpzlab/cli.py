"""Command-line entry point.

Exit codes: 0 all assertions passed, 1 assertion failure (reports still
written), 2 configuration error.  The environment variable
``KPZLAB_OUTPUT_DIR`` overrides the output directory and nothing else.
"""

from __future__ import annotations

import argparse
import json
import sys

from .experiments import (
    EXPERIMENTS,
    ExperimentConfig,
    run_experiment,
)
from .measures import ProbeFamily, trig_probe


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _names(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def _add_common(p: argparse.ArgumentParser, ensemble: int = 256):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--ensemble", type=int, default=ensemble)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kpzlab",
        description="Pseudospectral verification lab for regularized "
        "KPZ / stochastic Burgers dynamics",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("beta", help="homogenized coefficient and Gaussian L2 report")
    p.add_argument("--nonlinearity", required=True)
    p.add_argument("--quad-order", type=int, default=256)
    p.add_argument("--out", default="out")

    p = sub.add_parser("simulate", help="trajectory ensemble with probe recording")
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--horizon", type=float, default=0.1)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--nonlinearity", default="square")
    p.add_argument("--target", default="sine")
    p.add_argument("--probes", default=None, help="file with one probe id (sin:k / cos:k) per line")
    _add_common(p, ensemble=16)

    p = sub.add_parser("she", help="multiplicative-noise heat equation ensemble")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--horizon", type=float, default=0.1)
    _add_common(p, ensemble=256)

    p = sub.add_parser("sample-bridge", help="tube-conditioned bridge sample")
    p.add_argument("--k", type=int, default=16)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--target", default="sine")
    p.add_argument("--attempts", type=int, default=2_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out")

    p = sub.add_parser("universality", help="equal-coefficient collapse study")
    p.add_argument("--n", type=_ints, default=(16,))
    p.add_argument("--eps", type=_floats, default=(0.5,))
    p.add_argument("--target", default="sine")
    p.add_argument("--nonlinearities", type=_names, default=("square", "square_plus_cubic"))
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--horizon", type=float, default=0.25)
    _add_common(p)

    p = sub.add_parser("ergodicity", help="Wasserstein bound and entropy decay study")
    p.add_argument("--n", type=_ints, default=(16,))
    p.add_argument("--eps", type=_floats, default=(0.5,))
    p.add_argument("--target", default="sine")
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--horizon", type=float, default=0.02)
    p.add_argument("--n-records", type=int, default=41)
    p.add_argument("--entropy-ensemble", type=int, default=0)
    _add_common(p)

    p = sub.add_parser("invariance", help="white-noise invariance study")
    p.add_argument("--n", type=_ints, default=(16,))
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--horizon", type=float, default=0.1)
    p.add_argument("--alpha", type=float, default=1.0)
    _add_common(p, ensemble=2048)

    p = sub.add_parser("fractional-sum", help="fractional mode-sum table and invariance")
    p.add_argument("--alphas", type=_floats, default=(0.75, 0.9))
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--horizon", type=float, default=0.1)
    p.add_argument("--n", type=_ints, default=(16,))
    _add_common(p, ensemble=2048)

    return ap


def _config_from_args(args) -> ExperimentConfig:
    kw = dict(experiment=args.command, seed=getattr(args, "seed", 0), out_dir=getattr(args, "out", "out"))
    if args.command == "beta":
        kw.update(nonlinearities=(args.nonlinearity,), quad_order=args.quad_order)
    elif args.command == "simulate":
        kw.update(
            cutoffs=(args.n,), dt=args.dt, horizon=args.horizon, alpha=args.alpha,
            nonlinearities=(args.nonlinearity,), target=args.target, ensemble=args.ensemble,
        )
    elif args.command == "she":
        kw.update(
            cutoffs=(args.n,), dt=args.dt, horizon=args.horizon, beta=args.beta,
            ensemble=args.ensemble,
        )
    elif args.command == "sample-bridge":
        kw.update(cutoffs=(args.k,), eps_values=(args.eps,), target=args.target,
                  max_attempts=args.attempts)
    elif args.command == "universality":
        kw.update(
            cutoffs=args.n, eps_values=args.eps, target=args.target,
            nonlinearities=args.nonlinearities, dt=args.dt, horizon=args.horizon,
            ensemble=args.ensemble,
        )
    elif args.command == "ergodicity":
        kw.update(
            cutoffs=args.n, eps_values=args.eps, target=args.target, dt=args.dt,
            horizon=args.horizon, ensemble=args.ensemble, n_records=args.n_records,
            entropy_ensemble=args.entropy_ensemble,
        )
    elif args.command == "invariance":
        kw.update(cutoffs=args.n, dt=args.dt, horizon=args.horizon, alpha=args.alpha,
                  ensemble=args.ensemble)
    elif args.command == "fractional-sum":
        kw.update(experiment="fractional-sum", cutoffs=args.n, alphas=args.alphas,
                  dt=args.dt, horizon=args.horizon, ensemble=args.ensemble)
    return ExperimentConfig(**kw)


def _load_probes(path: str) -> ProbeFamily:
    probes = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            kind, k = line.split(":")
            probes.append(trig_probe(kind, int(k)))
    return ProbeFamily(tuple(probes))


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = _config_from_args(args)
    except (ValueError, KeyError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command == "simulate" and getattr(args, "probes", None):
            from .experiments import run_simulate

            report = run_simulate(cfg, probes=_load_probes(args.probes))
        else:
            report = run_experiment(cfg)
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    if args.command == "beta":
        print(json.dumps(report["payload"], indent=2, sort_keys=True))
    else:
        for check in report.get("checks", []):
            status = "PASS" if check["passed"] else "FAIL"
            print(f"[{status}] {check['name']}: {check['detail']}")
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
