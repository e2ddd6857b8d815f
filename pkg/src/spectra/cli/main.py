"""``spectra`` entry point.  Exit codes: 0 ok, 1 verifier violations, 2 config/usage,
3 training diverged, 4 missing artifacts."""
import argparse
import json
import logging
import sys
from dataclasses import replace

from ..errors import ConfigError, MissingArtifactsError, SpectraError, TrainingError
from ..linalg import RankPolicy
from ..theory import CLAIMS
from .commands import aggregate_paired, cmd_analyze, cmd_init_sweep, cmd_paired, cmd_train, cmd_verify
from .config import config_from_dict, load_config, with_train

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_TRAINING, EXIT_MISSING = 0, 1, 2, 3, 4

log = logging.getLogger("spectra")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _global(p):
    p.add_argument("--seed", type=int, help="override train.seed")
    p.add_argument("--out", help="override output_dir")
    p.add_argument("--rank-mode", choices=("relative", "absolute"))
    p.add_argument("--rank-threshold", type=float)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = _Parser(prog="spectra", description="Softmax rank diagnostics for small MLPs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="train one run and persist its trace")
    p.add_argument("config")
    _global(p)

    p = sub.add_parser("analyze", help="compute metrics for a finished run")
    p.add_argument("run_dir")
    p.add_argument("--ood-config", help="YAML file with an ood_dataset section")
    _global(p)

    p = sub.add_parser("paired", help="baseline vs variant with train.* overrides")
    p.add_argument("config")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="train.KEY=VALUE")
    p.add_argument("--seeds", type=int, nargs="+")
    p.add_argument("--parallel", action="store_true", help="run both sides in separate processes")
    _global(p)

    p = sub.add_parser("verify", help="run a theory verifier")
    p.add_argument("claim")
    p.add_argument("--trials", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int, nargs="+")
    p.add_argument("--classes", type=int, nargs="+")
    p.add_argument("--per-class", type=int)
    p.add_argument("--sizes", type=int, nargs="+")
    p.add_argument("--draws", type=int, help="seeds per size for rank2_full")
    p.add_argument("--c-max", type=float)
    p.add_argument("--points", type=int)
    _global(p)

    p = sub.add_parser("init-sweep", help="normal-init sigma sweep")
    p.add_argument("config")
    p.add_argument("--sigmas", type=float, nargs="+", required=True)
    p.add_argument("--seeds", type=int, nargs="+")
    _global(p)
    return parser


def _policy(args, base=RankPolicy()):
    if args.rank_mode is None and args.rank_threshold is None:
        return base
    try:
        return RankPolicy(args.rank_mode or base.mode,
                          base.threshold if args.rank_threshold is None else args.rank_threshold)
    except SpectraError as exc:
        raise ConfigError(f"rank policy: {exc}", field="rank_policy") from exc


def _config(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = with_train(cfg, seed=args.seed)
    if args.out is not None:
        cfg = replace(cfg, output_dir=args.out)
    return replace(cfg, rank_policy=_policy(args, cfg.rank_policy))


def _verify_params(args):
    p = {}
    if args.seed is not None:
        p["seed"] = args.seed
    if args.rank_mode or args.rank_threshold is not None:
        p["policy"] = _policy(args)
    mapping = {"trials": "trials", "n": "n", "per_class": "per_class", "c_max": "c_max", "points": "points"}
    for attr, key in mapping.items():
        if getattr(args, attr) is not None:
            p[key] = getattr(args, attr)
    if args.k:
        p["k"] = tuple(args.k)
    if args.classes:
        p["classes"] = args.classes
    if args.sizes:
        p["sizes"] = tuple(args.sizes)
    if args.draws is not None:
        p["seeds"] = args.draws
    return p


def run(argv):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(message)s")
    if args.command == "train":
        print(cmd_train(_config(args)))
    elif args.command == "analyze":
        ood = None
        if args.ood_config:
            import yaml
            with open(args.ood_config) as fh:
                raw = yaml.safe_load(fh) or {}
            if set(raw) != {"ood_dataset"}:
                raise ConfigError("--ood-config must hold exactly one ood_dataset section", field="ood_dataset")
            dummy = {"net": {"layer_widths": [1, 1]}, "train": {"temperature": 1.0},
                     "dataset": {"kind": "blobs", "dim": 1, "class_count": 1}, **raw}
            ood = config_from_dict(dummy).ood_dataset
        policy = _policy(args) if (args.rank_mode or args.rank_threshold is not None) else None
        report = cmd_analyze(args.run_dir, ood, policy)
        print(json.dumps({"kappa": report.kappa, "rho": report.rho, "sr": report.sr,
                          "orthodev": report.orthodev}))
    elif args.command == "paired":
        cfg = _config(args)
        seeds = args.seeds or [cfg.seed]
        results = []
        for s in seeds:
            res, path = cmd_paired(with_train(cfg, seed=s), args.overrides, args.parallel)
            results.append(res)
            print(json.dumps({"seed": s, "report": path, "deltas": res.deltas}))
        if len(seeds) > 1:
            print(json.dumps(aggregate_paired(results), indent=2, sort_keys=True))
    elif args.command == "verify":
        if args.claim not in CLAIMS:
            raise ConfigError(f"unknown claim {args.claim!r}; choose from {', '.join(CLAIMS)}")
        summary, path = cmd_verify(args.claim, args.out or "runs", **_verify_params(args))
        print(json.dumps(summary, sort_keys=True))
        return EXIT_OK if summary["violations"] == 0 else EXIT_VIOLATION
    elif args.command == "init-sweep":
        rows, path = cmd_init_sweep(_config(args), args.sigmas, args.seeds)
        print(path)
    return EXIT_OK


def main(argv=None):
    try:
        return run(sys.argv[1:] if argv is None else argv)
    except ConfigError as exc:
        field = f" [{exc.field}]" if exc.field else ""
        print(f"error{field}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TrainingError as exc:
        print(f"training failed (last valid epoch {exc.last_valid_epoch}): {exc}", file=sys.stderr)
        return EXIT_TRAINING
    except MissingArtifactsError as exc:
        print(f"missing artifacts: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except SpectraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
