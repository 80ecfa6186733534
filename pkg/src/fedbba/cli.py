"""Command-line surface: config files, scenario presets, CSV/summary output.

Subcommands:
  run          full experiment -> rounds.csv + summary.json + manifest.txt
  sensitivity  alpha/beta grid -> sensitivity.csv + manifest.txt
  separation   pursuit-vs-PCA score sets -> mkpp_scores.csv, pca_scores.csv,
               summary.json, manifest.txt
  certify      saddle-point grid certification -> certificate.json

Config files are TOML with one section per component; unknown sections or
keys are rejected by name. Everything an invocation resolves (config, seed,
output dir, version) lands in the manifest, and outputs are byte-stable for
equal inputs.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

import numpy as np

from . import __version__
from .attacks import (
    AttackFamily,
    AttackPlan,
    InjectionStrategy,
    TriggerSpec,
    default_plan,
    row_trigger,
)
from .clustering import DbscanParams, silhouette
from .datamodel import TrainConfig
from .engine import (
    DatasetConfig,
    Defense,
    ExperimentConfig,
    run_experiment,
)
from .errors import FedbbaError, InvalidConfig
from .game import GameParams, verify_saddle
from .mkpp import MkppConfig, SearchDirection, StepVariant, mkpp, pca_scores
from .numerics import RngStream
from .reputation import ReputationParams

logger = logging.getLogger(__name__)

_SEPARATION_SCORE_STREAM = 300_000

_KNOWN_KEYS = {
    "experiment": {
        "total_clients", "per_round", "malicious_fraction", "rounds", "defense", "seed",
    },
    "dataset": {
        "classes", "height", "width", "noise_sigma", "pool_per_class",
        "test_per_class", "classes_per_client", "samples_per_class",
    },
    "training": {"learning_rate", "epochs", "batch_size"},
    "attack": {
        "family", "strategy", "rho", "triggers", "target_labels",
        "replacement_round", "boost",
    },
    "reputation": {
        "alpha", "beta", "gamma", "delta", "window", "initial", "max",
        "probation_rounds",
    },
    "game": {"theta", "lambda_min", "lambda_max", "r_max"},
    "mkpp": {"components", "guesses", "max_min", "st_sh", "maxcount", "tol"},
    "dbscan": {"eps", "min_pts"},
}


def _check_keys(raw: dict, path: str) -> None:
    for section, body in raw.items():
        if section not in _KNOWN_KEYS:
            raise InvalidConfig(f"{path}: unknown section [{section}]")
        if not isinstance(body, dict):
            raise InvalidConfig(f"{path}: [{section}] must be a table")
        for key in body:
            if key not in _KNOWN_KEYS[section]:
                raise InvalidConfig(f"{path}: unknown key {section}.{key}")


def _pair(value, name: str) -> tuple[int, int]:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(v, int) for v in value)
    ):
        raise InvalidConfig(f"config: {name} must be a pair of integers")
    return int(value[0]), int(value[1])


def parse_trigger(text: str, width: int) -> TriggerSpec:
    """Compact trigger form: "row:<index>:<intensity>" or "pixels:i,j,k:<intensity>"."""
    parts = text.split(":")
    if len(parts) != 3:
        raise InvalidConfig(f"config: bad trigger spec {text!r}")
    kind, body, intensity = parts
    try:
        level = float(intensity)
    except ValueError as exc:
        raise InvalidConfig(f"config: bad trigger intensity in {text!r}") from exc
    try:
        if kind == "row":
            return row_trigger(int(body), width, level)
        if kind == "pixels":
            return TriggerSpec(
                mask=tuple(int(v) for v in body.split(",")), intensity=level
            )
    except ValueError as exc:
        raise InvalidConfig(f"config: bad trigger body in {text!r}") from exc
    raise InvalidConfig(f"config: unknown trigger kind {kind!r} in {text!r}")


def format_trigger(trigger: TriggerSpec, width: int) -> str:
    mask = trigger.mask
    if (
        len(mask) == width
        and mask[0] % width == 0
        and mask == tuple(range(mask[0], mask[0] + width))
    ):
        return f"row:{mask[0] // width}:{trigger.intensity!r}"
    return "pixels:" + ",".join(str(i) for i in mask) + f":{trigger.intensity!r}"


def _build_attack(section: dict, dataset: DatasetConfig) -> AttackPlan | None:
    family_name = section.get("family", "one_to_one")
    if family_name == "none":
        return None
    try:
        family = AttackFamily(family_name)
    except ValueError as exc:
        raise InvalidConfig(f"config: attack.family {family_name!r} unknown") from exc
    try:
        strategy = InjectionStrategy(section.get("strategy", "multi_round"))
    except ValueError as exc:
        raise InvalidConfig(
            f"config: attack.strategy {section.get('strategy')!r} unknown"
        ) from exc
    rho_raw = section.get("rho", 0.5)
    if rho_raw == "adaptive":
        rho = None
    elif isinstance(rho_raw, (int, float)):
        rho = float(rho_raw)
    else:
        raise InvalidConfig("config: attack.rho must be a number or 'adaptive'")

    plan = default_plan(family, dataset.width, dataset.height, strategy=strategy, rho=rho)
    triggers = section.get("triggers")
    targets = section.get("target_labels")
    if (triggers is None) != (targets is None):
        raise InvalidConfig(
            "config: attack.triggers and attack.target_labels go together"
        )
    if triggers is not None:
        specs = [parse_trigger(t, dataset.width) for t in triggers]
        plan = AttackPlan(
            family=family,
            triggers=specs,
            target_labels=[int(t) for t in targets],
            strategy=strategy,
            rho=rho,
        )
    extra = {}
    if "replacement_round" in section:
        extra["replacement_round"] = int(section["replacement_round"])
    if "boost" in section:
        extra["boost"] = float(section["boost"])
    if extra:
        plan = replace(plan, **extra)
    return plan


def config_from_dict(raw: dict, path: str = "config") -> ExperimentConfig:
    """Build a validated ExperimentConfig from parsed TOML data."""
    _check_keys(raw, path)
    d = raw.get("dataset", {})
    dataset = DatasetConfig(
        n_classes=int(d.get("classes", 10)),
        height=int(d.get("height", 8)),
        width=int(d.get("width", 8)),
        noise_sigma=float(d.get("noise_sigma", 0.05)),
        pool_per_class=int(d.get("pool_per_class", 100)),
        test_per_class=int(d.get("test_per_class", 50)),
        classes_per_client=_pair(
            d.get("classes_per_client", [4, 6]), "dataset.classes_per_client"
        ),
        samples_per_class=_pair(
            d.get("samples_per_class", [30, 34]), "dataset.samples_per_class"
        ),
    )
    t = raw.get("training", {})
    training = TrainConfig(
        learning_rate=float(t.get("learning_rate", 0.3)),
        epochs=int(t.get("epochs", 2)),
        batch_size=int(t.get("batch_size", 32)),
    )
    r = raw.get("reputation", {})
    reputation = ReputationParams(
        alpha=float(r.get("alpha", 0.5)),
        beta=float(r.get("beta", 0.5)),
        gamma=float(r.get("gamma", 0.05)),
        delta=float(r.get("delta", 0.5)),
        window=int(r.get("window", 5)),
        initial=float(r.get("initial", 0.5)),
        r_max=float(r.get("max", 1.0)),
        probation_rounds=int(r.get("probation_rounds", 2)),
    )
    g = raw.get("game", {})
    game = GameParams(
        theta=float(g.get("theta", 0.5)),
        lambda_min=float(g.get("lambda_min", 0.75)),
        lambda_max=float(g.get("lambda_max", 1.0)),
        r_max=float(g.get("r_max", 1.0)),
    )
    m = raw.get("mkpp", {})
    try:
        max_min = SearchDirection(m.get("max_min", "maximize"))
        st_sh = StepVariant(m.get("st_sh", "standard"))
    except ValueError as exc:
        raise InvalidConfig(f"config: bad mkpp.max_min or mkpp.st_sh: {exc}") from exc
    mkpp_cfg = MkppConfig(
        p=int(m.get("components", 2)),
        guess=int(m.get("guesses", 8)),
        max_min=max_min,
        st_sh=st_sh,
        maxcount=int(m.get("maxcount", 1000)),
        tol=float(m.get("tol", 1e-6)),
    )
    db = raw.get("dbscan", {})
    dbscan_cfg = DbscanParams(
        eps=float(db.get("eps", 0.6)), min_pts=int(db.get("min_pts", 5))
    )
    e = raw.get("experiment", {})
    try:
        defense = Defense(e.get("defense", "fedbba"))
    except ValueError as exc:
        raise InvalidConfig(
            f"config: experiment.defense {e.get('defense')!r} unknown"
        ) from exc
    return ExperimentConfig(
        total_clients=int(e.get("total_clients", 60)),
        per_round=int(e.get("per_round", 20)),
        malicious_fraction=float(e.get("malicious_fraction", 0.3)),
        rounds=int(e.get("rounds", 40)),
        defense=defense,
        attack=_build_attack(raw.get("attack", {}), dataset),
        dataset=dataset,
        training=training,
        reputation=reputation,
        game=game,
        mkpp=mkpp_cfg,
        dbscan=dbscan_cfg,
        seed=int(e.get("seed", 0)),
    )


def parse_config(path) -> ExperimentConfig:
    """Load and validate a TOML experiment config."""
    p = Path(path)
    if not p.is_file():
        raise InvalidConfig(f"config file not found: {p}")
    with open(p, "rb") as fh:
        try:
            raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise InvalidConfig(f"{p}: not valid TOML: {exc}") from exc
    return config_from_dict(raw, str(p))


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility record: everything one invocation resolved.

    Constructing the ExperimentConfig already ran every component
    validation, so a manifest only ever describes a runnable setup.
    """

    config_path: str
    config: ExperimentConfig
    seed: int
    output_dir: str
    version: str = __version__

    def lines(self) -> list[str]:
        return manifest_lines(self.config, self.config_path, self.output_dir)

    def write(self, path) -> None:
        _write_manifest(path, self.lines())


def manifest_lines(cfg: ExperimentConfig, config_path: str, out_dir: str) -> list[str]:
    """Flat `section.key = value` listing of the fully resolved run."""
    lines = [
        f"fedbba_version = {__version__}",
        f"config_path = {config_path}",
        f"output_dir = {out_dir}",
        f"experiment.seed = {cfg.seed}",
        f"experiment.total_clients = {cfg.total_clients}",
        f"experiment.per_round = {cfg.per_round}",
        f"experiment.malicious_fraction = {cfg.malicious_fraction!r}",
        f"experiment.rounds = {cfg.rounds}",
        f"experiment.defense = {cfg.defense.value}",
        f"dataset.classes = {cfg.dataset.n_classes}",
        f"dataset.height = {cfg.dataset.height}",
        f"dataset.width = {cfg.dataset.width}",
        f"dataset.noise_sigma = {cfg.dataset.noise_sigma!r}",
        f"dataset.pool_per_class = {cfg.dataset.pool_per_class}",
        f"dataset.test_per_class = {cfg.dataset.test_per_class}",
        f"dataset.classes_per_client = {list(cfg.dataset.classes_per_client)}",
        f"dataset.samples_per_class = {list(cfg.dataset.samples_per_class)}",
        f"training.learning_rate = {cfg.training.learning_rate!r}",
        f"training.epochs = {cfg.training.epochs}",
        f"training.batch_size = {cfg.training.batch_size}",
        f"reputation.alpha = {cfg.reputation.alpha!r}",
        f"reputation.beta = {cfg.reputation.beta!r}",
        f"reputation.gamma = {cfg.reputation.gamma!r}",
        f"reputation.delta = {cfg.reputation.delta!r}",
        f"reputation.window = {cfg.reputation.window}",
        f"reputation.initial = {cfg.reputation.initial!r}",
        f"reputation.max = {cfg.reputation.r_max!r}",
        f"reputation.probation_rounds = {cfg.reputation.probation_rounds}",
        f"game.theta = {cfg.game.theta!r}",
        f"game.lambda_min = {cfg.game.lambda_min!r}",
        f"game.lambda_max = {cfg.game.lambda_max!r}",
        f"game.r_max = {cfg.game.r_max!r}",
        f"mkpp.components = {cfg.mkpp.p}",
        f"mkpp.guesses = {cfg.mkpp.guess}",
        f"mkpp.max_min = {cfg.mkpp.max_min.value}",
        f"mkpp.st_sh = {cfg.mkpp.st_sh.value}",
        f"mkpp.maxcount = {cfg.mkpp.maxcount}",
        f"mkpp.tol = {cfg.mkpp.tol!r}",
        f"dbscan.eps = {cfg.dbscan.eps!r}",
        f"dbscan.min_pts = {cfg.dbscan.min_pts}",
    ]
    if cfg.attack is None:
        lines.append("attack.family = none")
    else:
        a = cfg.attack
        lines.append(f"attack.family = {a.family.value}")
        lines.append(f"attack.strategy = {a.strategy.value}")
        lines.append(f"attack.rho = {'adaptive' if a.rho is None else repr(a.rho)}")
        lines.append(
            "attack.triggers = "
            + ", ".join(format_trigger(t, cfg.dataset.width) for t in a.triggers)
        )
        lines.append(
            "attack.target_labels = " + ", ".join(str(t) for t in a.target_labels)
        )
        if a.replacement_round is not None:
            lines.append(f"attack.replacement_round = {a.replacement_round}")
        if a.boost is not None:
            lines.append(f"attack.boost = {a.boost!r}")
    return lines


class _OutputSet:
    """Tracks files written by one invocation so failures leave no debris."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.written: list[Path] = []

    def path(self, name: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        p = self.out_dir / name
        self.written.append(p)
        return p

    def discard(self) -> None:
        for p in self.written:
            try:
                p.unlink()
            except OSError:
                pass


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_rounds_csv(path, reports, p_components: int) -> None:
    """Wide per-round CSV: metrics, then one column group per client slot."""
    n_clients = len(reports[0].clients)
    header = ["round", "clean_accuracy", "asr"]
    for j in range(n_clients):
        header += [f"c{j}_client_id", f"c{j}_is_malicious", f"c{j}_weight",
                   f"c{j}_reputation"]
        header += [f"c{j}_score_{k}" for k in range(p_components)]
        header += [f"c{j}_cluster", f"c{j}_flagged"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for rep in reports:
            row = [rep.round_index, _fmt(rep.clean_accuracy), _fmt(rep.attack_success_rate)]
            for c in rep.clients:
                row += [c.client_id, _fmt(c.is_malicious), _fmt(c.weight), _fmt(c.reputation)]
                row += [_fmt(v) for v in c.scores]
                row += [c.cluster, _fmt(c.flagged)]
            writer.writerow(row)


def _write_json(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _write_manifest(path, lines: list[str]) -> None:
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _load_base_config(args) -> tuple[ExperimentConfig, str]:
    if args.config:
        cfg = parse_config(args.config)
        source = str(args.config)
    else:
        cfg = config_from_dict({})
        source = "defaults"
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if getattr(args, "defense", None):
        cfg = replace(cfg, defense=Defense(args.defense))
    if getattr(args, "attack", None):
        plan = default_plan(
            AttackFamily(args.attack),
            cfg.dataset.width,
            cfg.dataset.height,
            strategy=cfg.attack.strategy if cfg.attack else InjectionStrategy.MULTI_ROUND,
            rho=cfg.attack.rho if cfg.attack else 0.5,
        )
        cfg = replace(cfg, attack=plan)
    if getattr(args, "strategy", None):
        if cfg.attack is None:
            raise InvalidConfig("--strategy given but the attack family is none")
        cfg = replace(
            cfg, attack=replace(cfg.attack, strategy=InjectionStrategy(args.strategy))
        )
    return cfg, source


def cmd_run(args) -> int:
    cfg, source = _load_base_config(args)
    out = _OutputSet(Path(args.out))
    try:
        result = run_experiment(cfg)
        write_rounds_csv(out.path("rounds.csv"), result.reports, cfg.mkpp.p)
        summary = dict(result.summary)
        summary["fedbba_version"] = __version__
        _write_json(out.path("summary.json"), summary)
        RunManifest(source, cfg, cfg.seed, args.out).write(out.path("manifest.txt"))
    except Exception:
        out.discard()
        raise
    print(f"run complete: final_accuracy={result.summary['final_accuracy']:.4f} "
          f"final_asr={result.summary['final_asr']:.4f} -> {args.out}")
    return 0


def sensitivity_base_config(seed: int) -> ExperimentConfig:
    """Grid preset: the defense held at the deterrence boundary.

    At lambda = (r_max + theta) / 2 the weight suppression of a flagged
    client is carried by its reputation, which is what the alpha/beta mix
    controls; larger lambdas let the per-round anomaly term mask the
    reputation channel entirely and every grid row degenerates to zero.
    """
    base = config_from_dict({})
    return replace(
        base,
        rounds=25,
        seed=seed,
        game=GameParams(theta=0.5, lambda_min=0.75, lambda_max=0.75),
    )


def cmd_sensitivity(args) -> int:
    if args.config:
        base = parse_config(args.config)
        if args.seed is not None:
            base = replace(base, seed=args.seed)
        source = str(args.config)
    else:
        base = sensitivity_base_config(args.seed if args.seed is not None else 0)
        source = "sensitivity-preset"
    out = _OutputSet(Path(args.out))
    try:
        rows = []
        for step in range(1, 10):
            alpha = round(0.1 * step, 1)
            beta = round(1.0 - alpha, 1)
            cfg = replace(
                base,
                reputation=replace(base.reputation, alpha=alpha, beta=beta),
            )
            result = run_experiment(cfg)
            rows.append(
                (
                    alpha,
                    beta,
                    result.summary["accuracy_last5_mean"],
                    result.summary["asr_last5_mean"],
                )
            )
            logger.info("sensitivity alpha=%.1f asr=%.4f", alpha, rows[-1][3])
        with open(out.path("sensitivity.csv"), "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["alpha", "beta", "accuracy", "asr"])
            for alpha, beta, acc, asr in rows:
                writer.writerow([_fmt(alpha), _fmt(beta), _fmt(acc), _fmt(asr)])
        RunManifest(source, base, base.seed, args.out).write(out.path("manifest.txt"))
    except Exception:
        out.discard()
        raise
    print(f"sensitivity grid written: 9 rows -> {args.out}")
    return 0


def separation_config(seed: int) -> ExperimentConfig:
    """Score-separation preset: all clients participate, no defense, so the
    final round's updates carry an established backdoor signature."""
    base = config_from_dict({})
    return replace(
        base,
        defense=Defense.VANILLA,
        total_clients=30,
        per_round=30,
        malicious_fraction=1.0 / 3.0,
        rounds=30,
        seed=seed,
    )


def cmd_separation(args) -> int:
    if args.config:
        cfg = parse_config(args.config)
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        source = str(args.config)
    else:
        cfg = separation_config(args.seed if args.seed is not None else 0)
        source = "separation-preset"
    out = _OutputSet(Path(args.out))
    try:
        result = run_experiment(cfg)
        updates = result.state.last_updates
        selected = result.state.last_selected
        truth = np.array(
            [int(c) in result.state.malicious for c in selected], dtype=int
        )
        mk = mkpp(updates, cfg.mkpp, RngStream(cfg.seed, _SEPARATION_SCORE_STREAM))
        pc = pca_scores(updates, cfg.mkpp.p)

        for name, scores in (("mkpp_scores.csv", mk.scores), ("pca_scores.csv", pc)):
            with open(out.path(name), "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(
                    ["client_id", "is_malicious"]
                    + [f"score_{k}" for k in range(scores.shape[1])]
                )
                for cid, mal, row in zip(selected, truth, scores):
                    writer.writerow([int(cid), int(mal)] + [_fmt(v) for v in row])

        summary = {
            "fedbba_version": __version__,
            "seed": cfg.seed,
            "silhouette_mkpp": silhouette(mk.scores, truth),
            "silhouette_pca": silhouette(pc, truth),
            "final_accuracy": result.summary["final_accuracy"],
            "final_asr": result.summary["final_asr"],
        }
        _write_json(out.path("summary.json"), summary)
        RunManifest(source, cfg, cfg.seed, args.out).write(out.path("manifest.txt"))
    except Exception:
        out.discard()
        raise
    print(
        f"separation written: silhouette mkpp={summary['silhouette_mkpp']:.3f} "
        f"pca={summary['silhouette_pca']:.3f} -> {args.out}"
    )
    return 0


def cmd_certify(args) -> int:
    if args.config:
        cfg = parse_config(args.config)
        params = cfg.game
        source = str(args.config)
    else:
        params = GameParams()
        source = "defaults"
    reputations = [0.5] * args.population
    out = _OutputSet(Path(args.out))
    try:
        report = verify_saddle(params, reputations, grid_step=args.grid_step)
        payload = report.to_dict()
        payload["fedbba_version"] = __version__
        payload["reputations"] = reputations
        payload["config_path"] = source
        payload["game_params"] = {
            "theta": params.theta,
            "lambda_min": params.lambda_min,
            "lambda_max": params.lambda_max,
            "r_max": params.r_max,
        }
        _write_json(out.path("certificate.json"), payload)
    except Exception:
        out.discard()
        raise
    verdict = "PASS" if report.passed else "FAIL"
    print(
        f"saddle certification: {verdict} "
        f"(lambda*={report.lambda_star!r}, worst adversary violation "
        f"{report.worst_adversary_violation:.2e}, worst server violation "
        f"{report.worst_server_violation:.2e})"
    )
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fedbba",
        description="Desk-scale federated learning lab with backdoor attacks "
        "and a pursuit/reputation/minimax defense.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_overrides=True):
        p.add_argument("--config", default=None, help="TOML config path")
        p.add_argument("--seed", type=int, default=None, help="master seed override")
        p.add_argument("--out", required=True, help="output directory")
        if with_overrides:
            p.add_argument("--defense", choices=[d.value for d in Defense])
            p.add_argument("--attack", choices=[f.value for f in AttackFamily])
            p.add_argument(
                "--strategy", choices=[s.value for s in InjectionStrategy]
            )

    run_p = sub.add_parser("run", help="full experiment")
    common(run_p)
    run_p.set_defaults(func=cmd_run)

    sens_p = sub.add_parser("sensitivity", help="alpha/beta grid")
    common(sens_p, with_overrides=False)
    sens_p.set_defaults(func=cmd_sensitivity)

    sep_p = sub.add_parser("separation", help="pursuit-vs-PCA score experiment")
    common(sep_p, with_overrides=False)
    sep_p.set_defaults(func=cmd_separation)

    cert_p = sub.add_parser("certify", help="saddle-point grid certification")
    cert_p.add_argument("--config", default=None, help="TOML config path")
    cert_p.add_argument("--out", required=True, help="output directory")
    cert_p.add_argument("--grid-step", type=float, default=0.01)
    cert_p.add_argument(
        "--population", type=int, default=10, help="clients in the certification game"
    )
    cert_p.set_defaults(func=cmd_certify)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("FEDBBA_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FedbbaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
