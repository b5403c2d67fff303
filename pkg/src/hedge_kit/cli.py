"""Command-line entry point: explanation runs, metric sweeps, and the
self-test suite.

Exit codes: 0 success, 2 usage/input error, 3 backend error, 4 internal
invariant violation. Deterministic artifacts embed the effective config
and a content hash of the input dataset; wall times go to a separate
timing.json so reruns stay byte-identical.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import TokenSequence, canonical_json
from .errors import (CapacityError, ConfigError, ContractError, HedgeError,
                     ProtocolError, TransportError)
from .hedge import explain, explain_bottom_up, to_dict
from .metrics import KNOWN_METHODS, cohesion, run_evaluation
from .predictor import DEFAULT_PAD, Predictor, build_predictor
from .render import RenderSpec, render
from . import shapley, synthetic

CONFIG_ENV = "HEDGE_KIT_CONFIG"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BACKEND = 3
EXIT_INTERNAL = 4


@dataclass
class Config:
    predictor: str = "builtin:demo"
    pad: str = DEFAULT_PAD
    m: int = 2
    k: list[float] = field(default_factory=lambda: [20.0])
    r: list[float] = field(default_factory=lambda: [20.0])
    q: int = 100
    samples: int = 100
    seed: int = 0
    exact_limit: int = 12
    max_len: int | None = 5
    variant: str = "top-down"
    render: str | None = None
    out: str = "out"
    workers: int = 1


def load_config(args: argparse.Namespace) -> Config:
    cfg = Config()
    path = os.environ.get(CONFIG_ENV)
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
        for key, value in data.items():
            if not hasattr(cfg, key):
                raise ConfigError(f"unknown config key {key!r}")
            setattr(cfg, key, value)
    for key in ("predictor", "pad", "m", "q", "samples", "seed", "exact_limit",
                "max_len", "variant", "render", "out", "workers"):
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, value)
    if getattr(args, "k", None):
        cfg.k = [float(v) for v in args.k]
    if getattr(args, "r", None):
        cfg.r = [float(v) for v in args.r]
    return cfg


def echo_config(cfg: Config) -> dict:
    """Effective config embedded into artifacts; omits fields that do
    not affect results (output location, worker-pool width) so reruns
    into different directories stay byte-identical."""
    d = asdict(cfg)
    d.pop("out")
    d.pop("workers")
    d["rng"] = "numpy-pcg64"
    return d


class DatasetError(Exception):
    pass


def load_dataset(path: str) -> tuple[list[str], list[TokenSequence], str]:
    """Parse a JSON-lines dataset; returns (ids, sequences, sha256)."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise DatasetError(f"cannot read dataset {path!r}: {exc}") from exc
    digest = hashlib.sha256(raw).hexdigest()
    ids, seqs = [], []
    for lineno, line in enumerate(raw.decode("utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            ids.append(str(obj["id"]))
            seqs.append(TokenSequence(str(t) for t in obj["tokens"]))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise DatasetError(f"{path}:{lineno}: bad example: {exc}") from exc
    if not seqs:
        raise DatasetError(f"{path}: dataset is empty")
    return ids, seqs, digest


def _atomic_write(path: str, data: bytes) -> None:
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def _fresh_predictor(cfg: Config) -> Predictor:
    return build_predictor(cfg.predictor, cfg.pad)


def _explain_one(cfg: Config, seq: TokenSequence, predictor: Predictor | None):
    own = predictor is None
    pred = _fresh_predictor(cfg) if own else predictor
    before = pred.evaluations
    fn = explain_bottom_up if cfg.variant == "bottom-up" else explain
    expl = fn(pred, seq, cfg.m)
    count = pred.evaluations - before
    if own:
        pred.close()
    return expl, count


def cmd_explain(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    ids, seqs, digest = load_dataset(args.dataset)
    os.makedirs(cfg.out, exist_ok=True)
    started = time.monotonic()
    builtin = cfg.predictor.startswith("builtin")
    shared = None if builtin else _fresh_predictor(cfg)
    try:
        if builtin and cfg.workers > 1:
            with concurrent.futures.ThreadPoolExecutor(cfg.workers) as pool:
                outcomes = list(pool.map(
                    lambda s: _explain_one(cfg, s, None), seqs))
        else:
            outcomes = [_explain_one(cfg, s, shared) for s in seqs]
    finally:
        if shared is not None:
            shared.close()
    entries = []
    for ex_id, (expl, count) in zip(ids, outcomes):
        doc = {"id": ex_id, "config": echo_config(cfg), "dataset_sha256": digest}
        doc.update(to_dict(expl))
        path = os.path.join(cfg.out, f"{ex_id}.json")
        _atomic_write(path, (canonical_json(doc) + "\n").encode("utf-8"))
        entry = {"id": ex_id, "file": os.path.basename(path),
                 "evaluations": count}
        if cfg.render:
            spec = RenderSpec(fmt=cfg.render)
            rpath = os.path.join(cfg.out, f"{ex_id}.{cfg.render}")
            _atomic_write(rpath, render(expl, spec))
            entry["render"] = os.path.basename(rpath)
        entries.append(entry)
    manifest = {"config": echo_config(cfg), "dataset_sha256": digest,
                "examples": entries}
    _atomic_write(os.path.join(cfg.out, "manifest.json"),
                  (canonical_json(manifest) + "\n").encode("utf-8"))
    timing = {"wall_time_s": time.monotonic() - started}
    _atomic_write(os.path.join(cfg.out, "timing.json"),
                  (json.dumps(timing) + "\n").encode("utf-8"))
    print(f"wrote {len(entries)} explanations to {cfg.out}")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    methods = args.methods
    unknown = [m for m in methods if m not in KNOWN_METHODS]
    if unknown:
        print(f"unknown methods: {', '.join(unknown)}", file=sys.stderr)
        return EXIT_USAGE
    ids, seqs, digest = load_dataset(args.dataset)
    os.makedirs(cfg.out, exist_ok=True)
    started = time.monotonic()
    predictor = _fresh_predictor(cfg)
    try:
        run = run_evaluation(predictor, seqs, methods, cfg.k, cfg.r, cfg.q,
                             cfg.samples, cfg.seed, cfg.m, cfg.max_len,
                             dataset_id=digest, predictor_spec=cfg.predictor)
    finally:
        predictor.close()
    report = {"config": echo_config(cfg), "dataset_sha256": digest,
              "ids": ids}
    report.update(run.to_dict())
    _atomic_write(os.path.join(cfg.out, "evalrun.json"),
                  (canonical_json(report) + "\n").encode("utf-8"))
    table = run.render_table()
    _atomic_write(os.path.join(cfg.out, "report.txt"), table.encode("utf-8"))
    timing = {"wall_time_s": time.monotonic() - started}
    _atomic_write(os.path.join(cfg.out, "timing.json"),
                  (json.dumps(timing) + "\n").encode("utf-8"))
    print(table, end="")
    return EXIT_OK


def cmd_selftest(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    rng = np.random.default_rng(cfg.seed)
    failures = 0

    def check(name: str, ok: bool) -> None:
        nonlocal failures
        print(f"[{'PASS' if ok else 'FAIL'}] {name}")
        if not ok:
            failures += 1

    predictor = _fresh_predictor(cfg)
    try:
        # efficiency axiom on the configured predictor
        ok = True
        for _ in range(5):
            seq = synthetic.random_sentence(rng, 8, int(rng.integers(2, 7)))
            label = predictor.predicted_label(seq)
            vals = shapley.exact_shapley_values(predictor, seq,
                                                cfg.exact_limit, label)
            full = predictor.predict_masked(seq, seq.all_indices()).probs[label]
            empty = predictor.predict_masked(seq, frozenset()).probs[label]
            if abs(sum(vals) - (full - empty)) > 1e-10:
                ok = False
        check("efficiency axiom (n <= 6)", ok)

        # exact-vs-approx interaction with full neighborhood
        ok = True
        for _ in range(5):
            seq = synthetic.random_sentence(rng, 8, int(rng.integers(3, 7)))
            expl = explain(predictor, seq, m=seq.n)
            p = expl.hierarchy.partitions[-1]
            for left, right in zip(p.spans, p.spans[1:]):
                ctx = shapley.InteractionContext(seq, p, left, right, m=seq.n)
                approx = shapley.interaction_score(predictor, ctx,
                                                   expl.predicted_class)
                exact = shapley.exact_interaction_score(
                    predictor, seq, p, left, right, expl.predicted_class,
                    cfg.exact_limit)
                if abs(approx - exact) > 1e-12:
                    ok = False
        check("exact vs approximate interaction", ok)
    except (TransportError, ProtocolError):
        raise
    except ContractError:
        raise
    finally:
        predictor.close()

    # bag-of-words cohesion zero holds for pure-unigram builtin models
    ok = True
    for _ in range(5):
        model = synthetic.random_model(rng, vocab_size=6, bigram_count=0)
        from .predictor import BuiltinBackend
        pred = Predictor(BuiltinBackend(model, cfg.pad), cfg.pad)
        seq = synthetic.random_sentence(rng, 6, int(rng.integers(2, 6)))
        expl = explain(pred, seq, cfg.m)
        res = cohesion(pred, [seq], [expl], q=10, max_len=cfg.max_len,
                       seed=cfg.seed)
        if abs(res.aggregate) > 1e-12:
            ok = False
    check("bag-of-words cohesion zero (unigram models)", ok)

    print("selftest:", "ok" if failures == 0 else f"{failures} failure(s)")
    return EXIT_OK if failures == 0 else EXIT_INTERNAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hedge-kit",
        description="Hierarchical explanations for black-box text classifiers")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--predictor",
                       help="builtin:<path>|builtin:demo|subprocess:<cmd>|http:<url>")
        p.add_argument("--pad")
        p.add_argument("--m", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--exact-limit", dest="exact_limit", type=int)
        p.add_argument("--out")
        p.add_argument("--workers", type=int)

    p_exp = sub.add_parser("explain", help="explain every dataset example")
    p_exp.add_argument("dataset")
    p_exp.add_argument("--variant", choices=["top-down", "bottom-up"])
    p_exp.add_argument("--render", choices=["html", "svg", "json"])
    add_common(p_exp)
    p_exp.set_defaults(func=cmd_explain)

    p_eval = sub.add_parser("evaluate", help="metric sweep over methods")
    p_eval.add_argument("dataset")
    p_eval.add_argument("--methods", nargs="+", default=["hedge", "random"])
    p_eval.add_argument("--k", action="append", type=float)
    p_eval.add_argument("--r", action="append", type=float)
    p_eval.add_argument("--q", type=int)
    p_eval.add_argument("--samples", type=int)
    p_eval.add_argument("--max-len", dest="max_len", type=int)
    add_common(p_eval)
    p_eval.set_defaults(func=cmd_evaluate)

    p_self = sub.add_parser("selftest", help="oracle-equivalence and axiom checks")
    add_common(p_self)
    p_self.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DatasetError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TransportError, ProtocolError, ContractError) as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except (CapacityError, HedgeError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
