"""JSON-lines prediction server.

Protocol (one JSON object per line):

* On start the adapter writes a handshake
  ``{"hello": {"classes": <count>, "pad": "<pad>"}}``. If the model
  fails to load it writes ``{"fatal": "<message>"}`` and exits 1.
* Each request ``{"id": <int>, "batch": [[tokens], ...]}`` is answered
  with ``{"id": <same>, "probs": [[...], ...]}``, probabilities
  positionally aligned with the batch.
* A malformed or oversized request gets
  ``{"id": <id-or-null>, "error": "<message>"}`` and the loop continues.
* EOF on stdin ends the process with exit code 0.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .model import ModelLoadError, class_count, load_model

DEFAULT_PAD = "<pad>"


@dataclass(frozen=True)
class AdapterConfig:
    model_spec: str
    pad: str = DEFAULT_PAD
    batch_cap: int = 1024

    def __post_init__(self):
        if self.batch_cap < 1:
            raise ValueError("batch cap must be at least 1")


def _parse_request(line: str, cap: int):
    req = json.loads(line)
    if not isinstance(req, dict):
        raise ValueError("request must be a JSON object")
    if not isinstance(req.get("id"), int):
        raise ValueError("request is missing an integer 'id'")
    batch = req.get("batch")
    if not isinstance(batch, list) or not batch:
        raise ValueError("request is missing a non-empty 'batch'")
    if len(batch) > cap:
        raise ValueError(f"batch of {len(batch)} exceeds cap {cap}")
    for toks in batch:
        if (not isinstance(toks, list)
                or not all(isinstance(t, str) for t in toks)):
            raise ValueError("each batch entry must be a list of strings")
    return req["id"], batch


def serve(config: AdapterConfig, stdin=None, stdout=None) -> int:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout

    def emit(obj) -> None:
        stdout.write(json.dumps(obj) + "\n")
        stdout.flush()

    try:
        model = load_model(config.model_spec)
        classes = class_count(model)
        if classes < 2:
            raise ModelLoadError("model must define at least 2 classes")
    except ModelLoadError as e:
        emit({"fatal": str(e)})
        return 1

    emit({"hello": {"classes": classes, "pad": config.pad}})

    for line in stdin:
        if not line.strip():
            continue
        try:
            req_id, batch = _parse_request(line, config.batch_cap)
        except (json.JSONDecodeError, ValueError) as e:
            req_id = None
            try:
                maybe = json.loads(line)
                if isinstance(maybe, dict) and isinstance(maybe.get("id"), int):
                    req_id = maybe["id"]
            except json.JSONDecodeError:
                pass
            emit({"id": req_id, "error": str(e)})
            continue
        try:
            probs = [model.predict(toks, config.pad) for toks in batch]
        except Exception as e:  # noqa: BLE001 - surface, keep serving
            emit({"id": req_id, "error": f"model failure: {e}"})
            continue
        emit({"id": req_id, "probs": probs})
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="adapter",
        description="Serve a text classifier over JSON lines on stdin/stdout.")
    ap.add_argument("--model", required=True,
                    help="path to a .json logistic-regression file or "
                         "module:attribute")
    ap.add_argument("--pad", default=DEFAULT_PAD,
                    help="pad literal the caller masks with")
    ap.add_argument("--batch-cap", type=int, default=1024,
                    help="maximum sequences per request")
    args = ap.parse_args(argv)
    return serve(AdapterConfig(args.model, args.pad, args.batch_cap))


if __name__ == "__main__":
    sys.exit(main())
