#!/usr/bin/env python3
"""Explain one sentence and write the hierarchy heatmap to a file.

By default uses the bundled demo sentiment model and the sentence
"a not bad movie", whose negated phrase only scores positive when the
two words stay together.

Usage:
    python3 scripts/render_example.py --out hierarchy.html
    python3 scripts/render_example.py --tokens this movie is good --fmt svg
"""
import argparse
import pathlib

from hedge_kit.hedge import explain, explain_bottom_up, top_feature
from hedge_kit.predictor import build_predictor
from hedge_kit.render import RenderSpec, render


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tokens", nargs="+",
                    default=["a", "not", "bad", "movie"])
    ap.add_argument("--predictor", default="builtin:demo")
    ap.add_argument("--variant", choices=["top-down", "bottom-up"],
                    default="top-down")
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--fmt", choices=["html", "svg", "json"], default="html")
    ap.add_argument("--palette", default="red-green")
    ap.add_argument("--out", default="hierarchy.html")
    args = ap.parse_args()

    from hedge_kit.core import TokenSequence
    predictor = build_predictor(args.predictor)
    seq = TokenSequence(args.tokens)
    fn = explain if args.variant == "top-down" else explain_bottom_up
    expl = fn(predictor, seq, m=args.m)

    doc = render(expl, RenderSpec(fmt=args.fmt, palette=args.palette))
    pathlib.Path(args.out).write_bytes(doc)

    feat = top_feature(expl, max_len=5)
    phrase = " ".join(seq.tokens[feat.span.start:feat.span.end])
    print(f"predicted class: {expl.predicted_class}")
    print(f"top feature: {phrase!r} (score {feat.score:+.4f})")
    print(f"wrote {args.out} ({predictor.evaluations} predictor calls)")
    predictor.close()


if __name__ == "__main__":
    main()
