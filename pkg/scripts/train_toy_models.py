"""Train small real models on the bundled fixture corpus.

Produces a model directory usable by `sketchparts generate` and
`sketchparts serve`.  Takes roughly an hour of CPU at the default step
counts; trim --steps for a quick pass.
"""

import argparse
from pathlib import Path

from sketchparts import datasets as ds
from sketchparts.corpus import load_corpus
from sketchparts.partgen import train_part_generator
from sketchparts.selector import train_selector
from sketchparts.synthetic import toy_generator_config, toy_selector_config


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--corpus", default="data/birds_100.jsonl")
    parser.add_argument("--dataset", default=ds.BIRDS, choices=list(ds.DATASETS))
    parser.add_argument("--out", default="models/toy")
    parser.add_argument("--steps", type=int, default=1500)
    parser.add_argument("--epochs", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    corpus = load_corpus(args.corpus)
    out = Path(args.out) / args.dataset
    out.mkdir(parents=True, exist_ok=True)

    labels = [ds.EYE] + [
        label for label in ds.vocabulary(args.dataset)
        if any(label in s.drawn_labels() for s in corpus)
    ]
    cfg = toy_generator_config(steps=args.steps, r1_gamma=160.0)
    for label in labels:
        print(f"== training {args.dataset}/{label} for {cfg.steps} steps")
        bundle = train_part_generator(corpus, label, cfg, seed=args.seed, log_every=250)
        bundle.save(out / f"{label}.ckpt")

    print("== training selector")
    sel_cfg = toy_selector_config(epochs=args.epochs, lr=5e-3, batch_size=64)
    selector = train_selector(corpus, sel_cfg, seed=args.seed,
                              out_path=out / "selector.ckpt")
    print(f"selector held-out accuracy: {selector.test_accuracy:.3f}")
    print(f"models written to {out}")


if __name__ == "__main__":
    main()
