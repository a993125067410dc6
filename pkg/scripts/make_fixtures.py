"""Regenerate the bundled fixture corpora (deterministic)."""

from pathlib import Path

from sketchparts.corpus import save_corpus
from sketchparts.synthetic import make_corpus

ROOT = Path(__file__).resolve().parent.parent / "data"


def main():
    ROOT.mkdir(exist_ok=True)
    save_corpus(make_corpus("birds", 100, seed=1000), ROOT / "birds_100.jsonl")
    save_corpus(make_corpus("creatures", 50, seed=2000), ROOT / "creatures_50.jsonl")
    print(f"fixtures written to {ROOT}")


if __name__ == "__main__":
    main()
