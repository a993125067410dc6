"""Read-only model registry: load bundles once, share across callers.

Directory layout: ``<root>/<dataset>/<part>.ckpt`` for part generators
and ``<root>/<dataset>/selector.ckpt`` for the selector.  Loaded bundles
are immutable and safe for concurrent inference.
"""

from __future__ import annotations

from pathlib import Path

from . import datasets as ds
from .errors import ModelNotLoaded
from .partgen import PartGeneratorBundle
from .selector import SelectorBundle


class ModelRegistry:
    def __init__(self, root) -> None:
        self.root = Path(root)
        self.generators: dict[str, dict[str, PartGeneratorBundle]] = {}
        self.selectors: dict[str, SelectorBundle] = {}
        for dataset in ds.DATASETS:
            folder = self.root / dataset
            if not folder.is_dir():
                continue
            bundles = {}
            for ckpt in sorted(folder.glob("*.ckpt")):
                if ckpt.stem == "selector":
                    self.selectors[dataset] = SelectorBundle.load(ckpt)
                else:
                    bundle = PartGeneratorBundle.load(ckpt)
                    bundles[bundle.part] = bundle
            if bundles:
                self.generators[dataset] = bundles

    def has_dataset(self, dataset: str) -> bool:
        return dataset in self.generators and dataset in self.selectors

    def generator(self, dataset: str, part: str) -> PartGeneratorBundle:
        try:
            return self.generators[dataset][part]
        except KeyError:
            raise ModelNotLoaded(f"no generator bundle for {dataset}/{part}") from None

    def selector(self, dataset: str) -> SelectorBundle:
        try:
            return self.selectors[dataset]
        except KeyError:
            raise ModelNotLoaded(f"no selector bundle for {dataset}") from None
