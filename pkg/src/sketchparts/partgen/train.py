"""Adversarial training loop for one part generator."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch

from .. import datasets as ds
from ..errors import NumericError
from ..nn import Adam
from ..sketch import Sketch
from .bundle import PartGeneratorBundle
from .config import GeneratorConfig, default_config, regime_for
from .data import PairSampler, disc_input_tensor
from .losses import gan_losses, r1_penalty, sparsity_loss


def train_part_generator(
    corpus: list[Sketch],
    label: str,
    cfg: GeneratorConfig | None = None,
    seed: int = 0,
    out_dir=None,
    log_every: int = 0,
) -> PartGeneratorBundle:
    """Train the conditional generator for one part label.

    Alternates one discriminator and one generator Adam step per
    iteration; R1 regularization runs lazily every ``cfg.r1_interval``
    steps, and the sparsity term joins the generator loss at
    ``cfg.sparsity_weight``.  Checkpoints land in ``out_dir`` every
    ``cfg.checkpoint_every`` steps.  Per-step losses are kept on the
    returned bundle's ``history``.
    """
    dataset = corpus[0].dataset if corpus else ds.BIRDS
    if cfg is None:
        cfg = default_config(dataset)
    torch.manual_seed(seed)
    rng = np.random.default_rng(seed)
    sampler = PairSampler(
        corpus, label, regime_for(dataset, label), cfg.size, cfg.use_part_channels, rng
    )
    bundle = PartGeneratorBundle.initialize(dataset, label, cfg)
    bundle.init_ema()
    slot_idx = sampler.slot_idx

    opt_g = Adam([*bundle.generator.parameters(), *bundle.encoder.parameters()], cfg.lr)
    opt_d = Adam(bundle.discriminator.parameters(), cfg.lr)

    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)

    for step in range(1, cfg.steps + 1):
        cond, real = sampler.sample_batch(cfg.batch_size)
        z = torch.from_numpy(rng.standard_normal((cfg.batch_size, cfg.latent_dim)).astype(np.float32))

        feats = bundle.encoder(cond)
        fake = bundle.generator(z, feats)

        # Discriminator step (generator frozen via detach).
        real_in = disc_input_tensor(cond, real, slot_idx)
        run_r1 = cfg.r1_interval > 0 and step % cfg.r1_interval == 0
        if run_r1:
            real_in = real_in.requires_grad_(True)
        d_real = bundle.discriminator(real_in)
        d_fake = bundle.discriminator(disc_input_tensor(cond, fake.detach(), slot_idx))
        r1 = r1_penalty(d_real, real_in) if run_r1 else None
        loss_d, _ = gan_losses(d_real, d_fake, r1=r1, r1_gamma=cfg.r1_gamma)
        opt_d.zero_grad()
        loss_d.backward()
        opt_d.step()

        # Generator step.
        d_fake_g = bundle.discriminator(disc_input_tensor(cond, fake, slot_idx))
        sparsity = sparsity_loss(fake, real)
        _, loss_g = gan_losses(
            d_real.detach(), d_fake_g, sparsity=sparsity, sparsity_weight=cfg.sparsity_weight
        )
        opt_g.zero_grad()
        loss_g.backward()
        opt_g.step()
        bundle.update_ema()

        ld, lg = loss_d.detach().item(), loss_g.detach().item()
        if not (np.isfinite(ld) and np.isfinite(lg)):
            raise NumericError(f"non-finite loss at step {step}: D={ld}, G={lg}")
        bundle.history.append({"step": step, "loss_d": ld, "loss_g": lg,
                               "sparsity": sparsity.detach().item(),
                               "gen_cover": fake.detach().mean().item(),
                               "real_cover": real.mean().item()})
        bundle.step = step

        if log_every and step % log_every == 0:
            print(f"[{dataset}/{label}] step {step}: loss_d={ld:.4f} loss_g={lg:.4f}")
        if out_dir is not None and step % cfg.checkpoint_every == 0:
            bundle.save(out_dir / f"{label}_step{step:06d}.ckpt")

    if out_dir is not None:
        bundle.save(out_dir / f"{label}.ckpt")
    return bundle
