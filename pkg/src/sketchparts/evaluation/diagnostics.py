"""Geometric diagnostics on generated channel stacks."""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .. import datasets as ds
from ..errors import EmptyGeometry
from ..sketch import PartChannelImage

INK_THRESHOLD = 0.5


def head_surrounds_eye(channels: PartChannelImage, threshold: float = INK_THRESHOLD) -> bool:
    """Whether the eye centroid lies inside a region enclosed by the head.

    Flood-fills the background (non-head pixels, 4-connected) from the
    raster border; the eye's intensity centroid counts as surrounded when
    its pixel cannot be reached from the border, i.e. it sits in an
    enclosed pocket or on the head stroke itself.  An open arc encloses
    nothing, so everything is reachable and the answer is False.
    """
    eye = channels.slot(ds.EYE)
    if eye.sum() <= 0:
        raise EmptyGeometry("eye channel is empty")
    head = channels.slot("head") > threshold

    h, w = eye.shape
    ys, xs = np.mgrid[0:h, 0:w]
    total = eye.sum()
    cy = int(round(float((ys * eye).sum() / total)))
    cx = int(round(float((xs * eye).sum() / total)))
    cy, cx = min(max(cy, 0), h - 1), min(max(cx, 0), w - 1)

    background, _ = ndimage.label(~head)  # 4-connectivity by default
    border_regions = set(np.unique(background[0, :])) | set(np.unique(background[-1, :]))
    border_regions |= set(np.unique(background[:, 0])) | set(np.unique(background[:, -1]))
    border_regions.discard(0)  # label 0 is the head mask itself

    region = background[cy, cx]
    if region == 0:
        return True
    return region not in border_regions
