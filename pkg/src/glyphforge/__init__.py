"""glyphforge: differentiable trajectory rasterization and dual-modality glyph losses.

The package is organized around the closed-form math of a glyph
generator that treats a character as both a raster image and a writing
trajectory:

- :mod:`glyphforge.format6` - the six-field key-point trajectory model
  and its text format;
- :mod:`glyphforge.rasterizer` - unsigned distance fields, sigmoid
  rendering, and the out-of-glyph penalty with analytic gradients;
- :mod:`glyphforge.gmm` - the bivariate Gaussian-mixture coordinate
  head and control-label loss;
- :mod:`glyphforge.ifr` - double-attention recombination of image
  features under sequence guidance;
- :mod:`glyphforge.reprlearn` - distillation/restoration, contrastive,
  reconstruction, and style-classification losses;
- :mod:`glyphforge.losses` - pixel/Gram losses and weighted totals;
- :mod:`glyphforge.annotate` - pseudo connected-stroke labeling;
- :mod:`glyphforge.metrics` - MAE and DTW evaluation;
- :mod:`glyphforge.cli` - the ``glyphforge`` command.
"""

from .annotate import AnnotateConfig, pseudo_annotate
from .errors import GlyphforgeError
from .format6 import (
    Control,
    Point6,
    Segment,
    Trajectory,
    from_format5,
    parse_trajectory,
    serialize_trajectory,
    visible_segments,
)
from .gmm import (
    DEFAULT_COMPONENTS,
    GmmParams,
    activate,
    activate_sequence,
    density,
    loss_label,
    loss_point,
    loss_point_grad,
    sample,
)
from .ifr import IfrWeights, ImageFeatureMap, ifr_forward, layer_norm
from .losses import (
    LossWeights,
    combine_img,
    combine_seq,
    combine_total,
    gram,
    loss_gram,
    loss_pixel,
)
from .metrics import DtwResult, dtw, mae
from .pgm import read_pgm, write_pgm
from .rasterizer import (
    Grid,
    RenderParams,
    loss_diff,
    render,
    segment_distance,
    snap_fit,
    udf,
)
from .reprlearn import (
    DistillWeights,
    NceConfig,
    StyleClassifier,
    distill,
    loss_dml,
    loss_nce,
    loss_rec,
    mean_pool,
    restore,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotateConfig",
    "Control",
    "DEFAULT_COMPONENTS",
    "DistillWeights",
    "DtwResult",
    "GlyphforgeError",
    "GmmParams",
    "Grid",
    "IfrWeights",
    "ImageFeatureMap",
    "LossWeights",
    "NceConfig",
    "Point6",
    "RenderParams",
    "Segment",
    "StyleClassifier",
    "Trajectory",
    "activate",
    "activate_sequence",
    "combine_img",
    "combine_seq",
    "combine_total",
    "density",
    "distill",
    "dtw",
    "from_format5",
    "gram",
    "ifr_forward",
    "layer_norm",
    "loss_diff",
    "loss_dml",
    "loss_gram",
    "loss_label",
    "loss_nce",
    "loss_pixel",
    "loss_point",
    "loss_point_grad",
    "loss_rec",
    "mae",
    "mean_pool",
    "parse_trajectory",
    "pseudo_annotate",
    "read_pgm",
    "render",
    "restore",
    "sample",
    "segment_distance",
    "serialize_trajectory",
    "snap_fit",
    "udf",
    "visible_segments",
    "write_pgm",
]
