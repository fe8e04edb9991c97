"""Desk-scale lab for adversarial generative training on synthetic data.

Everything heavy runs in the native extension; experiments are described by
the same sectioned config text the command-line tool reads.  Typical use:

    import ganlab

    cfg = '''
    [experiment]
    seed = 1
    [data]
    kind = "gaussian1d"
    [train]
    algorithm = "vanilla"
    steps = 500
    '''
    model = ganlab.train(cfg)
    fake = model.sample(1000, seed=7)
    print(ganlab.evaluate(fake, cfg))
"""

from ._ganlab import (
    DenoiserModel,
    TrainedModel,
    __version__,
    canonical_config,
    evaluate,
    gradcheck_losses,
    gradcheck_ops,
    histogram_js,
    histogram_kl,
    sample_data,
    train,
    train_denoiser,
    w1_exact,
)

__all__ = [
    "DenoiserModel",
    "TrainedModel",
    "__version__",
    "canonical_config",
    "evaluate",
    "gradcheck_losses",
    "gradcheck_ops",
    "histogram_js",
    "histogram_kl",
    "sample_data",
    "train",
    "train_denoiser",
    "w1_exact",
]
