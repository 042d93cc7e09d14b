"""Complex-convolution CNNs for I/Q modulation classification, built from
scratch: tensors with reverse-mode autodiff, the three-column complex
cross-correlation trick, three CNN architectures, a synthetic modulation
dataset generator, SNR train/test paradigms with significance testing, and
activation-maximization input synthesis.
"""

from .errors import (CplxError, ConfigError, ContractError, DimensionError,
                     FormatError, NumericError)
from .tensor import Tensor, no_grad

__version__ = "0.1.0"

__all__ = [
    "Tensor", "no_grad", "CplxError", "ConfigError", "ContractError",
    "DimensionError", "FormatError", "NumericError", "__version__",
]
