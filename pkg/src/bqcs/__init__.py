"""Binary quantization of DNN tensors by sign and by quantized compressed sensing."""

__version__ = "0.1.0"

from .bitcode import BitCode, binary_dot, hamming, memory_bits, pack, unpack
from .conv import ConvSpec, approx_conv_qcs, approx_conv_standard, conv_reference, im2col, relative_error
from .quantize import (
    QuantizedLayer,
    est_inner,
    est_similarity,
    optimal_scale,
    qcs_quantize,
    quantize_layer,
    sign_quantize,
)
from .recon import ReconResult, hard_threshold, pbp_reconstruct, recon_error_sweep
from .sensing import DitherMode, RipEstimate, SensingEnsemble, gen_ensemble, identity_ensemble, measure, rip_probe
from .tensor import Seed, flatten, load_tensor, random_gaussian, random_uniform01, save_tensor
