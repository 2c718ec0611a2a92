"""sigcore: truncated path signatures and signature kernels, with exact
reverse-mode gradients, fused path transforms, and a benchmark harness."""

from . import config  # noqa: F401  (must precede any numba import)

from .bench import BenchReport, run_bench
from .config import get_threads, max_threads, resolve_threads, set_threads
from .errors import FormatError, InvalidArgument, InvalidState
from .io import read_array, write_array
from .kernel import (KernelConfig, SolveResult, increment_gram, kernel_batch,
                     kernel_gram, solve_goursat, solve_workspace_elements)
from .kernel_grad import kernel_backward, kernel_batch_backward
from .signature import PathBatch, SigOptions, sig_tensor_shape, signature
from .signature_grad import signature_backward
from .tensors import (TensorShape, TruncatedSig, dot, mul_acc, tensor_exp,
                      tensor_shape, zero_tensor)
from .transforms import fused_increments, transform, transform_adjoint

__version__ = "0.1.0"

__all__ = [
    "BenchReport", "FormatError", "InvalidArgument", "InvalidState",
    "KernelConfig", "PathBatch", "SigOptions", "SolveResult", "TensorShape",
    "TruncatedSig", "dot", "fused_increments", "get_threads", "increment_gram",
    "kernel_backward", "kernel_batch", "kernel_batch_backward", "kernel_gram",
    "max_threads", "mul_acc", "read_array", "resolve_threads", "run_bench",
    "set_threads", "sig_tensor_shape", "signature", "signature_backward",
    "solve_goursat", "solve_workspace_elements", "tensor_exp", "tensor_shape",
    "transform", "transform_adjoint", "write_array", "zero_tensor",
    "__version__",
]
