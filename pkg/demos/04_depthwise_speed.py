"""
What depthwise convolutions buy on the CPU
==========================================

Hidden layers convolve each channel with its own filter instead of
mixing all channels, cutting hidden-layer multiplies by the channel
count. That does not automatically win: a dense layer is one BLAS GEMM,
and for small problems GEMM is hard to beat. The saving shows up once
the workload is large - wide channels, big kernels, long look-back
windows - which is exactly the second-scale receptive field regime.
RTF < 1 means faster than real time on this machine.
"""

from tcnfx.bench import BenchCase, format_report, run_case
from tcnfx.config import NetworkConfig, param_count, receptive_field
from tcnfx.kernels import backend_name

print("convolution backend:", backend_name())
print()

shapes = [
    ("small", dict(num_layers=6, kernel_size=3, dilation_growth=2,
                   channel_width=8)),
    ("wide", dict(num_layers=10, kernel_size=3, dilation_growth=2,
                  channel_width=32)),
    ("long", dict(num_layers=12, kernel_size=13, dilation_growth=2,
                  channel_width=8)),
]

results = []
for tag, arch in shapes:
    for depthwise in (False, True):
        cfg = NetworkConfig(depthwise=depthwise, seed=1, **arch)
        label = f"{tag}-{'dw' if depthwise else 'dense'}"
        results.append(run_case(BenchCase(label, cfg), seconds=0.3,
                                time_budget=30.0))
        rf = receptive_field(cfg)
        print(f"{label:12s} rf {rf:6d} ({rf / 44.100:7.1f} ms)  "
              f"params {param_count(cfg):6d}  "
              f"rtf {results[-1].rtf_median:.4f}")

print()
print(format_report(results), end="")

print("\ndepthwise speedup at matched shapes (>1 means depthwise wins):")
for dense, dw in zip(results[::2], results[1::2]):
    print(f"  {dense.case.label:12s} {dense.rtf_median / dw.rtf_median:.2f}x")
print("\nparameters always drop by ~1/channels; time only follows once")
print("the per-block window is big enough that MAC count dominates.")
