"""Inpaint the bundled grayscale image from 30% of its pixels.

Natural and synthetic images are often close to low rank, so matrix
completion makes a decent inpainter: we keep a random 30% of pixels,
fit a rank-10 nonnegative factorization to them, and write both the
degraded and the recovered image next to this script.
"""

from pathlib import Path

import numpy as np

from nmfc import (
    ObservedMatrix,
    default_params,
    evaluate,
    gather,
    read_pgm,
    sample_mask,
    solve,
    write_pgm,
)

HERE = Path(__file__).resolve().parent
SOURCE = HERE.parent / "data" / "blobs_128.pgm"

img, maxval = read_pgm(SOURCE)
print(f"source image {img.shape[0]}x{img.shape[1]}, maxval {maxval}")

# work in [0, 1]; the PSNR peak is then 1.0
unit = img / maxval
mask = sample_mask(*unit.shape, sr=0.30, seed=0)
observed = ObservedMatrix(mask, gather(unit, mask))

sol = solve(observed, default_params(observed, q=10, seed=0))
recovered = np.clip(sol.product(), 0.0, 1.0)
report = evaluate(recovered, unit, max_i=1.0)
print(f"solver stopped by {sol.stop_reason} after {sol.iterations} sweeps")
print(f"recovery: rel_err={report.rel_err:.3e}  psnr={report.psnr:.1f} dB")

write_pgm(observed.to_dense() * maxval, maxval, HERE / "masked.pgm")
write_pgm(recovered * maxval, maxval, HERE / "recovered.pgm")
print(f"wrote {HERE / 'masked.pgm'} and {HERE / 'recovered.pgm'}")

print()
print("shell equivalent:")
print(f"  nmfc image --input {SOURCE.name} --sr 0.3 --rank 10 --out img_out")
