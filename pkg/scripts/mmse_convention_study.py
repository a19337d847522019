"""Compare ways of scoring MMSE sum/difference outputs against ML PNC.

The library scores the raw MMSE outputs with the ZF-form LLR (``literal``).
Two alternatives are tried here for diagnosis only:

* ``unbiased``: divide each stream by its MMSE gain ``(G H)_ii`` and rescale the
  noise variance accordingly.
* ``unbiased+mai``: as above, and also count residual inter-stream
  interference as extra Gaussian noise.

Prints BER per SNR for each variant next to ML PNC and MMSE NC.
"""

import argparse

import numpy as np

from mimopnc.channel import modulate, sample_channel, snr_db_to_sigma2, transmit
from mimopnc.detectors import (
    DetectorKind,
    EqualizedObservation,
    detect,
    detect_pnc_llr,
    sum_difference_transform,
)
from mimopnc.numerics import matmul2, mmse_equalizer, row_noise_gains
from mimopnc.simulator import block_rng


def variant_decisions(H, r, sigma2):
    Hs = sum_difference_transform(H)
    G = mmse_equalizer(Hs, sigma2)
    y = np.einsum("...ij,...j->...i", G, r).real
    noise = row_noise_gains(G) * sigma2
    B = matmul2(G, Hs)
    gain = np.real(np.diagonal(B, axis1=-2, axis2=-1))
    # only Re(B_ij) s_j survives the real part; s_j has second moment 2
    mai = 2 * np.real(B[..., [0, 1], [1, 0]]) ** 2
    out = {"literal": detect_pnc_llr(EqualizedObservation(y[:, 0], y[:, 1], noise[:, 0], noise[:, 1]))}
    yu = y / gain
    vu = noise / gain**2
    out["unbiased"] = detect_pnc_llr(EqualizedObservation(yu[:, 0], yu[:, 1], vu[:, 0], vu[:, 1]))
    vm = (noise + mai) / gain**2
    out["unbiased+mai"] = detect_pnc_llr(EqualizedObservation(yu[:, 0], yu[:, 1], vm[:, 0], vm[:, 1]))
    return out


def main(args):
    names = ["literal", "unbiased", "unbiased+mai", "ml-pnc", "mmse-nc"]
    print("snr_db " + " ".join(f"{n:>13s}" for n in names))
    for k, snr in enumerate(np.arange(args.start, args.stop + 1e-9, args.step)):
        sigma2 = snr_db_to_sigma2(snr)
        errors = dict.fromkeys(names, 0)
        for b in range(args.blocks):
            rng = block_rng(args.seed, k, b)
            x = modulate(rng.integers(0, 2, size=(args.block_size, 2)))
            H = sample_channel(rng, args.block_size).H
            r = transmit(H, x, sigma2, rng)
            truth = x[:, 0] * x[:, 1]
            est = variant_decisions(H, r, sigma2)
            est["ml-pnc"] = detect(DetectorKind.ML_PNC, H, r, sigma2)
            est["mmse-nc"] = detect(DetectorKind.MMSE_NC, H, r, sigma2)
            for n in names:
                errors[n] += int(np.count_nonzero(est[n] != truth))
        total = args.blocks * args.block_size
        print(f"{snr:6.1f} " + " ".join(f"{errors[n] / total:13.5f}" for n in names))


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--stop", type=float, default=20.0)
    p.add_argument("--step", type=float, default=2.0)
    p.add_argument("--blocks", type=int, default=4)
    p.add_argument("--block-size", type=int, default=1 << 16)
    p.add_argument("--seed", type=int, default=2024)
    main(p.parse_args())
