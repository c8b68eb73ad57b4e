"""Mask geometry walkthrough.

Builds every mask variant for a synthetic talking face, carves an
occluding object out of the mask, downsamples to latent resolution, and
blends two latent clips through the result. Outputs land in
./demo_output/mask_geometry/.
"""

from pathlib import Path

import numpy as np

from lipsynckit.fixtures import sinusoidal_track
from lipsynckit.latents import LatentClip
from lipsynckit.masking import (
    MaskParams,
    MaskRaster,
    MaskVariant,
    blend_latents,
    build_mask,
    downsample_to_latent,
    refine_with_occlusion,
    save_mask,
)

out_dir = Path("demo_output/mask_geometry")
track = sinusoidal_track(n_frames=5)
frame = track.frames[0]
print(f"frame 0 of {track.video_id}: {frame.image_width}x{frame.image_height}")

# One mask per variant; the default params follow the face box.
for variant in MaskVariant:
    mask = build_mask(frame, variant, MaskParams())
    coverage = mask.count() / (mask.width * mask.height)
    print(f"  {variant.value:<16} covers {coverage:6.1%} of the frame")
    save_mask(mask, out_dir / variant.value, track.video_id, frame.frame_index)

# Pretend a hand occludes a square over the chin: those pixels must
# survive generation, so they are removed from the inpainting region.
mask = build_mask(frame, MaskVariant.OURS)
occlusion_bits = np.zeros((512, 512), dtype=np.uint8)
occlusion_bits[380:470, 220:320] = 1
occlusion = MaskRaster(512, 512, occlusion_bits)
refined = refine_with_occlusion(mask, occlusion)
print(f"occlusion removed {mask.count() - refined.count()} pixels from the mask")

# The mask acts in latent space: one latent cell per 8x8 pixel block,
# regenerated if it touches the inpainting region at all.
latent_mask = downsample_to_latent(refined, 8)
print(f"latent mask {latent_mask.width}x{latent_mask.height}, "
      f"{latent_mask.count()} active cells")

rng = np.random.default_rng(0)
clean = LatentClip(rng.standard_normal((4, 4, 64, 64)))
noised = LatentClip(clean.data + rng.standard_normal(clean.shape))
blended = blend_latents(clean, noised, downsample_to_latent(refined, 8))
keep = ~latent_mask.bits.astype(bool)
print("unmasked latents preserved exactly:",
      bool(np.array_equal(blended.data[:, :, keep], clean.data[:, :, keep])))
print(f"outputs in {out_dir}/")
