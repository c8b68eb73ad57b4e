"""A small trainable denoiser that exercises the masked-diffusion core.

The network is deliberately tiny: a two-layer nonlinear map over
flattened latent frames with frame-local weights, a three-tap temporal
mixing layer, and linear injection of reference frames and
audio-augmented timestep embeddings. It is enough to demonstrate the
full two-stage pipeline (keyframes, then interpolation with a learnable
slot embedding) on synthetic clips; it is in no way a video model.

Training is single threaded and fully deterministic given a seed.
Returned denoisers are frozen and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .diffusion import (
    AudioFeatureTrack,
    EdmParams,
    GuidanceWeights,
    Schedule,
    build_interpolation_input,
    denoise,
    edm_coefficients,
    guided_combine,
    keyframe_indices,
    latent_loss,
    loss_weight,
    rgb_loss,
    sample_training_sigmas,
    sigma_grid,
    total_loss,
)
from .latents import LatentClip
from .masking import MaskRaster, blend_latents


class NonFiniteLossError(RuntimeError):
    """Training produced a NaN or infinite loss."""


class Stage(Enum):
    KEYFRAME = "keyframe"
    INTERPOLATION = "interpolation"


@dataclass(frozen=True)
class CfgDropRates:
    """Classifier-free-guidance condition drop probabilities."""

    audio: float = 0.2
    identity: float = 0.1

    def __post_init__(self):
        for name in ("audio", "identity"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} drop rate must be in [0, 1], got {p}")


@dataclass(frozen=True)
class ToyConditioning:
    """Conditioning for one denoiser call.

    ``audio``: [frames, dim] feature matrix, or None when dropped.
    ``ref_frames``: [frames, C, H, W] reference sequence (repeated
    identity frame for the keyframe stage, keyframes plus slot
    embeddings for interpolation), or None when dropped.
    ``slot_rows``: which reference positions hold the learnable slot,
    so its gradient can be routed back during training.

    Dropped conditions are replaced by zeros inside the network.
    """

    audio: np.ndarray | None = None
    ref_frames: np.ndarray | None = None
    slot_rows: np.ndarray | None = None

    def without_audio(self) -> "ToyConditioning":
        return replace(self, audio=None)

    @staticmethod
    def empty() -> "ToyConditioning":
        return ToyConditioning(audio=None, ref_frames=None)


@dataclass(frozen=True)
class ToyFixture:
    """Synthetic training material: clips, per-clip audio, shared mask."""

    clips: tuple[LatentClip, ...]
    audio: tuple[AudioFeatureTrack, ...]
    mask: MaskRaster

    def __post_init__(self):
        if not self.clips:
            raise ValueError("fixture needs at least one clip")
        if len(self.clips) != len(self.audio):
            raise ValueError("one audio track per clip required")
        shape = self.clips[0].shape
        for clip, track in zip(self.clips, self.audio):
            if clip.shape != shape:
                raise ValueError("all fixture clips must share a shape")
            if track.frames != clip.frames:
                raise ValueError("audio track length must match clip length")
        if (self.mask.height, self.mask.width) != (shape[2], shape[3]):
            raise ValueError("fixture mask must match clip spatial dimensions")


def _fourier_embed(value: float, dim: int) -> np.ndarray:
    freqs = 2.0 ** np.arange(dim // 2)
    angles = value * freqs
    return np.concatenate([np.sin(angles), np.cos(angles)])


def _shift_down(h: np.ndarray) -> np.ndarray:
    out = np.zeros_like(h)
    out[1:] = h[:-1]
    return out


def _shift_up(h: np.ndarray) -> np.ndarray:
    out = np.zeros_like(h)
    out[:-1] = h[1:]
    return out


class ToyDenoiser:
    """Shape-preserving raw network F(x, noise_label, conditioning).

    A two-layer core predicts the clean content: layer 1 mixes the
    flattened frame, the flattened reference frame, and the
    audio-augmented timestep embedding; a three-tap gate mixes hidden
    states across neighboring frames; layer 2 maps back to frame shape,
    with noise-gated hidden units and a noise-gated linear pass-through
    of the input. The raw output then inverts the outer preconditioning
    ((core - c_skip * x / c_in) / c_out), so the core's training target
    is the clean clip at every noise level instead of a quantity whose
    scale blows up as sigma shrinks. The interpolation slot embedding is
    a per-channel parameter broadcast to frame shape.
    """

    def __init__(
        self,
        frame_shape: tuple[int, int, int],
        audio_dim: int,
        hidden: int = 64,
        embed_dim: int = 8,
        audio_hidden: int = 16,
        seed: int = 0,
        edm: EdmParams = EdmParams(),
    ):
        if embed_dim % 2:
            raise ValueError("embed_dim must be even")
        self.frame_shape = tuple(frame_shape)
        self.audio_dim = int(audio_dim)
        self.hidden = int(hidden)
        self.embed_dim = int(embed_dim)
        self.audio_hidden = int(audio_hidden)
        self.edm = edm
        d = int(np.prod(frame_shape))
        rng = np.random.default_rng(seed)

        def init(rows, cols, scale):
            return (rng.standard_normal((rows, cols)) * scale).astype(np.float64)

        self.params: dict[str, np.ndarray] = {
            "w_x": init(d, hidden, 1.0 / math.sqrt(d)),
            "w_r": init(d, hidden, 1.0 / math.sqrt(d)),
            "w_t": init(embed_dim, hidden, 1.0 / math.sqrt(embed_dim)),
            "b1": np.zeros(hidden),
            "g_prev": np.zeros(hidden),
            "g_self": np.ones(hidden),
            "g_next": np.zeros(hidden),
            "u_gate": np.zeros((embed_dim, hidden)),
            "u_skip": np.zeros(embed_dim),
            "w2": init(hidden, d, 0.01 / math.sqrt(hidden)),
            "b2": np.zeros(d),
            "m1": init(audio_dim, audio_hidden, 1.0 / math.sqrt(audio_dim)),
            "mb1": np.zeros(audio_hidden),
            "m2": init(audio_hidden, embed_dim, 1.0 / math.sqrt(audio_hidden)),
            "mb2": np.zeros(embed_dim),
            "slot": np.zeros(frame_shape[0]),
        }
        self._frozen = False

    def slot_frame(self) -> np.ndarray:
        """Slot embedding broadcast to full frame shape."""
        c, h, w = self.frame_shape
        return np.broadcast_to(self.params["slot"][:, None, None], (c, h, w)).copy()

    def freeze(self) -> None:
        for arr in self.params.values():
            arr.flags.writeable = False
        self._frozen = True

    def _prepare(self, frames: int, cond: ToyConditioning | None):
        d = int(np.prod(self.frame_shape))
        cond = cond if cond is not None else ToyConditioning.empty()
        if cond.audio is None:
            audio = np.zeros((frames, self.audio_dim))
        else:
            audio = np.asarray(cond.audio, dtype=np.float64)
            if audio.shape != (frames, self.audio_dim):
                raise ValueError(
                    f"audio conditioning shape {audio.shape} does not match "
                    f"({frames}, {self.audio_dim})"
                )
        if cond.ref_frames is None:
            ref = np.zeros((frames, d))
            slot_rows = np.zeros(frames, dtype=bool)
        else:
            ref_frames = np.asarray(cond.ref_frames, dtype=np.float64)
            if ref_frames.shape != (frames, *self.frame_shape):
                raise ValueError(
                    f"reference conditioning shape {ref_frames.shape} does not "
                    f"match ({frames}, {self.frame_shape})"
                )
            ref = ref_frames.reshape(frames, d)
            if cond.slot_rows is not None:
                slot_rows = np.asarray(cond.slot_rows, dtype=bool)
            else:
                slot_rows = np.zeros(frames, dtype=bool)
        return audio, ref, slot_rows

    def forward(
        self, x_frames: np.ndarray, noise_label: float, cond: ToyConditioning | None
    ) -> tuple[np.ndarray, dict]:
        """Run the network on raw frame data; returns output and a cache."""
        frames = x_frames.shape[0]
        d = int(np.prod(self.frame_shape))
        x = x_frames.reshape(frames, d)
        audio, ref, slot_rows = self._prepare(frames, cond)
        p = self.params

        sigma = math.exp(4.0 * noise_label)
        coeff = edm_coefficients(sigma, self.edm)
        t_base = _fourier_embed(noise_label, self.embed_dim)
        h_a = np.tanh(audio @ p["m1"] + p["mb1"])
        t_all = t_base[None, :] + h_a @ p["m2"] + p["mb2"]
        pre = x @ p["w_x"] + ref @ p["w_r"] + t_all @ p["w_t"] + p["b1"]
        h1 = np.tanh(pre)
        h2 = p["g_self"] * h1 + p["g_prev"] * _shift_down(h1) + p["g_next"] * _shift_up(h1)
        gate = 1.0 + t_base @ p["u_gate"]
        h2g = h2 * gate
        # The learnable pass-through is centered on the preconditioning's
        # natural operating point, so an untrained network denoises like
        # the plain c_skip baseline instead of collapsing to zero output;
        # the hidden path fades with the noise level exactly as the outer
        # c_out would fade a conventional raw output, keeping low-noise
        # predictions anchored to the observed latents.
        pass_through = coeff.c_skip / coeff.c_in
        skip_gain = pass_through * float(t_base @ p["u_skip"])
        hidden_scale = coeff.c_out / self.edm.sigma_data
        core = hidden_scale * (h2g @ p["w2"] + p["b2"]) + (pass_through + skip_gain) * x
        y = (core - pass_through * x) / coeff.c_out
        cache = {
            "x": x, "ref": ref, "audio": audio, "h_a": h_a, "t_all": t_all,
            "t_base": t_base, "gate": gate, "h1": h1, "h2": h2, "h2g": h2g,
            "slot_rows": slot_rows, "c_out": coeff.c_out,
            "pass_through": pass_through, "hidden_scale": hidden_scale,
        }
        return y.reshape(frames, *self.frame_shape), cache

    def backward(self, cache: dict, d_out: np.ndarray) -> dict[str, np.ndarray]:
        """Gradients of every parameter given d(loss)/d(output frames)."""
        p = self.params
        frames = d_out.shape[0]
        d = int(np.prod(self.frame_shape))
        h1, h2, h_a = cache["h1"], cache["h2"], cache["h_a"]
        d_core = d_out.reshape(frames, d) / cache["c_out"]
        d_hidden = d_core * cache["hidden_scale"]

        grads: dict[str, np.ndarray] = {}
        grads["w2"] = cache["h2g"].T @ d_hidden
        grads["b2"] = d_hidden.sum(axis=0)
        grads["u_skip"] = (
            cache["t_base"] * cache["pass_through"] * float((d_core * cache["x"]).sum())
        )
        dh2g = d_hidden @ p["w2"].T
        d_gate = (dh2g * h2).sum(axis=0)
        grads["u_gate"] = np.outer(cache["t_base"], d_gate)
        dh2 = dh2g * cache["gate"]
        grads["g_self"] = (dh2 * h1).sum(axis=0)
        grads["g_prev"] = (dh2 * _shift_down(h1)).sum(axis=0)
        grads["g_next"] = (dh2 * _shift_up(h1)).sum(axis=0)
        dh1 = p["g_self"] * dh2 + p["g_prev"] * _shift_up(dh2) + p["g_next"] * _shift_down(dh2)
        dpre = dh1 * (1.0 - h1 * h1)
        grads["w_x"] = cache["x"].T @ dpre
        grads["w_r"] = cache["ref"].T @ dpre
        grads["w_t"] = cache["t_all"].T @ dpre
        grads["b1"] = dpre.sum(axis=0)
        dt_all = dpre @ p["w_t"].T
        grads["m2"] = h_a.T @ dt_all
        grads["mb2"] = dt_all.sum(axis=0)
        dh_a = (dt_all @ p["m2"].T) * (1.0 - h_a * h_a)
        grads["m1"] = cache["audio"].T @ dh_a
        grads["mb1"] = dh_a.sum(axis=0)

        slot_rows = cache["slot_rows"]
        dslot = np.zeros_like(p["slot"])
        if slot_rows.any():
            dref = dpre @ p["w_r"].T
            per_frame = dref[slot_rows].reshape(-1, *self.frame_shape)
            dslot = per_frame.sum(axis=(0, 2, 3))
        grads["slot"] = dslot
        return grads

    def __call__(self, x: LatentClip, noise_label: float, conditioning) -> LatentClip:
        out, _ = self.forward(x.data, noise_label, conditioning)
        return LatentClip(out)


class _Adam:
    def __init__(self, params: dict[str, np.ndarray], lr: float):
        self.lr = lr
        self.beta1, self.beta2, self.eps = 0.9, 0.999, 1e-8
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        b1c = 1.0 - self.beta1**self.t
        b2c = 1.0 - self.beta2**self.t
        for key, grad in grads.items():
            self.m[key] = self.beta1 * self.m[key] + (1 - self.beta1) * grad
            self.v[key] = self.beta2 * self.v[key] + (1 - self.beta2) * grad * grad
            m_hat = self.m[key] / b1c
            v_hat = self.v[key] / b2c
            params[key] -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def _training_window(
    rng: np.random.Generator,
    stage: Stage,
    clip: LatentClip,
    track: AudioFeatureTrack,
    schedule: Schedule,
    net: ToyDenoiser,
) -> tuple[np.ndarray, ToyConditioning]:
    """Pick a target window and its reference conditioning for one step."""
    s = schedule.spacing
    if stage is Stage.KEYFRAME:
        indices = keyframe_indices(schedule)
        if indices[-1] >= clip.frames:
            raise ValueError(
                f"clip with {clip.frames} frames too short for keyframes up to {indices[-1]}"
            )
        target = clip.data[indices]
        audio = track.features[indices]
        identity = np.repeat(clip.data[0][None], len(indices), axis=0)
        return target, ToyConditioning(audio=audio, ref_frames=identity)
    window = s + 2
    if clip.frames < window:
        raise ValueError(f"clip with {clip.frames} frames too short for window {window}")
    start = int(rng.integers(0, clip.frames - window + 1))
    target = clip.data[start : start + window]
    audio = track.features[start : start + window]
    sequence, slot_rows = build_interpolation_input(
        target[0], target[-1], net.slot_frame(), s
    )
    return target, ToyConditioning(audio=audio, ref_frames=sequence, slot_rows=slot_rows)


def toy_train(
    fixture: ToyFixture,
    stage: Stage,
    schedule: Schedule,
    edm: EdmParams,
    steps: int,
    drop_rates: CfgDropRates,
    seed: int,
    lambda_2: float = 1.0,
    hidden: int = 64,
    learning_rate: float = 1e-2,
    batch_size: int = 4,
    grad_clip: float = 5.0,
) -> tuple[ToyDenoiser, list[float]]:
    """Train the toy denoiser with the masked-diffusion objective.

    Per step and batch element: sample a clip window and a log-normal
    noise level, noise the latents, blend the masked region, denoise,
    and accumulate the masked latent + pixel loss; then take one Adam
    step (learning rate warmed up over the first tenth of training,
    gradient clipped by global norm, both guarding against the heavy
    tail of the noise-level weighting). Conditions are dropped at the
    configured rates (replaced by zeros) so guidance works at sampling
    time. Returns the frozen network and the per-step loss history.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    rng = np.random.default_rng(seed)
    c, h, w = fixture.clips[0].channels, fixture.clips[0].height, fixture.clips[0].width
    net = ToyDenoiser(
        frame_shape=(c, h, w),
        audio_dim=fixture.audio[0].dim,
        hidden=hidden,
        seed=int(rng.integers(0, 2**31 - 1)),
        edm=edm,
    )
    optimizer = _Adam(net.params, lr=learning_rate)
    warmup = max(1, steps // 10)
    mask = fixture.mask
    selector = mask.bits.astype(bool)
    losses: list[float] = []

    for step in range(steps):
        batch_loss = 0.0
        batch_grads: dict[str, np.ndarray] | None = None
        for _ in range(batch_size):
            clip_idx = int(rng.integers(0, len(fixture.clips)))
            target, cond = _training_window(
                rng, stage, fixture.clips[clip_idx], fixture.audio[clip_idx], schedule, net
            )
            if rng.random() < drop_rates.audio:
                cond = cond.without_audio()
            if rng.random() < drop_rates.identity:
                cond = _strip_reference(cond)

            sigma = float(sample_training_sigmas(rng, 1, edm)[0])
            coeff = edm_coefficients(sigma, edm)
            lam = loss_weight(sigma, edm)
            noise = rng.standard_normal(target.shape)
            clean = LatentClip(target)
            noised = LatentClip(target + sigma * noise)
            blended = blend_latents(clean, noised, mask)

            raw, cache = net.forward(coeff.c_in * blended.data, coeff.c_noise, cond)
            pred = coeff.c_skip * blended.data + coeff.c_out * raw
            if not np.isfinite(pred).all():
                raise NonFiniteLossError(
                    f"step {step}: non-finite prediction (sigma={sigma:.4g}, "
                    f"clip={clip_idx})"
                )

            frame_pick = int(rng.integers(0, target.shape[0]))
            l_lat = latent_loss(LatentClip(pred), clean, 1.0, mask)
            l_rgb = rgb_loss(pred[frame_pick], target[frame_pick], 1.0, mask)
            loss = total_loss(l_lat, l_rgb, lam, lambda_2)
            if not math.isfinite(loss):
                raise NonFiniteLossError(
                    f"step {step}: loss={loss} (sigma={sigma:.4g}, clip={clip_idx})"
                )
            batch_loss += loss / batch_size

            sel4 = selector[None, None, :, :]
            n_lat = target.shape[0] * target.shape[1] * int(selector.sum())
            d_pred = lam * (2.0 / n_lat) * np.where(sel4, pred - target, 0.0)
            n_rgb = target.shape[1] * int(selector.sum())
            d_pred[frame_pick] += (
                lam * lambda_2 * (2.0 / n_rgb)
                * np.where(selector[None, :, :], pred[frame_pick] - target[frame_pick], 0.0)
            )
            grads = net.backward(cache, coeff.c_out * d_pred)
            if batch_grads is None:
                batch_grads = {k: g / batch_size for k, g in grads.items()}
            else:
                for key, grad in grads.items():
                    batch_grads[key] += grad / batch_size

        losses.append(batch_loss)
        assert batch_grads is not None
        _clip_by_global_norm(batch_grads, grad_clip)
        optimizer.lr = learning_rate * min(1.0, (step + 1) / warmup)
        optimizer.step(net.params, batch_grads)

    net.freeze()
    return net, losses


def _clip_by_global_norm(grads: dict[str, np.ndarray], max_norm: float) -> None:
    total = math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if total > max_norm:
        scale = max_norm / total
        for key in grads:
            grads[key] = grads[key] * scale


def _strip_reference(cond: ToyConditioning) -> ToyConditioning:
    return ToyConditioning(audio=cond.audio, ref_frames=None)


def smoothed_losses(losses: list[float], window: int = 50) -> tuple[float, float]:
    """Mean loss over the first and last ``window`` steps."""
    if not losses:
        raise ValueError("loss history is empty")
    window = max(1, min(window, len(losses)))
    return float(np.mean(losses[:window])), float(np.mean(losses[-window:]))


def toy_sample(
    network: ToyDenoiser,
    masked_input: LatentClip,
    conditioning: ToyConditioning,
    mask: MaskRaster,
    n_steps: int = 10,
    guidance: GuidanceWeights = GuidanceWeights(),
    edm: EdmParams = EdmParams(),
    rng: np.random.Generator | None = None,
    sigma_min: float = 0.002,
    sigma_max: float = 80.0,
) -> LatentClip:
    """Iteratively denoise the masked region of ``masked_input``.

    Starts from pure noise inside the mask, walks a descending noise
    grid with Euler steps, applies dual-condition guidance at every
    level, and re-imposes the preserved region after each step, so the
    unmasked content of the result equals the input bit-exactly.
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    rng = rng if rng is not None else np.random.default_rng(0)
    grid = sigma_grid(n_steps, sigma_min=sigma_min, sigma_max=sigma_max)
    cond_full = conditioning
    cond_id = conditioning.without_audio()
    cond_empty = ToyConditioning.empty()

    start_noise = LatentClip(grid[0] * rng.standard_normal(masked_input.shape))
    x = blend_latents(masked_input, start_noise, mask)
    for i in range(n_steps):
        sigma_cur, sigma_next = float(grid[i]), float(grid[i + 1])
        d_empty = denoise(x, sigma_cur, network, cond_empty, edm)
        d_id = denoise(x, sigma_cur, network, cond_id, edm)
        d_full = denoise(x, sigma_cur, network, cond_full, edm)
        guided = guided_combine(d_empty, d_id, d_full, guidance)
        slope = (x.data - guided.data) / sigma_cur
        x = LatentClip(x.data + (sigma_next - sigma_cur) * slope)
        x = blend_latents(masked_input, x, mask)
    return x


def masked_mae(a: LatentClip, b: LatentClip, mask: MaskRaster) -> float:
    """Mean absolute difference over masked elements."""
    if a.shape != b.shape:
        raise ValueError(f"clip shapes differ: {a.shape} vs {b.shape}")
    selector = np.broadcast_to(mask.bits.astype(bool)[None, None, :, :], a.shape)
    count = int(np.count_nonzero(selector))
    if count == 0:
        return 0.0
    return float(np.sum(np.where(selector, np.abs(a.data - b.data), 0.0)) / count)


def generate_two_stage(
    keyframe_net: ToyDenoiser,
    interp_net: ToyDenoiser,
    clip: LatentClip,
    audio: AudioFeatureTrack,
    mask: MaskRaster,
    schedule: Schedule,
    guidance: GuidanceWeights = GuidanceWeights(),
    edm: EdmParams = EdmParams(),
    n_steps: int = 10,
    rng: np.random.Generator | None = None,
) -> tuple[LatentClip, LatentClip]:
    """Run both stages on one input clip and stitch the result.

    Stage one regenerates the masked region of the keyframe grid,
    conditioned on the clip's first frame as identity. Stage two fills
    each keyframe gap, conditioned on the generated anchors and the
    slot embedding. Returns (keyframe clip, stitched clip); the
    stitched clip covers frames [S, T*S] of the input.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    indices = keyframe_indices(schedule)
    s = schedule.spacing
    if indices[-1] >= clip.frames:
        raise ValueError(
            f"clip with {clip.frames} frames too short for keyframes up to {indices[-1]}"
        )
    if audio.frames != clip.frames:
        raise ValueError("audio track length must match clip length")

    kf_input = LatentClip(clip.data[indices])
    kf_cond = ToyConditioning(
        audio=audio.features[indices],
        ref_frames=np.repeat(clip.data[0][None], len(indices), axis=0),
    )
    kf_out = toy_sample(
        keyframe_net, kf_input, kf_cond, mask, n_steps, guidance, edm, rng
    )

    segments: list[LatentClip] = []
    for i in range(len(indices) - 1):
        t_i = indices[i]
        window = _padded_window(clip.data, t_i, s + 2)
        sequence, slot_rows = build_interpolation_input(
            kf_out.data[i], kf_out.data[i + 1], interp_net.slot_frame(), s
        )
        cond = ToyConditioning(
            audio=_padded_window(audio.features, t_i, s + 2),
            ref_frames=sequence,
            slot_rows=slot_rows,
        )
        segments.append(
            toy_sample(interp_net, LatentClip(window), cond, mask, n_steps, guidance, edm, rng)
        )

    stitched = stitch_segments(segments, s)
    return kf_out, stitched


def _padded_window(data: np.ndarray, start: int, length: int) -> np.ndarray:
    """Slice ``length`` rows from ``start``, repeating the last row if short."""
    window = data[start : start + length]
    if window.shape[0] < length:
        pad = np.repeat(window[-1][None], length - window.shape[0], axis=0)
        window = np.concatenate([window, pad])
    return window


def stitch_segments(segments: list[LatentClip], spacing: int) -> LatentClip:
    """Concatenate interpolation segments into one clip.

    Each segment spans S + 2 positions while consecutive anchors sit
    only S frames apart, so segments overrun the next anchor by one
    frame. Stitching emits positions 0..S-1 of every segment (leading
    anchor plus S - 1 intermediates) and position S of the final
    segment, which lands exactly on the last anchor; the surplus
    trailing position of each segment is dropped. Output length is
    len(segments) * S + 1, covering anchors first to last.
    """
    if not segments:
        raise ValueError("no segments to stitch")
    for seg in segments:
        if seg.frames != spacing + 2:
            raise ValueError(
                f"segment has {seg.frames} frames, expected {spacing + 2}"
            )
    parts = [seg.data[:spacing] for seg in segments]
    parts.append(segments[-1].data[spacing][None])
    return LatentClip(np.concatenate(parts))
