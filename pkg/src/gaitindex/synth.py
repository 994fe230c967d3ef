"""Deterministic synthetic gait generator.

Produces 25-joint skeleton sequences from a closed-form sinusoidal walking
model, standing in for motion-capture data.  The model is deliberately
minimal: it gives the pipeline plausible joint covariance and controllable
left/right asymmetry, not biomechanical realism.  Every equation is written
out below so tests can verify generated trajectories against the formulas.

Conventions: metres, 30 frames per second, subject standing at the origin
walking in place (treadmill style).  Axes: x lateral, y vertical (up),
z anterior-posterior.

Let phi(t) = 2*pi*cadence_hz*t/FPS + phase0 be the left-leg gait phase at
frame t.  The right leg runs at phi + pi (antiphase); each arm runs in
counter-phase with its own-side leg.  For a leg with phase p and amplitude
set A, relative to the joint's base pose:

    ankle, foot:  x = A.leg_sway * sin(p)
                  y = A.ankle_lift * max(0, sin(p))        (+ pad height)
                  z = A.ankle_swing * -cos(p)              (* swing factor)
    knee:         x = 0.5 * A.leg_sway * sin(p)
                  y = A.knee_factor * A.ankle_lift * max(0, sin(p))
                    + 0.5 * A.bob * cos(2*phi)
                  z = A.knee_factor * A.ankle_swing * -cos(p)
    hip:          z = A.hip_swing * -cos(p); x, y as torso below

Torso, head, hips and arms ride the pelvis: vertical bob A.bob * cos(2*phi)
(two peaks per stride) and lateral sway A.body_sway * sin(phi) scaled by
each joint's base height.  Arm joints add the counter-phase swing
z = f_j * A.arm_swing * -cos(p_arm) where f_j grows down the chain
(shoulder 0.2, elbow 0.55, wrist 0.9, hand 1.0, tip/thumb A.hand_factor).

Ankle and foot base x is 0 for both sides, and their lateral motion depends
on t only through the leg's own phase.  Hence with no abnormality and no
noise the left ankle x-trajectory equals the right one shifted by half a
gait period, exactly.

Abnormality mappings (magnitudes from the config string, one side only):

    sole_pad:H    ankle and foot y raised by H/100 metres at every frame;
                  that side's z swing multiplied by (1 - H/100).
    ankle_weight:K  that leg's swing and lift amplitudes multiplied by
                  (1 - 0.05*K) and its phase lagged by 0.15*K radians.

Gaussian noise of noise_sigma is added to every coordinate afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .io import GaitSequence, LABEL_ABNORMAL, LABEL_NORMAL
from .joints import JOINT_INDEX, N_JOINTS
from .preprocess import RawSkeleton

FPS = 30

ABNORMALITY_KINDS = ("none", "sole_pad", "ankle_weight")

# base standing pose, metres: columns x, y, z
BASE_POSE = np.array([
    [0.00, 1.00, 0.00],   # SpineBase
    [0.00, 1.22, 0.00],   # SpineMid
    [0.00, 1.43, 0.00],   # Neck
    [0.00, 1.58, 0.00],   # Head
    [-0.18, 1.37, 0.00],  # ShoulderLeft
    [-0.21, 1.12, 0.00],  # ElbowLeft
    [-0.23, 0.90, 0.00],  # WristLeft
    [-0.24, 0.82, 0.00],  # HandLeft
    [0.18, 1.37, 0.00],   # ShoulderRight
    [0.21, 1.12, 0.00],   # ElbowRight
    [0.23, 0.90, 0.00],   # WristRight
    [0.24, 0.82, 0.00],   # HandRight
    [-0.09, 0.95, 0.00],  # HipLeft
    [-0.10, 0.52, 0.00],  # KneeLeft
    [0.00, 0.09, 0.00],   # AnkleLeft
    [0.00, 0.04, 0.10],   # FootLeft
    [0.09, 0.95, 0.00],   # HipRight
    [0.10, 0.52, 0.00],   # KneeRight
    [0.00, 0.09, 0.00],   # AnkleRight
    [0.00, 0.04, 0.10],   # FootRight
    [0.00, 1.40, 0.00],   # SpineShoulder
    [-0.25, 0.74, 0.00],  # HandTipLeft
    [-0.22, 0.78, 0.00],  # ThumbLeft
    [0.25, 0.74, 0.00],   # HandTipRight
    [0.22, 0.78, 0.00],   # ThumbRight
])

# arm chain: joint id -> swing factor (hand_factor applies to tip and thumb)
_ARM_SWING = {
    "ShoulderLeft": 0.2, "ElbowLeft": 0.55, "WristLeft": 0.9, "HandLeft": 1.0,
    "ShoulderRight": 0.2, "ElbowRight": 0.55, "WristRight": 0.9, "HandRight": 1.0,
}
_HAND_EXTRAS = ("HandTipLeft", "ThumbLeft", "HandTipRight", "ThumbRight")

_LEG = {
    "left": {"hip": 12, "knee": 13, "ankle": 14, "foot": 15},
    "right": {"hip": 16, "knee": 17, "ankle": 18, "foot": 19},
}
_LEG_JOINTS = {12, 13, 14, 15, 16, 17, 18, 19}


def parse_abnormality(text: str) -> tuple[str, float]:
    """Parse 'none', 'sole_pad:10' or 'ankle_weight:4' into (kind, magnitude).

    sole_pad magnitude is centimetres (the study values are 5, 10, 15);
    ankle_weight magnitude is kilograms.  Any nonnegative magnitude is
    accepted.
    """
    text = text.strip()
    if text in ("", "none"):
        return "none", 0.0
    kind, sep, magnitude = text.partition(":")
    if kind not in ABNORMALITY_KINDS:
        raise ValueError(f"unknown abnormality kind {kind!r}")
    if not sep:
        raise ValueError(f"abnormality {kind!r} needs a magnitude, e.g. '{kind}:10'")
    value = float(magnitude)
    if not math.isfinite(value) or value < 0:
        raise ValueError(f"abnormality magnitude must be nonnegative, got {magnitude}")
    return kind, value


@dataclass(frozen=True)
class GaitAmplitudes:
    """Motion amplitudes in metres, expanded to per-joint terms as per the
    module equations."""

    ankle_swing: float = 0.22
    ankle_lift: float = 0.08
    knee_factor: float = 0.55
    hip_swing: float = 0.035
    leg_sway: float = 0.025
    arm_swing: float = 0.14
    hand_factor: float = 1.15
    bob: float = 0.025
    body_sway: float = 0.02

    def __post_init__(self):
        for name, value in vars(self).items():
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"amplitude {name} must be nonnegative, got {value}")

    def scaled(self, factors: dict[str, float]) -> "GaitAmplitudes":
        return replace(self, **{k: getattr(self, k) * f for k, f in factors.items()})


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    subject_id: str = "synth"
    n_frames: int = 1200
    cadence_hz: float = 0.75
    phase0: float = 0.0
    amplitudes: GaitAmplitudes = field(default_factory=GaitAmplitudes)
    abnormality: str = "none"
    side: str = "left"
    noise_sigma: float = 0.0

    def __post_init__(self):
        if self.n_frames < 1:
            raise ValueError("n_frames must be positive")
        if not self.cadence_hz > 0:
            raise ValueError("cadence_hz must be positive")
        if self.side not in _LEG:
            raise ValueError(f"side must be 'left' or 'right', got {self.side!r}")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")
        parse_abnormality(self.abnormality)

    @property
    def label(self) -> str:
        kind, _ = parse_abnormality(self.abnormality)
        return LABEL_NORMAL if kind == "none" else LABEL_ABNORMAL


def synth_gait(cfg: SynthConfig) -> GaitSequence:
    """Generate one gait sequence from the closed-form model above."""
    amp = cfg.amplitudes
    kind, magnitude = parse_abnormality(cfg.abnormality)

    t = np.arange(cfg.n_frames, dtype=float)
    phi = 2.0 * np.pi * cfg.cadence_hz * t / FPS + cfg.phase0

    # per-leg phase, swing attenuation and swing-length factor
    leg_phase = {"left": phi, "right": phi + np.pi}
    attenuation = {"left": 1.0, "right": 1.0}
    swing_factor = {"left": 1.0, "right": 1.0}
    pad_height = {"left": 0.0, "right": 0.0}
    if kind == "sole_pad":
        pad_height[cfg.side] = magnitude / 100.0
        swing_factor[cfg.side] = 1.0 - magnitude / 100.0
    elif kind == "ankle_weight":
        attenuation[cfg.side] = 1.0 - 0.05 * magnitude
        leg_phase[cfg.side] = leg_phase[cfg.side] - 0.15 * magnitude

    pos = np.broadcast_to(BASE_POSE, (cfg.n_frames, N_JOINTS, 3)).copy()

    bob = amp.bob * np.cos(2.0 * phi)
    body_sway = amp.body_sway * np.sin(phi)
    heights = BASE_POSE[:, 1] / BASE_POSE[JOINT_INDEX["Head"], 1]
    for j in range(N_JOINTS):
        if j in _LEG_JOINTS and j not in (12, 16):
            continue
        pos[:, j, 0] += body_sway * heights[j]
        pos[:, j, 1] += bob

    for side, ids in _LEG.items():
        p = leg_phase[side]
        a = attenuation[side]
        lift = a * amp.ankle_lift * np.maximum(0.0, np.sin(p))
        swing = a * amp.ankle_swing * swing_factor[side] * -np.cos(p)
        sway = amp.leg_sway * np.sin(p)
        for key in ("ankle", "foot"):
            pos[:, ids[key], 0] += sway
            pos[:, ids[key], 1] += lift + pad_height[side]
            pos[:, ids[key], 2] += swing
        pos[:, ids["knee"], 0] += 0.5 * sway
        pos[:, ids["knee"], 1] += amp.knee_factor * lift + 0.5 * bob
        pos[:, ids["knee"], 2] += amp.knee_factor * swing
        pos[:, ids["hip"], 2] += amp.hip_swing * -np.cos(p)

        arm_phase = p + np.pi  # arms counter their own-side leg
        arm = -np.cos(arm_phase)
        side_tag = side.capitalize()
        for name, factor in _ARM_SWING.items():
            if name.endswith(side_tag):
                pos[:, JOINT_INDEX[name], 2] += factor * amp.arm_swing * arm
        for name in _HAND_EXTRAS:
            if name.endswith(side_tag):
                pos[:, JOINT_INDEX[name], 2] += amp.hand_factor * amp.arm_swing * arm

    if cfg.noise_sigma > 0:
        rng = np.random.default_rng(cfg.seed)
        pos += rng.normal(0.0, cfg.noise_sigma, size=pos.shape)

    frames = [RawSkeleton(frame_index=i, joints=pos[i]) for i in range(cfg.n_frames)]
    return GaitSequence(
        subject_id=cfg.subject_id,
        label=cfg.label,
        variant=cfg.abnormality if kind != "none" else "",
        frames=frames,
    )


def subject_config(
    base: SynthConfig,
    subject_id: str,
    subject_seed: int,
    abnormality: str = "none",
    side: str = "left",
) -> SynthConfig:
    """Derive one subject's config from a base plan and a spawned seed.

    The subject gets a random gait-cycle phase, mildly perturbed cadence and
    per-group amplitude scales, so the five training subjects span a small
    family of walking styles instead of one exact trajectory.
    """
    rng = np.random.default_rng(subject_seed)
    phase0 = rng.uniform(0.0, 2.0 * np.pi)
    cadence = base.cadence_hz * float(np.clip(rng.normal(1.0, 0.01), 0.97, 1.03))
    groups = ("ankle_swing", "ankle_lift", "hip_swing", "leg_sway",
              "arm_swing", "bob", "body_sway")
    factors = {
        g: float(np.clip(rng.normal(1.0, 0.015), 0.95, 1.05)) for g in groups
    }
    return replace(
        base,
        seed=int(rng.integers(0, 2**63)),
        subject_id=subject_id,
        phase0=phase0,
        cadence_hz=cadence,
        amplitudes=base.amplitudes.scaled(factors),
        abnormality=abnormality,
        side=side,
    )
