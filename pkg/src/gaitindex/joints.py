"""Kinect-2 joint enumeration and the default joint selection mask.

The sensor labels 25 joints per tracked body, indexed 0..24.  The pipeline
keeps 17 of them and drops the neck, mid spine, wrists, hand tips and thumbs,
whose motion is either redundant (neck, mid spine) or tied to the hand joints.
Kept joints are ordered by ascending enumeration index; that ordering is part
of the trained-model contract and is recorded in every model file.
"""

from __future__ import annotations

from dataclasses import dataclass, field

N_JOINTS = 25
N_KEPT = 17

JOINT_NAMES = (
    "SpineBase",       # 0
    "SpineMid",        # 1
    "Neck",            # 2
    "Head",            # 3
    "ShoulderLeft",    # 4
    "ElbowLeft",       # 5
    "WristLeft",       # 6
    "HandLeft",        # 7
    "ShoulderRight",   # 8
    "ElbowRight",      # 9
    "WristRight",      # 10
    "HandRight",       # 11
    "HipLeft",         # 12
    "KneeLeft",        # 13
    "AnkleLeft",       # 14
    "FootLeft",        # 15
    "HipRight",        # 16
    "KneeRight",       # 17
    "AnkleRight",      # 18
    "FootRight",       # 19
    "SpineShoulder",   # 20
    "HandTipLeft",     # 21
    "ThumbLeft",       # 22
    "HandTipRight",    # 23
    "ThumbRight",      # 24
)

JOINT_INDEX = {name: i for i, name in enumerate(JOINT_NAMES)}

DISCARDED_JOINT_NAMES = (
    "SpineMid",
    "Neck",
    "WristLeft",
    "WristRight",
    "HandTipLeft",
    "ThumbLeft",
    "HandTipRight",
    "ThumbRight",
)


def _default_kept() -> tuple[int, ...]:
    discarded = {JOINT_INDEX[n] for n in DISCARDED_JOINT_NAMES}
    return tuple(i for i in range(N_JOINTS) if i not in discarded)


@dataclass(frozen=True)
class JointMask:
    """Partition of the 25 joint indices into kept and discarded sets.

    Both tuples are ordered; `kept` ordering determines the layout of the
    17-component axis vectors fed to the auto-encoders.
    """

    kept: tuple[int, ...] = field(default_factory=_default_kept)

    def __post_init__(self):
        kept = tuple(self.kept)
        if not kept:
            raise ValueError("joint mask must keep at least one joint")
        if len(kept) != len(set(kept)):
            raise ValueError("joint mask contains duplicate indices")
        if any(not 0 <= i < N_JOINTS for i in kept):
            raise ValueError("joint mask index out of range 0..24")
        object.__setattr__(self, "kept", kept)

    @property
    def discarded(self) -> tuple[int, ...]:
        kept = set(self.kept)
        return tuple(i for i in range(N_JOINTS) if i not in kept)

    @property
    def n_kept(self) -> int:
        return len(self.kept)

    def kept_names(self) -> tuple[str, ...]:
        return tuple(JOINT_NAMES[i] for i in self.kept)


DEFAULT_MASK = JointMask()
