"""Speaker/listener gender labels shared by the annotator, codec and evaluation."""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Role(enum.Enum):
    SPEAKER = "speaker"
    LISTENER = "listener"


class Gender(enum.Enum):
    MASC = "m"
    FEM = "f"


_ROLE_ORDER = {Role.SPEAKER: 0, Role.LISTENER: 1}
_GENDER_ORDER = {Gender.MASC: 0, Gender.FEM: 1}


@dataclass(frozen=True)
class GenderLabel:
    role: Role
    gender: Gender

    def sort_key(self) -> tuple[int, int]:
        return _ROLE_ORDER[self.role], _GENDER_ORDER[self.gender]

    def __str__(self) -> str:
        return f"{self.role.value}/{self.gender.value}"


SPEAKER_M = GenderLabel(Role.SPEAKER, Gender.MASC)
SPEAKER_F = GenderLabel(Role.SPEAKER, Gender.FEM)
LISTENER_M = GenderLabel(Role.LISTENER, Gender.MASC)
LISTENER_F = GenderLabel(Role.LISTENER, Gender.FEM)

# speaker before listener, masculine before feminine
ALL_LABELS = (SPEAKER_M, SPEAKER_F, LISTENER_M, LISTENER_F)


def sorted_labels(labels) -> list[GenderLabel]:
    return sorted(labels, key=GenderLabel.sort_key)


def check_one_per_role(labels) -> None:
    """Raise ValueError if two labels share a role."""
    seen = set()
    for label in labels:
        if label.role in seen:
            raise ValueError(f"more than one {label.role.value} label: {sorted(map(str, labels))}")
        seen.add(label.role)
