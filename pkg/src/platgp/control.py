"""The per-frame 6-bit input vector and its canonical integer encoding."""

from dataclasses import dataclass

from .kernels import BIT_DOWN, BIT_FIRE, BIT_JUMP, BIT_LEFT, BIT_RIGHT, BIT_UP


@dataclass(frozen=True)
class ControlVector:
    """One frame of input. Bit 5 is shared: held = run, rising edge = shoot."""

    left: bool = False
    right: bool = False
    up: bool = False
    down: bool = False
    jump: bool = False
    fire: bool = False

    def encode(self) -> int:
        return (BIT_LEFT * self.left | BIT_RIGHT * self.right
                | BIT_UP * self.up | BIT_DOWN * self.down
                | BIT_JUMP * self.jump | BIT_FIRE * self.fire)

    @classmethod
    def decode(cls, bits: int) -> "ControlVector":
        if not 0 <= bits <= 63:
            raise ValueError(f"control encoding out of range 0..63: {bits}")
        return cls(left=bool(bits & BIT_LEFT), right=bool(bits & BIT_RIGHT),
                   up=bool(bits & BIT_UP), down=bool(bits & BIT_DOWN),
                   jump=bool(bits & BIT_JUMP), fire=bool(bits & BIT_FIRE))

    def __int__(self) -> int:
        return self.encode()
