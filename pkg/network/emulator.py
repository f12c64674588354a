# network/emulator.py

import copy
from dataclasses import dataclass, field
import logging
import math

from .codes import CODE_BITS
from .frames import (
    Mode, SetCode, SetCodeList, SetSwitchInterval, SteeringEnable, SetMode,
    ProtocolError, decode,
)

CLOCK_HZ = 100e6
WORD_MASK = (1 << CODE_BITS) - 1
APPLY_LATENCY_TICKS = 1

EVENT_SWITCH = 'switch'
EVENT_ACK = 'ack'
EVENT_NACK = 'nack'


@dataclass(frozen=True)
class TimelineEvent:
    tick: int
    kind: str
    radiation_word: int
    detail: str = ''


@dataclass
class EmulatorState:
    """
    Register view of the beam-steering controller.

    The diode word drives the PIN diodes (1 = ON = element shorted); the
    radiation word is its bitwise complement. At power-up every element radiates.
    """
    clock_ticks: int = 0
    active_diode_word: int = 0
    mode: Mode = Mode.SINGLE
    enabled: bool = True
    interval_ticks: int = 1
    single_code: int | None = None
    code_list: tuple = ()
    list_index: int = 0
    next_switch_tick: int | None = None
    pending: list = field(default_factory=list)
    rx_buffer: bytes = b''

    @property
    def active_radiation_word(self):
        return ~self.active_diode_word & WORD_MASK


class BeamSteeringEmulator:
    """
    Tick-accurate model of the controller clocked at CLOCK_HZ.

    Bytes handed to step() are received at the current tick; each decoded
    command takes effect APPLY_LATENCY_TICKS later, in arrival order.
    """

    def __init__(self, state=None):
        self.state = state if state is not None else EmulatorState()
        self._events = []

    @property
    def radiation_word(self):
        return self.state.active_radiation_word

    def step(self, incoming=b'', n_ticks=0):
        """
        Receive `incoming` and advance the clock by `n_ticks`.

        :return: Timeline events (word changes, ACKs, NACKs) inside the advanced span.
        """
        if n_ticks < 0:
            raise ValueError(f"n_ticks must be non-negative, got {n_ticks}")
        s = self.state
        self._events = []
        self._receive(bytes(incoming))
        end = s.clock_ticks + n_ticks
        while True:
            next_cmd = s.pending[0][0] if s.pending else math.inf
            next_sw = s.next_switch_tick if self._switching() else math.inf
            tick = min(next_cmd, next_sw)
            if tick > end:
                break
            # A switch that is already due runs before a command landing on the same tick
            if next_sw <= next_cmd:
                self._advance_list(next_sw)
            else:
                _, item = s.pending.pop(0)
                self._apply(next_cmd, item)
        s.clock_ticks = end
        return self._events

    # ==============================
    # Internals
    # ==============================

    def _receive(self, data):
        s = self.state
        buffer = s.rx_buffer + data
        apply_at = s.clock_ticks + APPLY_LATENCY_TICKS
        while buffer:
            result = decode(buffer)
            buffer = buffer[result.consumed:]
            if result.needs_more:
                break
            s.pending.append((apply_at, result.command if result.command is not None else result.error))
        s.rx_buffer = buffer

    def _switching(self):
        s = self.state
        return s.enabled and s.mode == Mode.MULTI and s.next_switch_tick is not None

    def _drive(self, tick, radiation_word):
        s = self.state
        radiation_word &= WORD_MASK
        if radiation_word == s.active_radiation_word:
            return
        s.active_diode_word = ~radiation_word & WORD_MASK
        self._events.append(TimelineEvent(tick, EVENT_SWITCH, radiation_word))

    def _nack(self, tick, reason):
        logging.warning(f"NACK at tick {tick}: {reason}")
        self._events.append(TimelineEvent(tick, EVENT_NACK, self.radiation_word, str(reason)))

    def _ack(self, tick, command):
        self._events.append(TimelineEvent(tick, EVENT_ACK, self.radiation_word, type(command).__name__))

    def _start_list(self, tick):
        s = self.state
        s.list_index = 0
        self._drive(tick, s.code_list[0])
        s.next_switch_tick = tick + s.interval_ticks

    def _advance_list(self, tick):
        s = self.state
        s.list_index = (s.list_index + 1) % len(s.code_list)
        self._drive(tick, s.code_list[s.list_index])
        s.next_switch_tick = tick + s.interval_ticks

    def _resume(self, tick):
        s = self.state
        if s.mode == Mode.MULTI:
            self._start_list(tick)
        else:
            s.next_switch_tick = None
            if s.single_code is not None:
                self._drive(tick, s.single_code)

    def _apply(self, tick, item):
        s = self.state
        if isinstance(item, ProtocolError):
            self._nack(tick, item)
            return
        if isinstance(item, SetMode) and item.mode == Mode.MULTI and not s.code_list:
            self._nack(tick, "multi-beam mode requested with an empty code list")
            return
        if isinstance(item, SetCode):
            s.single_code = item.code.to_int()
            self._ack(tick, item)
            if s.enabled and s.mode == Mode.SINGLE:
                self._drive(tick, s.single_code)
        elif isinstance(item, SetCodeList):
            s.code_list = tuple(c.to_int() for c in item.codes)
            self._ack(tick, item)
            if s.enabled and s.mode == Mode.MULTI:
                self._start_list(tick)
        elif isinstance(item, SetSwitchInterval):
            s.interval_ticks = item.ticks
            self._ack(tick, item)
            if self._switching():
                s.next_switch_tick = tick + s.interval_ticks
        elif isinstance(item, SteeringEnable):
            was_enabled = s.enabled
            s.enabled = item.enabled
            self._ack(tick, item)
            if not s.enabled:
                s.next_switch_tick = None
            elif not was_enabled:
                self._resume(tick)
        elif isinstance(item, SetMode):
            changed = item.mode != s.mode
            s.mode = item.mode
            self._ack(tick, item)
            if s.enabled and changed:
                self._resume(tick)
        else:
            self._nack(tick, f"unexpected command {item!r}")


def emulator_step(state, incoming=b'', n_ticks=0):
    """
    Functional form of BeamSteeringEmulator.step.

    :return: (new_state, timeline) with `state` left untouched.
    """
    emulator = BeamSteeringEmulator(copy.deepcopy(state))
    timeline = emulator.step(incoming, n_ticks)
    return emulator.state, timeline


def radiation_timeline(events, initial_word=None, start_tick=0):
    """(tick, radiation_word) pairs of the word changes in `events`, optionally led by the initial word."""
    timeline = [] if initial_word is None else [(start_tick, initial_word)]
    timeline.extend((e.tick, e.radiation_word) for e in events if e.kind == EVENT_SWITCH)
    return timeline


@dataclass(frozen=True)
class SwitchingRate:
    ratio: float
    capable: bool


def switching_rate_check(interval_ticks, symbol_rate, clock_hz=CLOCK_HZ):
    """
    Compare the code switching period with the symbol period.

    A ratio of 1 or more means every code stays up for at least one symbol.
    """
    if interval_ticks < 1:
        raise ValueError(f"interval_ticks must be at least 1, got {interval_ticks}")
    if not symbol_rate > 0 or not clock_hz > 0:
        raise ValueError("symbol_rate and clock_hz must be positive")
    ratio = clock_hz / (interval_ticks * symbol_rate)
    return SwitchingRate(ratio=ratio, capable=ratio >= 1.0)
