# network/serial_protocol.py

import asyncio
import logging

from .emulator import BeamSteeringEmulator, EVENT_ACK, EVENT_NACK

ACK = 0x06
NACK = 0x15


class BeamControlProtocol(asyncio.Protocol):
    """
    Byte-stream front end of the beam-steering emulator.

    Every applied command is answered with ACK (0x06) or NACK (0x15) on the transport.
    """

    def __init__(self, emulator=None, ticks_per_chunk=0):
        super().__init__()
        self.transport = None
        self.emulator = emulator if emulator is not None else BeamSteeringEmulator()
        self.ticks_per_chunk = ticks_per_chunk
        self.events = []

    def connection_made(self, transport):
        """
        Called when the control link is opened.
        """
        self.transport = transport
        logging.info('Control link opened')

    def data_received(self, data):
        """
        Called when bytes arrive from the host.
        """
        logging.debug(f"Received {len(data)} control bytes at tick {self.emulator.state.clock_ticks}")
        self._handle(self.emulator.step(data, self.ticks_per_chunk))

    def connection_lost(self, exc):
        """
        Called when the control link is closed.
        """
        if exc is not None:
            logging.error(f"Control link lost: {exc}")
        logging.info('Control link closed')

    def advance(self, n_ticks):
        """Run the clock without new input; replies for commands applied meanwhile are sent."""
        events = self.emulator.step(b'', n_ticks)
        self._handle(events)
        return events

    def _handle(self, events):
        self.events.extend(events)
        for event in events:
            if event.kind == EVENT_ACK:
                self._reply(ACK)
            elif event.kind == EVENT_NACK:
                self._reply(NACK)

    def _reply(self, code):
        if self.transport is None:
            logging.warning("Reply dropped: no transport")
            return
        self.transport.write(bytes((code,)))


class TraceTransport(asyncio.Transport):
    """In-memory transport that records everything written to it."""

    def __init__(self):
        super().__init__()
        self.written = bytearray()
        self._closing = False

    def write(self, data):
        self.written += data

    def is_closing(self):
        return self._closing

    def close(self):
        self._closing = True
