# data/manifest.py

from dataclasses import dataclass, field
import hashlib
import logging
import os

import aiofiles

from .exporters import read_json, write_json

MANIFEST_NAME = "manifest.json"
CHUNK_SIZE = 1 << 16


@dataclass(frozen=True)
class RunManifest:
    """
    What a run needs to be reproduced: command, version, seed, merged
    settings and the SHA-256 of every output file (relative to the run
    directory). Nothing time dependent goes in.
    """
    command: str
    version: str
    seed: int
    config: dict
    outputs: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "command": self.command,
            "version": self.version,
            "seed": self.seed,
            "config": self.config,
            "outputs": dict(sorted(self.outputs.items())),
        }

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(command=data["command"], version=data["version"], seed=int(data["seed"]),
                       config=data["config"], outputs=dict(data["outputs"]))
        except (KeyError, TypeError, ValueError) as e:
            raise ValueError(f"Malformed manifest: {e}") from e


async def sha256_file(path):
    digest = hashlib.sha256()
    async with aiofiles.open(path, 'rb') as file:
        while True:
            chunk = await file.read(CHUNK_SIZE)
            if not chunk:
                break
            digest.update(chunk)
    return digest.hexdigest()


async def write_manifest(out_dir, command, version, seed, config, files):
    """
    Checksum `files` and write manifest.json into `out_dir`.

    :param files: Paths of the run's outputs.
    :return: The RunManifest written.
    """
    outputs = {}
    for path in files:
        outputs[os.path.relpath(path, out_dir).replace("\\", "/")] = await sha256_file(path)
    manifest = RunManifest(command=command, version=version, seed=seed, config=config, outputs=outputs)
    await write_json(os.path.join(out_dir, MANIFEST_NAME), manifest.to_dict())
    logging.info(f"Manifest lists {len(outputs)} output file(s)")
    return manifest


async def load_manifest(out_dir):
    return RunManifest.from_dict(await read_json(os.path.join(out_dir, MANIFEST_NAME)))


async def verify_manifest(out_dir):
    """Names of outputs whose current checksum differs from the manifest (missing files included)."""
    manifest = await load_manifest(out_dir)
    mismatched = []
    for name, expected in manifest.outputs.items():
        path = os.path.join(out_dir, name)
        if not os.path.isfile(path) or await sha256_file(path) != expected:
            mismatched.append(name)
    return mismatched
