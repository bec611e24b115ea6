"""
Run manifest written next to every command's outputs.
"""
import hashlib
import json
import os
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, List

import yaml

MANIFEST_NAME = 'manifest.yaml'
TOOL_VERSION = '1.0.0'


def config_digest(effective: Dict[str, Any]) -> str:
    """
    sha256 of the effective configuration in canonical JSON form.
    """
    canonical = json.dumps(effective, sort_keys=True, separators=(',', ':'), default=str)
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


@dataclass
class RunManifest:
    """
    Record of one command run: what was asked, with which effective
    settings, and which files came out.
    """
    command: str
    effective_config: Dict[str, Any]
    seed: int
    threads: int
    outputs: List[str] = field(default_factory=list)
    stage_seconds: Dict[str, float] = field(default_factory=dict)
    created: str = field(default_factory=lambda: datetime.now().isoformat(timespec='seconds'))

    @property
    def digest(self) -> str:
        return config_digest(self.effective_config)

    def add_output(self, path: str):
        self.outputs.append(os.path.basename(path))

    @contextmanager
    def stage(self, name: str):
        """
        Time a block of work under the given stage name.
        """
        start = time.perf_counter()
        try:
            yield
        finally:
            self.stage_seconds[name] = time.perf_counter() - start

    def to_dict(self) -> Dict[str, Any]:
        return {
            'tool_version': TOOL_VERSION,
            'command': self.command,
            'created': self.created,
            'seed': self.seed,
            'threads': self.threads,
            'config_sha256': self.digest,
            'effective_config': json.loads(json.dumps(self.effective_config, default=str)),
            'outputs': list(self.outputs),
            'stage_seconds': {name: round(seconds, 6) for name, seconds in self.stage_seconds.items()},
        }

    def write(self, out_dir: str) -> str:
        """
        Write the manifest into out_dir.

        Args:
            out_dir: Output directory of the run

        Returns:
            str: Path of the manifest file
        """
        path = os.path.join(out_dir, MANIFEST_NAME)
        with open(path, 'w', encoding='utf-8') as f:
            yaml.safe_dump(self.to_dict(), f, sort_keys=True, default_flow_style=False)
        return path
