#!/usr/bin/env python3
"""
Logging Configuration for SparseReg Runs

Each command writes its results into one output directory. Logs go to
``logs/`` inside it, with a detailed file handler and a terse console
handler; ``manifest.json`` records the resolved configuration and input
digests. Log lines carry timestamps, every other artifact is deterministic.
"""

import json
import logging
from pathlib import Path
from typing import Dict, Optional

LOG_FILE = 'sparsereg.log'
LIBRARY_LOGGERS = ('models', 'simulations')


class RunLogger:
    """Manages output directories, log handlers and the manifest of one run."""

    def __init__(self, output_dir, console_level: int = logging.INFO):
        """
        Create the output layout and attach handlers.

        Args:
            output_dir: Directory receiving every artifact of the run
            console_level: Level of the console handler
        """
        self.run_dir = Path(output_dir)
        self.logs_dir = self.run_dir / "logs"
        for directory in (self.run_dir, self.logs_dir):
            directory.mkdir(parents=True, exist_ok=True)

        detailed_formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )
        simple_formatter = logging.Formatter('%(levelname)s - %(message)s')

        file_handler = logging.FileHandler(self.logs_dir / LOG_FILE, encoding='utf-8')
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(detailed_formatter)

        console_handler = logging.StreamHandler()
        console_handler.setLevel(console_level)
        console_handler.setFormatter(simple_formatter)

        self.handlers = [file_handler, console_handler]
        self.loggers = [logging.getLogger(name) for name in LIBRARY_LOGGERS]
        for logger in self.loggers:
            logger.setLevel(logging.DEBUG)
            for handler in self.handlers:
                logger.addHandler(handler)

        self.main_logger = logging.getLogger('simulations.run')
        self.main_logger.info(f"Run initialized: {self.run_dir}")

    def get_data_path(self, filename: str) -> Path:
        """Path of a result file; nested names create their directory."""
        path = self.run_dir / filename
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def log_stage_start(self, stage: str, config: Dict):
        self.main_logger.info("=" * 80)
        self.main_logger.info(f"Starting {stage}")
        self.main_logger.debug(f"Configuration: {config}")

    def log_stage_end(self, stage: str, summary: Optional[Dict] = None):
        self.main_logger.info(f"Completed {stage}" + (f": {summary}" if summary else ""))
        self.main_logger.info("=" * 80)

    def log_error(self, stage: str, error: Exception):
        self.main_logger.error(f"Error in {stage}: {error}", exc_info=True)

    def create_run_manifest(self, manifest: Dict) -> Path:
        """Write ``manifest.json`` with sorted keys and no timestamp."""
        manifest_path = self.run_dir / 'manifest.json'
        with open(manifest_path, 'w', encoding='utf-8') as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
            f.write('\n')
        self.main_logger.info(f"Manifest created: {manifest_path}")
        return manifest_path

    def finalize(self):
        """Detach and close the run's handlers."""
        self.main_logger.info(f"All outputs saved to: {self.run_dir}")
        for logger in self.loggers:
            for handler in self.handlers:
                logger.removeHandler(handler)
        for handler in self.handlers:
            handler.close()


def setup_logging(output_dir, verbose: bool = False, quiet: bool = False) -> RunLogger:
    """
    Set up logging for a run.

    Args:
        output_dir: Output directory of the run
        verbose: Console at DEBUG
        quiet: Console at WARNING

    Returns:
        Configured RunLogger instance
    """
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    return RunLogger(output_dir, level)
