import difflib
import os
import time
from contextlib import contextmanager
from pathlib import Path

from slugify import slugify as py_slugify

from bm_census.constants import JOBS_ENV_VAR, OUTPUT_DIR, PROJECT_ROOT


def relpath(p: Path) -> str:
    """Return path relative to project root."""
    try:
        return str(p.resolve().relative_to(PROJECT_ROOT))
    except ValueError:
        return str(p)


def slugify(name: str) -> str:
    """Slugify to lowercase with underscores, preserving alphanumerics."""
    return py_slugify(name, separator="_", lowercase=True)


def resolve_output_path(target: str | None, stem: str, suffix: str) -> Path:
    """
    Pick where a report is written.
    Priority:
      1) an explicit file path
      2) a slugified file name inside an explicit directory
      3) a slugified file name inside OUTPUT_DIR
    """
    name = f"{slugify(stem)}.{suffix}"
    if target is None:
        return OUTPUT_DIR / name
    path = Path(target)
    if path.is_dir() or target.endswith(("/", "\\")):
        return path / name
    return path


def resolve_jobs(jobs: int | None) -> int:
    """Worker count from an explicit value, BM_CENSUS_JOBS, or the CPU count."""
    if jobs is None:
        raw = os.environ.get(JOBS_ENV_VAR, "").strip()
        if not raw:
            return os.cpu_count() or 1
        try:
            jobs = int(raw)
        except ValueError:
            raise ValueError(f"❌ {JOBS_ENV_VAR} must be an integer, got {raw!r}") from None
    if jobs < 1:
        raise ValueError(f"❌ Job count must be at least 1, got {jobs}")
    return jobs


def near_matches(word: str, options: list[str], limit: int = 3) -> list[str]:
    """Closest spellings of `word` among `options`, case-insensitive."""
    lowered = {o.lower(): o for o in options}
    hits = difflib.get_close_matches(word.lower(), list(lowered), n=limit, cutoff=0.5)
    return [lowered[h] for h in hits]


@contextmanager
def stopwatch():
    """Yield a callable returning seconds elapsed since entry."""
    start = time.perf_counter()
    yield lambda: time.perf_counter() - start
