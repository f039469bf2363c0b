"""Retrieval and caching of the SNAP social networks.

Files are downloaded once into a cache directory, normalized to a plain
whitespace edge list and written with an atomic rename, so concurrent
invocations never see a partial file.

Integrity: a registry entry may pin a SHA-256 of the normalized edge list.
Entries without one are checked against their published node and edge
counts on first download; the digest is then recorded next to the file and
enforced on every later use.
"""

from __future__ import annotations

import gzip
import hashlib
import io
import logging
import os
import tempfile
import time
import urllib.error
import urllib.request
import zipfile
from dataclasses import dataclass
from pathlib import Path

from .exceptions import DataError, IntegrityError, NetworkError

log = logging.getLogger(__name__)

CACHE_ENV = "FRAC_INFLUENCE_CACHE"


@dataclass(frozen=True)
class DatasetInfo:
    name: str
    url: str
    directed: bool
    nodes: int | None = None
    edges: int | None = None
    member: str | None = None  # file inside a zip archive
    sha256: str | None = None


REGISTRY = {
    "facebook": DatasetInfo("facebook", "https://snap.stanford.edu/data/facebook_combined.txt.gz",
                            directed=False, nodes=4039, edges=88234),
    "wiki-vote": DatasetInfo("wiki-vote", "https://snap.stanford.edu/data/wiki-Vote.txt.gz",
                             directed=True, nodes=7115, edges=103689),
    "deezer": DatasetInfo("deezer", "https://snap.stanford.edu/data/deezer_europe.zip",
                          directed=False, nodes=28281, edges=92752,
                          member="deezer_europe/deezer_europe_edges.csv"),
}


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "fracinfluence"


def resolve(name: str) -> DatasetInfo:
    key = name.lower()
    if key in REGISTRY:
        return REGISTRY[key]
    if key.startswith(("http://", "https://")):
        stem = Path(name.split("?")[0]).name
        for suffix in (".gz", ".zip", ".txt", ".csv"):
            stem = stem.removesuffix(suffix)
        return DatasetInfo(stem or "download", name, directed=True)
    raise DataError(f"unknown dataset {name!r}; expected one of {sorted(REGISTRY)} or a URL")


def _download(url: str, retries: int = 2, timeout: float = 60.0) -> bytes:
    last = None
    for attempt in range(retries + 1):
        try:
            with urllib.request.urlopen(url, timeout=timeout) as resp:
                return resp.read()
        except (urllib.error.URLError, OSError) as exc:
            last = exc
            log.warning("download of %s failed (attempt %d): %s", url, attempt + 1, exc)
            if attempt < retries:
                time.sleep(min(2.0 ** attempt, 10.0))
    raise NetworkError(f"could not download {url}: {last}")


def _normalize(raw: bytes, info: DatasetInfo) -> bytes:
    """Decompress and convert to ``u v`` lines."""
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    elif raw[:4] == b"PK\x03\x04":
        with zipfile.ZipFile(io.BytesIO(raw)) as zf:
            names = zf.namelist()
            member = info.member if info.member in names else next(
                (n for n in names if n.endswith((".csv", ".txt", ".edges")) and "edge" in n.lower()), None)
            if member is None:
                raise DataError(f"no edge list found in archive {info.url}")
            raw = zf.read(member)
    text = raw.decode("utf-8")
    if "," in text.split("\n", 2)[0] or (text[:1].isalpha()):
        lines = text.splitlines()
        body = [ln.replace(",", " ") for ln in lines if ln.strip() and not ln[:1].isalpha()]
        text = "\n".join(body) + "\n"
    return text.encode("utf-8")


def _counts(data: bytes):
    nodes, edges = set(), 0
    for line in data.decode("utf-8").splitlines():
        parts = line.split()
        if len(parts) == 2 and not line.startswith("#"):
            nodes.update(parts)
            edges += 1
    return len(nodes), edges


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _atomic_write(path: Path, data: bytes):
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".part")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def fetch_dataset(name: str, cache_dir=None, *, registry=None, retries: int = 2) -> Path:
    """Return the local path of a dataset's edge list, downloading if needed.

    ``name`` is a registry key (``facebook``, ``wiki-vote``, ``deezer``) or a
    URL. Raises :class:`NetworkError` when the download fails and
    :class:`IntegrityError` (after deleting the file) on a checksum mismatch.
    """
    info = (registry or REGISTRY).get(name.lower()) or resolve(name)
    cache = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    cache.mkdir(parents=True, exist_ok=True)
    path = cache / f"{info.name}.txt"
    digest_path = cache / f"{info.name}.txt.sha256"

    if path.exists():
        expected = info.sha256 or (digest_path.read_text().strip() if digest_path.exists() else None)
        if expected is not None:
            actual = _sha256(path.read_bytes())
            if actual != expected:
                path.unlink()
                raise IntegrityError(f"{path} has sha256 {actual}, expected {expected}; file removed")
        log.debug("cache hit for %s", info.name)
        return path

    data = _normalize(_download(info.url, retries=retries), info)
    actual = _sha256(data)
    if info.sha256 is not None and actual != info.sha256:
        raise IntegrityError(f"download of {info.url} has sha256 {actual}, expected {info.sha256}")
    if info.sha256 is None and info.edges is not None:
        nodes, edges = _counts(data)
        if (nodes, edges) != (info.nodes, info.edges):
            raise IntegrityError(f"{info.name}: got {nodes} nodes / {edges} edges, "
                                 f"expected {info.nodes} / {info.edges}")
    _atomic_write(path, data)
    _atomic_write(digest_path, (actual + "\n").encode())
    return path
