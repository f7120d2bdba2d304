"""Testbed loading, candidate enumeration, and synthetic testbed generation.

A testbed is a set of source artifacts (requirements, use cases, pull
requests), a set of target artifacts (code, test cases), and a ground-truth
oracle of links. The candidate space is always the full cartesian product
sources x targets.
"""

from __future__ import annotations

import json
import random
import string
from dataclasses import dataclass, field
from pathlib import Path


class CorpusError(Exception):
    """Raised for missing files, malformed oracles, or dangling artifact ids."""


@dataclass(frozen=True)
class Artifact:
    id: str
    role: str  # "source" or "target"
    raw_text: str
    origin_path: str = ""

    @property
    def is_empty(self) -> bool:
        return not self.raw_text.strip()


@dataclass(frozen=True)
class TraceLink:
    source_id: str
    target_id: str


@dataclass(frozen=True)
class CandidatePair:
    source_id: str
    target_id: str
    is_link: bool


@dataclass
class Testbed:
    name: str
    link_type: str
    language_tag: str
    sources: list[Artifact]
    targets: list[Artifact]
    links: set[TraceLink] = field(default_factory=set)

    def __post_init__(self) -> None:
        for role, artifacts in (("source", self.sources), ("target", self.targets)):
            seen: set[str] = set()
            for a in artifacts:
                if not a.id:
                    raise CorpusError(f"empty {role} artifact id")
                if a.id in seen:
                    raise CorpusError(f"duplicate {role} artifact id: {a.id}")
                seen.add(a.id)
        src_ids = {a.id for a in self.sources}
        tgt_ids = {a.id for a in self.targets}
        dangling = sorted(
            {l.source_id for l in self.links if l.source_id not in src_ids}
            | {l.target_id for l in self.links if l.target_id not in tgt_ids}
        )
        if dangling:
            raise CorpusError(f"oracle references unknown artifact ids: {', '.join(dangling)}")

    @property
    def n_all(self) -> int:
        return len(self.sources) * len(self.targets)

    @property
    def n_links(self) -> int:
        return len(self.links)

    @property
    def n_non_links(self) -> int:
        return self.n_all - self.n_links

    @property
    def empty_artifact_ids(self) -> list[str]:
        """Ids of artifacts with no text content. Admitted, but flagged."""
        return [a.id for a in self.sources + self.targets if a.is_empty]


def load_testbed(manifest_path: str | Path) -> Testbed:
    """Load a testbed from a JSON manifest.

    The manifest holds {"name", "link_type", "language_tag", "source_dir",
    "target_dir", "oracle_file"}; directories contain one file per artifact
    (id = basename without extension), the oracle is answer-file style:
    ``source_id target_id_1 target_id_2 ...`` per line, '#' comments ignored.
    """
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise CorpusError(f"manifest not found: {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusError(f"malformed manifest {manifest_path}: {exc}") from exc

    base = manifest_path.parent
    for key in ("name", "source_dir", "target_dir", "oracle_file"):
        if key not in manifest:
            raise CorpusError(f"manifest missing required key: {key}")

    sources = _read_artifact_dir(base / manifest["source_dir"], "source")
    targets = _read_artifact_dir(base / manifest["target_dir"], "target")
    links = _read_oracle(base / manifest["oracle_file"])
    return Testbed(
        name=manifest["name"],
        link_type=manifest.get("link_type", ""),
        language_tag=manifest.get("language_tag", ""),
        sources=sources,
        targets=targets,
        links=links,
    )


def _read_artifact_dir(directory: Path, role: str) -> list[Artifact]:
    if not directory.is_dir():
        raise CorpusError(f"{role} directory not found: {directory}")
    artifacts = []
    for path in sorted(p for p in directory.iterdir() if p.is_file()):
        artifacts.append(
            Artifact(
                id=path.stem,
                role=role,
                raw_text=path.read_text(encoding="utf-8", errors="replace"),
                origin_path=str(path),
            )
        )
    if not artifacts:
        raise CorpusError(f"no {role} artifacts under {directory}")
    return artifacts


def _read_oracle(path: Path) -> set[TraceLink]:
    if not path.is_file():
        raise CorpusError(f"oracle file not found: {path}")
    links: set[TraceLink] = set()
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) < 2:
            raise CorpusError(f"malformed oracle line {lineno}: {line!r}")
        src = fields[0]
        for tgt in fields[1:]:
            links.add(TraceLink(src, tgt))
    return links


def enumerate_candidates(tb: Testbed) -> list[CandidatePair]:
    """Full cross product, ordered by (source_id, target_id), labeled by ground truth."""
    link_set = {(l.source_id, l.target_id) for l in tb.links}
    return [
        CandidatePair(s, t, (s, t) in link_set)
        for s in sorted(a.id for a in tb.sources)
        for t in sorted(a.id for a in tb.targets)
    ]


def generate_synthetic(
    seed: int,
    n_src: int,
    n_tgt: int,
    overlap: float,
    tokens_per_artifact: int = 20,
) -> Testbed:
    """Generate a deterministic testbed with planted links.

    Links are planted on the diagonal (i-th source to i-th target). Each
    linked target shares ``overlap`` of its source's token vocabulary (same
    counts) and fills the rest with fresh tokens; non-linked pairs share
    nothing.
    """
    if n_src < 1 or n_tgt < 1:
        raise ValueError("n_src and n_tgt must be >= 1")
    if not 0.0 <= overlap <= 1.0:
        raise ValueError(f"overlap must be in [0, 1], got {overlap}")

    rng = random.Random(seed)
    minted: set[str] = set()

    def mint_token() -> str:
        while True:
            tok = "".join(rng.choice(string.ascii_lowercase) for _ in range(7))
            if tok not in minted:
                minted.add(tok)
                return tok

    def render(bag: list[tuple[str, int]]) -> str:
        words = [tok for tok, count in bag for _ in range(count)]
        rng.shuffle(words)
        return " ".join(words)

    m = tokens_per_artifact
    k_shared = round(overlap * m)
    sources, targets, links = [], [], set()
    source_bags: list[list[tuple[str, int]]] = []
    for i in range(n_src):
        bag = [(mint_token(), rng.randint(1, 3)) for _ in range(m)]
        source_bags.append(bag)
        sources.append(Artifact(f"SRC{i:03d}", "source", render(bag)))
    for j in range(n_tgt):
        if j < n_src:
            shared = source_bags[j][:k_shared]
            bag = shared + [(mint_token(), rng.randint(1, 3)) for _ in range(m - k_shared)]
            links.add(TraceLink(f"SRC{j:03d}", f"TGT{j:03d}"))
        else:
            bag = [(mint_token(), rng.randint(1, 3)) for _ in range(m)]
        targets.append(Artifact(f"TGT{j:03d}", "target", render(bag)))
    return Testbed(
        name=f"synthetic-{seed}",
        link_type="synth",
        language_tag="en",
        sources=sources,
        targets=targets,
        links=links,
    )


def write_testbed(tb: Testbed, out_dir: str | Path) -> Path:
    """Materialize a testbed on disk and return the manifest path."""
    out = Path(out_dir)
    (out / "sources").mkdir(parents=True, exist_ok=True)
    (out / "targets").mkdir(parents=True, exist_ok=True)
    for a in tb.sources:
        (out / "sources" / f"{a.id}.txt").write_text(a.raw_text, encoding="utf-8")
    for a in tb.targets:
        (out / "targets" / f"{a.id}.txt").write_text(a.raw_text, encoding="utf-8")
    by_source: dict[str, list[str]] = {}
    for link in sorted(tb.links, key=lambda l: (l.source_id, l.target_id)):
        by_source.setdefault(link.source_id, []).append(link.target_id)
    oracle_lines = [f"{src} {' '.join(tgts)}" for src, tgts in sorted(by_source.items())]
    (out / "oracle.txt").write_text("\n".join(oracle_lines) + "\n", encoding="utf-8")
    manifest = {
        "name": tb.name,
        "link_type": tb.link_type,
        "language_tag": tb.language_tag,
        "source_dir": "sources",
        "target_dir": "targets",
        "oracle_file": "oracle.txt",
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return manifest_path
