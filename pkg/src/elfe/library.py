"""Library resolution for Include directives, with the bundled geometry texts.

Libraries are ordinary `.elfe` documents searched first in user-supplied
directories, then in the bundled `lib/` directory. An optional
`<name>.manifest` next to the file lists `preverified: <label>` lines for
lemmas whose proofs may be skipped when the library itself is verified.
Loaded libraries are cached immutably per store; include cycles are
rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .desugar import Document, desugar
from .errors import CyclicInclude, LibraryNotFound, Loc
from .fol import Formula
from .notation import NotationPattern
from .parser import parse_source

BUNDLED_DIR = Path(__file__).parent / "lib"
CORPUS_DIR = Path(__file__).parent / "corpus"


@dataclass(frozen=True)
class Library:
    name: str
    notations: tuple[NotationPattern, ...]
    premises: tuple[tuple[str, str, Formula], ...]  # (label, kind, formula)
    path: str
    preverified: frozenset[str] = frozenset()
    document: Document | None = field(default=None, compare=False)


def _parse_manifest(path: Path) -> frozenset[str]:
    if not path.exists():
        return frozenset()
    labels = set()
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line.startswith("preverified:"):
            labels.add(line.split(":", 1)[1].strip())
    return frozenset(labels)


class LibraryStore:
    """Search-path backed loader with per-store caching."""

    def __init__(self, search_paths: list[str | Path] | None = None, bundled: bool = True):
        self.search_paths = [Path(p) for p in (search_paths or [])]
        if bundled:
            self.search_paths.append(BUNDLED_DIR)
        self.inline: dict[str, str] = {}
        self._cache: dict[str, Library] = {}

    def add_inline(self, name: str, text: str) -> None:
        """Register an in-memory library (used by the verification service)."""
        self.inline[name] = text
        self._cache.pop(name, None)

    def available(self) -> list[str]:
        names = set(self.inline)
        for p in self.search_paths:
            if p.is_dir():
                names.update(f.stem for f in p.glob("*.elfe"))
        return sorted(names)

    def find(self, name: str) -> Path | None:
        for p in self.search_paths:
            candidate = p / f"{name}.elfe"
            if candidate.is_file():
                return candidate
        return None

    def load(self, name: str, loc: Loc | None = None, _stack: tuple[str, ...] = ()) -> Library:
        if name in self._cache:
            return self._cache[name]
        if name in _stack:
            chain = " -> ".join(_stack + (name,))
            raise CyclicInclude(f"library include cycle: {chain}", loc)
        if name in self.inline:
            source = self.inline[name]
            path = f"<inline:{name}>"
            preverified: frozenset[str] = frozenset()
        else:
            found = self.find(name)
            if found is None:
                raise LibraryNotFound(f"library {name!r} not found on the search path", loc)
            source = found.read_text(encoding="utf-8")
            path = str(found)
            preverified = _parse_manifest(found.with_suffix(".manifest"))
        raw = parse_source(source)
        doc = desugar(raw, self.resolver(_stack + (name,)))
        premises = doc.ambient + tuple((d.label, d.kind, d.formula) for d in doc.decls)
        lib = Library(
            name=name,
            notations=doc.scope.patterns,
            premises=premises,
            path=path,
            preverified=preverified,
            document=doc,
        )
        self._cache[name] = lib
        return lib

    def resolver(self, _stack: tuple[str, ...] = ()):
        def resolve(name: str, loc: Loc) -> Library:
            return self.load(name, loc, _stack)

        return resolve


def load_library(name: str, search_paths: list[str | Path] | None = None) -> Library:
    """Convenience one-shot loader."""
    return LibraryStore(search_paths).load(name)


# ---------------------------------------------------------------------------
# Bundled corpus manifest


def corpus_examples() -> dict[str, Path]:
    """Display name -> corpus file, from the corpus manifest."""
    out: dict[str, Path] = {}
    manifest = CORPUS_DIR / "manifest.txt"
    if not manifest.exists():
        return out
    for line in manifest.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line.startswith("example:"):
            name, _, fname = line[len("example:"):].partition("=")
            out[name.strip()] = CORPUS_DIR / fname.strip()
    return out


def corpus_external_tags() -> dict[str, set[str]]:
    """Corpus file name -> obligation ids tagged requires-external."""
    out: dict[str, set[str]] = {}
    manifest = CORPUS_DIR / "manifest.txt"
    if not manifest.exists():
        return out
    for line in manifest.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line.startswith("requires-external:"):
            rest = line[len("requires-external:"):].split()
            if len(rest) == 2:
                out.setdefault(rest[0], set()).add(rest[1])
    return out
