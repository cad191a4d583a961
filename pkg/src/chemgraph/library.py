"""The packaged graph library: one .mol file plus one .txt comment per
entry.  A `# chem: <name>` comment line in the mol file names the
chemistry the entry parses under."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .chemistry import builtin
from .molcore import MolPattern


@dataclass(frozen=True)
class LibraryEntry:
    id: str
    mol_text: str
    chemistry: str
    comment: str

    def parse(self) -> MolPattern:
        return builtin(self.chemistry).parse(self.mol_text)


def _chem_of(mol_text: str) -> str:
    for line in mol_text.splitlines():
        line = line.strip()
        if line.startswith("#") and "chem:" in line:
            return line.split("chem:", 1)[1].strip()
    return "chemlambda-v2"


def _from_dir(root: Path) -> dict[str, LibraryEntry]:
    entries = {}
    for mol_path in sorted(root.glob("*.mol")):
        entry_id = mol_path.stem
        mol_text = mol_path.read_text()
        comment_path = mol_path.with_suffix(".txt")
        comment = comment_path.read_text().strip() if comment_path.exists() else ""
        entries[entry_id] = LibraryEntry(
            id=entry_id,
            mol_text=mol_text,
            chemistry=_chem_of(mol_text),
            comment=comment,
        )
    return entries


def load_library(libdir: str | None = None) -> dict[str, LibraryEntry]:
    """Entries from `libdir`, or the packaged library when omitted."""
    if libdir is not None:
        return _from_dir(Path(libdir))
    root = resources.files("chemgraph").joinpath("library")
    with resources.as_file(root) as path:
        return _from_dir(Path(path))


def get_entry(entry_id: str, libdir: str | None = None) -> LibraryEntry:
    entries = load_library(libdir)
    if entry_id not in entries:
        known = ", ".join(sorted(entries)) or "(none)"
        raise KeyError(f"no library entry {entry_id!r}; known: {known}")
    return entries[entry_id]
