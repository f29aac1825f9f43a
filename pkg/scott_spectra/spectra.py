import json
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Iterable, List, Sequence, Tuple

from scott_spectra._ordinals import OrdCNF
from scott_spectra._utils import SpectrumError
from scott_spectra.linorder import mk_order, wf_of, wfc_of

WFC = "wfc"
WF = "wf"


@dataclass(frozen=True)
class SpectrumDescriptor:
    """
    Finite set of Scott ranks together with the (order spec, mode) pairs that produced them.

    Order specs in the provenance are canonical JSON text.
    """
    entries: FrozenSet[OrdCNF] = frozenset()
    provenance: Tuple[Tuple[str, str], ...] = ()

    def sorted_entries(self) -> List[OrdCNF]:
        return sorted(self.entries)

    def to_dict(self) -> Dict[str, Any]:
        return {"entries": [e.to_json() for e in self.sorted_entries()],
                "provenance": [[json.loads(spec), mode] for spec, mode in self.provenance]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SpectrumDescriptor":
        return cls(frozenset(OrdCNF.from_json(e) for e in data["entries"]),
                   tuple((json.dumps(spec, sort_keys=True), mode) for spec, mode in data["provenance"]))

    def __str__(self) -> str:
        return "{" + ", ".join(str(e) for e in self.sorted_entries()) + "}"


def _merge(provenances: Iterable[Tuple[Tuple[str, str], ...]]) -> Tuple[Tuple[str, str], ...]:
    return tuple(sorted({p for prov in provenances for p in prov}))


def predicted_spectrum(specs: Sequence[Any], mode: str = WFC) -> SpectrumDescriptor:
    """
    Scott spectrum predicted for the theories built from the given orders.

    Parameters:
    -----------
    specs : Sequence[Any]
        Order specs accepted by ``mk_order``.

    mode : str
        ``wfc`` for the construction with ranks wfc(L), ``wf`` for the one with ranks wf(L). Default is wfc.

    Returns:
    --------
    SpectrumDescriptor
    """
    if mode not in (WFC, WF):
        raise ValueError(f"Unknown spectrum mode {mode!r}")
    rank = wfc_of if mode == WFC else wf_of
    orders = [mk_order(spec) for spec in specs]
    return SpectrumDescriptor(frozenset(rank(order) for order in orders),
                              _merge([((json.dumps(order.spec, sort_keys=True), mode),) for order in orders]))


def spectrum_union(ds: Sequence[SpectrumDescriptor]) -> SpectrumDescriptor:
    return SpectrumDescriptor(frozenset().union(*(d.entries for d in ds)), _merge(d.provenance for d in ds))


def spectrum_cutoff(d: SpectrumDescriptor, alpha: OrdCNF) -> SpectrumDescriptor:
    """Entries >= alpha"""
    return SpectrumDescriptor(frozenset(e for e in d.entries if e >= alpha), d.provenance)


def spectrum_patch(d: SpectrumDescriptor, below: OrdCNF, replacement: Iterable[OrdCNF]) -> SpectrumDescriptor:
    """Keep the entries >= below and replace the rest by ``replacement``, whose entries must lie below it"""
    replacement = frozenset(replacement)
    bad = sorted(r for r in replacement if not r < below)
    if bad:
        raise SpectrumError(f"Replacement entries must lie below {below}", [str(r) for r in bad])
    return SpectrumDescriptor(frozenset(e for e in d.entries if e >= below) | replacement, d.provenance)
