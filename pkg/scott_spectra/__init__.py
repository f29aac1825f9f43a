from .linorder import LinOrder, OrderElem, mk_order
from .rn_system import build_rn
from .trivial_rn import TrivialRn
from .greedy_rn import GreedyRn
from .kstruct import EVal, KStruct, Report, check_axioms
from .amalgam import Embedding, amalgamate, amalgamate_point, extend_tuple, isolate_embed
from .limitgen import Approx, grow, new_approx, realize
from .backforth import challenger_distinguish, defender_game, free_witness_evidence
from .finite_rank import FinStruct, scott_rank_finite
from .spectra import SpectrumDescriptor, predicted_spectrum
