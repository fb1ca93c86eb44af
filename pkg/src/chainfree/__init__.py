"""A decision procedure for chain-free string constraints with transducers and lengths."""
from .automata import Alphabet, Nfa, from_regex
from .constraints import (Cube, Equation, LengthAtom, Not, RegularConstraint, StrLit, TransducerConstraint)
from .engine import SolveResult, SolverConfig, solve
from .transducer import Transducer

__all__ = ["Alphabet", "Cube", "Equation", "LengthAtom", "Nfa", "Not", "RegularConstraint", "SolveResult",
           "SolverConfig", "StrLit", "Transducer", "TransducerConstraint", "from_regex", "solve"]
