"""Model checking and truth-preserving translations for CTL*, ACTL*, UCTL* and UPML."""
from .checker2 import CheckConfig, Checker, check, check_path, check_state, check_state_star
from .checker3 import eval_ex_upml, eval_upml, kleene_and, kleene_not, kleene_or
from .formulas import Logic, conforms
from .mappings import MAPPINGS, bundle, map_path
from .parser import load_structure, parse_formula, parse_path, render_formula, save_structure
from .structures import Kmts, Ks, Kts, Lasso, Lts, Truth3, mu_paths, validate

__version__ = "0.1.0"
