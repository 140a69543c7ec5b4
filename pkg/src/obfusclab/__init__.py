"""obfusclab: measure how semantics-preserving assembly rewrites move
fuzzy-hash similarity.

Subpackages:

* :mod:`obfusclab.ctph` -- context triggered piecewise hashing and SHA-1 lists
* :mod:`obfusclab.asm` -- textual x86-64 listing parser/emitter
* :mod:`obfusclab.transforms` -- dead code, register substitution, instruction
  replacement and the mixed pipeline
* :mod:`obfusclab.semcheck` -- straight-line evaluator for differential checks
* :mod:`obfusclab.metrics` -- change constant, aggregation and report formats
"""

__version__ = "0.1.0"
