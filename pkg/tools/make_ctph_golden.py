"""Record golden CTPH vectors with the reference ssdeep library (pydeep2).

Run once before trusting the implementation; the output is committed and the
test suite never imports pydeep.

    python tools/make_ctph_golden.py > tests/data/ctph_golden.json
"""

import json
import sys
from pathlib import Path

import pydeep

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
import ctph_corpus  # noqa: E402


def main():
    files = []
    for i in range(ctph_corpus.N_FILES):
        data = ctph_corpus.file_bytes(i)
        sig = pydeep.hash_buf(data).decode()
        variants = {}
        for name, fn in ctph_corpus.VARIANTS.items():
            vsig = pydeep.hash_buf(fn(data, i)).decode()
            variants[name] = {"signature": vsig, "score": pydeep.compare(sig.encode(), vsig.encode())}
        files.append({"index": i, "size": len(data), "signature": sig, "variants": variants})
    doc = {
        "tool": "pydeep2 %s (bundled libfuzzy.so.2.1.0)" % getattr(pydeep, "__version__", "?"),
        "files": files,
    }
    json.dump(doc, sys.stdout, indent=1)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
