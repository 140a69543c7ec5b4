"""Time the CTPH kernels on the numba path and on the numpy fallback.

Each path runs in its own interpreter, since the switch is read at import:

    python3 benchmarks/bench_kernels.py --sizes 4096 65536 1048576 --repeat 5
"""

import argparse
import json
import os
import subprocess
import sys
import time

WORKER = r"""
import json, sys, time
import numpy as np
from obfusclab._jit import JIT_ENABLED
from obfusclab.ctph import fuzzy_compare, fuzzy_hash, format_signature

sizes, repeat = json.loads(sys.argv[1]), int(sys.argv[2])
rng = np.random.default_rng(1234)
rows = []
fuzzy_hash(rng.integers(0, 256, 2048, dtype=np.uint8).tobytes())  # warm up / compile
for n in sizes:
    data = rng.integers(0, 256, n, dtype=np.uint8).tobytes()
    other = bytearray(data)
    other[n // 2:n // 2 + 64] = bytes(64)
    best, sig = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        sig = fuzzy_hash(data)
        best = min(best, time.perf_counter() - t)
    t = time.perf_counter()
    score = fuzzy_compare(sig, fuzzy_hash(bytes(other)))
    rows.append({"size": n, "hash_s": best, "compare_s": time.perf_counter() - t,
                 "signature": format_signature(sig), "score": score})
print(json.dumps({"jit": JIT_ENABLED, "rows": rows}))
"""


def run_path(disable_jit: bool, sizes, repeat: int) -> dict:
    env = dict(os.environ, OBFUSCLAB_DISABLE_JIT="1" if disable_jit else "0")
    out = subprocess.run([sys.executable, "-c", WORKER, json.dumps(sizes), str(repeat)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[4096, 65536, 1 << 20])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    start = time.perf_counter()
    jit = run_path(False, args.sizes, args.repeat)
    fallback = run_path(True, args.sizes, args.repeat)
    print(f"{'bytes':>9} {'numba ms':>10} {'numpy ms':>10} {'speedup':>8}  same")
    same_all = True
    for a, b in zip(jit["rows"], fallback["rows"]):
        same = a["signature"] == b["signature"] and a["score"] == b["score"]
        same_all &= same
        print(f"{a['size']:>9} {a['hash_s'] * 1e3:>10.2f} {b['hash_s'] * 1e3:>10.2f} "
              f"{b['hash_s'] / a['hash_s']:>7.1f}x  {'yes' if same else 'NO'}")
    if not jit["jit"]:
        print("note: numba unavailable, both columns ran the fallback")
    print(f"total {time.perf_counter() - start:.1f}s")
    return 0 if same_all else 1


if __name__ == "__main__":
    sys.exit(main())
