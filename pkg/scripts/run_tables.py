#!/usr/bin/env python3
"""Re-run every bundled regression manifest and print a summary.

Equivalent to `cosetcap tables` but collects timing per table.  Expect a
handful of FAIL lines at tight tolerances: those reference values carry
more solver noise than their printed digits (see the per-table default
tolerances in the manifests).
"""

import sys
import time

from cosetcap.tables import TABLE_NAMES, format_results, run_manifest


def main() -> int:
    names = sys.argv[1:] or list(TABLE_NAMES)
    overall = True
    for name in names:
        t0 = time.time()
        results = run_manifest(name)
        print(format_results(name, results))
        print(f"[{name}] {time.time() - t0:.1f}s\n")
        overall &= all(r.passed for r in results)
    return 0 if overall else 1


if __name__ == "__main__":
    sys.exit(main())
