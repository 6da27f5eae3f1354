#!/usr/bin/env python3
"""Run every built-in example scenario and print a digest of the artifacts.

Usage: python3 scripts/run_examples.py [out_dir]
"""
import sys
from pathlib import Path

from conesim import BUILTIN_EXAMPLES, builtin_example, run_scenario, serialize_scenario


def main() -> int:
    out_root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out/examples")
    for name in sorted(BUILTIN_EXAMPLES):
        scenario = builtin_example(name)
        out_dir = out_root / name
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "scenario.json").write_text(serialize_scenario(scenario))
        result = run_scenario(scenario, out_dir=out_dir)
        s = result.summary
        print(f"== {name}: {BUILTIN_EXAMPLES[name]}")
        print(f"   status={s['status']} iterations={s['iterations']}")
        print(f"   final_lyapunov={s['final_lyapunov']}")
        if "diameter" in s:
            values = [w["value"] for w in s["diameter"]["windows"]]
            print(f"   diameters of matrix powers: {values}")
        if "image_radius" in s:
            r = s["image_radius"]
            print(
                f"   image radius (power {r['power']}): lower={r['lower']} "
                f"upper={r['upper']} factor={r['contraction_factor']:.6f}"
            )
        if "fixed_point" in s:
            fp = s["fixed_point"]
            print(
                f"   fixed point residual={fp['residual']:.3e} unique={fp['unique']} "
                f"certified={fp['hypothesis_certified']}"
            )
        if "duality" in s:
            print(f"   duality pairing error={s['duality']['max_pairing_error']:.3e}")
        print(f"   artifacts: {result.trace_path}, {result.summary_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
