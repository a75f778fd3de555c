"""Regenerate the three figure data sets and their trend checks into demo_output/.

Simulation overlays are skipped here to keep the run short; the CLI commands
`patchy-rx fig2` and `patchy-rx fig3` include them.
"""

from pathlib import Path

from patchyrx import experiments as ex

out = Path(__file__).resolve().parent / "demo_output"
for result in (ex.run_fig2(out_dir=out, simulate_overlay=False),
               ex.run_fig3(out_dir=out, simulate_overlay=False),
               ex.run_fig4(out_dir=out)):
    print(f"{result.name}: {sum(c.passed for c in result.checks)}/{len(result.checks)} checks pass")
    for check in result.checks[:3]:
        print("   ", check.line())
print(f"\nCSV and SVG files are in {out}")
