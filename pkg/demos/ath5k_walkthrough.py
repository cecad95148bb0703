"""
An option that never changes the build
======================================

A small Atheros driver tree where ``ATH_PCI`` can be switched on even
though the driver that would use it is off. We walk the tree through every
stage: model, presence conditions, feature effect, SAT test, triage.
"""

import tempfile

from kmismatch import (
    RunConfig, compile_vm, emit_report, feature_effect, parse_kconfig, run_analysis, to_text,
)
from kmismatch.fixtures import fixture_files, write_fixture

root = tempfile.mkdtemp(prefix="ath5k-")
write_fixture("ath5k", root)

# %%
# The source tree. The PCI glue is a composite part of ath5k.o, so it is
# only linked when ATH5K itself is built in or a module.
for path, text in sorted(fixture_files("ath5k").items()):
    if path.endswith(("Kconfig", "Makefile")) and "ath5k" in path:
        print(f"--- {path}\n{text}")

# %%
# Kconfig becomes one propositional formula. The tristate ATH5K turns into
# two atoms, ATH5K_y and ATH5K_m.
model = parse_kconfig(f"{root}/Kconfig", root=root)
vm = compile_vm(model)
print(vm.atom_map["ATH5K"])
for c in vm.constraints_about("ATH_PCI"):
    print(" ", c)

# %%
# The pipeline does the rest. Each source file and #ifdef block gets a
# presence condition over the same atoms.
result = run_analysis(RunConfig(root))
for pc in result.pcs:
    print(f"{pc.space:5} {pc.location:40} {to_text(pc.condition)}")

# %%
# The feature effect of ATH_PCI: the situations in which flipping it
# changes which code is compiled.
fe = feature_effect("ATH_PCI", result.pcs)
print(to_text(fe.effect))

# %%
# The model allows ATH_PCI=y with the effect false, so the selection is
# wasted. The witness is a minimal partial configuration showing how.
(t,) = result.report.mismatches
print(t.category, t.severity)
for w in t.mismatch.witnesses:
    print(w)

# %%
# The full text report, as the CLI prints it.
print(emit_report(result.report, "text").decode())
