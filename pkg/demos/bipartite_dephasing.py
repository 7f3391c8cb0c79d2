"""Charger-battery pair: a driven, dephased charger qubit passes energy to
a battery qubit. Without dephasing the battery energy keeps oscillating;
charger dephasing damps the oscillation and stabilises the stored energy.

    python demos/bipartite_dephasing.py
"""

from qbphase.experiments import ScenarioConfig, run_scenario
from qbphase.experiments.registry import BIPARTITE, BIPARTITE_SWEEP
from qbphase.observables import EnergySeries, charge_stability, oscillation_amplitude

print(" eta/g   E(end)    osc. amplitude   stability    GP(end)")
for eta in BIPARTITE_SWEEP:
    res = run_scenario(ScenarioConfig(name=f"eta{eta}", eta=eta, **BIPARTITE))
    c = res.columns
    series = EnergySeries(c["t"], c["energy"], c["energy_integral"])
    print(f" {eta:<5}  {c['energy'][-1]:7.4f}   {oscillation_amplitude(series):10.4f}"
          f"      {charge_stability(series):.2e}   {c['gp'][-1]:9.3f}")
