"""Figure registry: the parameter sweeps behind every figure panel.

Gaps, pulse width and area, initial state and drive strength are fixed
per model. Rate grids are free choices, marked ``# registry choice`` below.
"""

import math

from ..errors import UnknownFigure
from .config import ScenarioConfig

# registry choice: decade grid over the discussed regimes, zero first as the unitary anchor
RATE_SWEEP = (0.0, 1e-5, 1e-4, 5e-4, 1e-3, 1e-2)
# registry choice: charger dephasing eta/g for the bipartite panels
BIPARTITE_SWEEP = (0.0, 0.1, 0.2, 0.5, 1.0)
# registry choice: bipartite run length in units of tau = 2 pi / omega_qb
BIPARTITE_DURATION = 30.0
BIPARTITE_GRID = 6000
# the weaker channel rides at a tenth of the swept one
SECONDARY_FRACTION = 0.1

TWO_LEVEL = dict(model="two_level", pulse_area=math.pi / 2, sigma_ratio=1 / 8, gap_ratio=10.0,
                 a=1.0, phi=0.0)
THREE_LEVEL = dict(model="three_level", pulse_area=math.pi, sigma_ratio=1 / 16, gap_ratio=100.0,
                   gap2_ratio=95.0, a=1.0, c=0.0, phi=0.0, varphi=0.0)
BIPARTITE = dict(model="bipartite", coupling=1.0, drive_ratio=0.5, duration=BIPARTITE_DURATION,
                 grid_points=BIPARTITE_GRID)


def _rate_sweep(base, figure, swept):
    out = []
    for k, rate in enumerate(RATE_SWEEP):
        other = SECONDARY_FRACTION * rate
        rates = dict(gamma=rate, eta=other) if swept == "gamma" else dict(gamma=other, eta=rate)
        out.append(ScenarioConfig(name=f"{figure}-{swept}{k:02d}", figure=figure, **base, **rates))
    return out


def _bipartite(figure):
    return [ScenarioConfig(name=f"{figure}-eta{k:02d}", figure=figure, eta=eta, **BIPARTITE)
            for k, eta in enumerate(BIPARTITE_SWEEP)]


def _both_channels(figure):
    # 2LS and 3LS side by side at matched rates
    panel = figure[-1]
    swept = "gamma" if panel == "a" else "eta"
    return (_rate_sweep(TWO_LEVEL, figure, swept)
            + [c.replace(name=c.name.replace(figure, figure + "-3ls"))
               for c in _rate_sweep(THREE_LEVEL, figure, swept)])


_BUILDERS = {
    # fig2x and fig3x share their runs: populations and GP vs I_E of the same sweep
    "fig2a": lambda: _rate_sweep(TWO_LEVEL, "fig2a", "gamma"),
    "fig2b": lambda: _rate_sweep(TWO_LEVEL, "fig2b", "eta"),
    "fig3a": lambda: _rate_sweep(TWO_LEVEL, "fig3a", "gamma"),
    "fig3b": lambda: _rate_sweep(TWO_LEVEL, "fig3b", "eta"),
    "fig4a": lambda: _rate_sweep(THREE_LEVEL, "fig4a", "gamma"),
    "fig4b": lambda: _rate_sweep(THREE_LEVEL, "fig4b", "eta"),
    "fig5a": lambda: _rate_sweep(THREE_LEVEL, "fig5a", "gamma"),
    "fig5b": lambda: _rate_sweep(THREE_LEVEL, "fig5b", "eta"),
    "fig6a": lambda: _both_channels("fig6a"),
    "fig6b": lambda: _both_channels("fig6b"),
    "fig8": lambda: _bipartite("fig8"),
    "fig9": lambda: _bipartite("fig9"),
}

FIGURES = tuple(_BUILDERS)


def figure_registry(name):
    """Configs of one figure panel, or of every panel for ``"fig-all"``."""
    if name == "fig-all":
        return [cfg for fig in FIGURES for cfg in _BUILDERS[fig]()]
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise UnknownFigure(f"unknown figure {name!r}; choose from {', '.join(FIGURES)} or fig-all") from None
