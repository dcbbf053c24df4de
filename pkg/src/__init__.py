"""
Multiscatter - monostatic vs. multistatic backscatter network analysis.

This package provides tools to:
- Evaluate closed-form BER, diversity-order, information-outage and energy-outage expressions
- Simulate FSK scatter-radio links over Nakagami dyadic fading channels
- Average metrics over random tag placements on square grids
- Search carrier-emitter placements and emit reproducible CSV/gnuplot curves
"""

__app_name__ = "multiscatter"
