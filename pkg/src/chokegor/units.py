"""Unit conversions between file/CLI boundary units and internal SI.

Internal basis everywhere: K, Pa, J/mol, mole fractions. Field-unit
datasets (psia, degrees Rankine) and CLI values (bara, Celsius) are
converted exactly once, at the boundary.
"""

RANKINE_PER_KELVIN = 1.8
PASCAL_PER_PSIA = 6894.757293168
PASCAL_PER_BAR = 1.0e5
CELSIUS_ZERO_K = 273.15

# Sm3 convention: 15 degC and 1 atm.
STANDARD_PRESSURE_PA = 101325.0
STANDARD_TEMPERATURE_K = 288.15


def rankine_to_kelvin(t_r: float) -> float:
    return t_r / RANKINE_PER_KELVIN


def kelvin_to_rankine(t_k: float) -> float:
    return t_k * RANKINE_PER_KELVIN


def psia_to_pascal(p_psia: float) -> float:
    return p_psia * PASCAL_PER_PSIA


def pascal_to_psia(p_pa: float) -> float:
    return p_pa / PASCAL_PER_PSIA


def bar_to_pascal(p_bar: float) -> float:
    return p_bar * PASCAL_PER_BAR


def pascal_to_bar(p_pa: float) -> float:
    return p_pa / PASCAL_PER_BAR


def celsius_to_kelvin(t_c: float) -> float:
    return t_c + CELSIUS_ZERO_K


def kelvin_to_celsius(t_k: float) -> float:
    return t_k - CELSIUS_ZERO_K
