from dataclasses import dataclass


@dataclass(frozen=True)
class AsymptoticCoefficients:
    """nu at the stationary points, the connection constants delta_0^-+ and
    delta(0), plus rho(-1), rho(1)."""
    nu0_minus: float
    nu0_plus: float
    delta0_minus: complex
    delta0_plus: complex
    delta_at_zero: complex
    rho_minus: complex = 0j
    rho_plus: complex = 0j


@dataclass(frozen=True)
class StationaryAmplitudes:
    """f_-(x/t), f_+(x/t) of the radiation asymptotics."""
    speed: float
    z0: float
    f_minus: complex
    f_plus: complex

    @property
    def modulus_minus(self) -> float:
        return abs(self.f_minus) ** 2

    @property
    def modulus_plus(self) -> float:
        return abs(self.f_plus) ** 2
