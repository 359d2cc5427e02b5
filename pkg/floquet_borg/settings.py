from pydantic import PositiveFloat
from pydantic_settings import BaseSettings, SettingsConfigDict

TOL_HERM = 1e-10
TOL_EIG = 1e-10
TOL_GEN = 1e-8
TOL_SING = 1e-12
TOL_CIRCLE = 1e-6
TOL_IDENTITY = 1e-9
TOL_DET = 1e-8
TOL_CLUSTER = 1e-7
TOL_MERGE = 1e-9
TOL_DETECT = 1e-6
TOL_GAUGE = 1e-9
TOL_UNIT_TAU = 1e-12

ENV_PREFIX = "FLB_TOL_"


class Tolerances(BaseSettings):
    """
    Numerical tolerances used by the command-line front door.

    Every field can be set through an environment variable named ``FLB_TOL_<FIELD>``
    (e.g. ``FLB_TOL_CIRCLE=1e-5``). Library functions never read these settings; they take
    explicit keyword tolerances whose defaults are the module constants above.
    """

    model_config = SettingsConfigDict(env_prefix=ENV_PREFIX, extra="ignore")

    herm: PositiveFloat = TOL_HERM
    eig: PositiveFloat = TOL_EIG
    gen: PositiveFloat = TOL_GEN
    sing: PositiveFloat = TOL_SING
    circle: PositiveFloat = TOL_CIRCLE
    identity: PositiveFloat = TOL_IDENTITY
    det: PositiveFloat = TOL_DET
    cluster: PositiveFloat = TOL_CLUSTER
    merge: PositiveFloat = TOL_MERGE
    detect: PositiveFloat = TOL_DETECT
    gauge: PositiveFloat = TOL_GAUGE

    def override(self, **flags: float | None) -> "Tolerances":
        """
        Return a copy with the given flag values applied on top of the environment.

        Args:
            **flags (float | None): Tolerance values keyed by field name; ``None`` keeps the current value.

        Returns:
            Tolerances: A validated copy with the overrides applied.
        """
        updates = {key: value for key, value in flags.items() if value is not None}
        unknown = set(updates) - set(type(self).model_fields)
        if unknown:
            raise KeyError(f"Unknown tolerance(s): {', '.join(sorted(unknown))}.")

        return type(self).model_validate({**self.model_dump(), **updates})
