# File: utils/config.py
import os
from dataclasses import dataclass, field
from pathlib import Path

from dotenv import dotenv_values, load_dotenv, set_key

from models.exceptions import ConfigError, RwaError
from models.models import Family, VariableRole, VariableSpec

load_dotenv()


class EnvSetting:
    """A Config attribute read from the environment when it is used.

    A malformed value raises ConfigError at the point of use, where the CLI
    turns it into exit code 2.
    """

    def __init__(self, name, default, cast=str):
        self.name = name
        self.default = default
        self.cast = cast

    def __get__(self, instance, owner):
        value = os.environ.get(self.name)
        if not value:
            return self.default
        try:
            return self.cast(value)
        except ValueError:
            raise ConfigError(f"{self.name} must be a {self.cast.__name__}, got '{value}'") from None


class Config:
    """Process configuration, read from the environment or a .env file"""
    RWA_THREADS = EnvSetting("RWA_THREADS", os.cpu_count() or 1, int)
    RWA_LOG_LEVEL = EnvSetting("RWA_LOG_LEVEL", "INFO")

    # Logistic fitting
    IRLS_TOL = EnvSetting("RWA_IRLS_TOL", 1e-8, float)
    IRLS_MAX_ITER = EnvSetting("RWA_IRLS_MAX_ITER", 100, int)
    PROB_CLAMP = EnvSetting("RWA_PROB_CLAMP", 1e-10, float)

    # Simulation defaults
    SIMULATION_SIZE = EnvSetting("RWA_SIMULATION_SIZE", 3000, int)


FORMATS = ("table", "csv", "json")
CRITERIA = ("bic", "aic")
_SWITCH = {"on": True, "true": True, "yes": True, "1": True,
           "off": False, "false": False, "no": False, "0": False}


def parse_variables(text):
    """Parse 'X1:free:5, X3:control, X4:fixed:3' into VariableSpec objects."""
    specs = []
    for item in (part.strip() for part in text.split(",")):
        if not item:
            continue
        fields = [f.strip() for f in item.split(":")]
        if len(fields) > 3 or not fields[0]:
            raise ConfigError(f"Cannot parse variable '{item}'; expected name:role[:knots]")
        name = fields[0]
        role = fields[1].lower() if len(fields) > 1 and fields[1] else VariableRole.FREE.value
        if role not in {r.value for r in VariableRole}:
            raise ConfigError(f"Unknown role '{role}' for variable '{name}'")
        knots = None
        if len(fields) == 3:
            try:
                knots = int(fields[2])
            except ValueError:
                raise ConfigError(f"Knot count for '{name}' must be an integer, got '{fields[2]}'")
        specs.append(VariableSpec(name, VariableRole(role), knots))
    return specs


def format_variables(specs):
    return ",".join(f"{s.name}:{s.role.value}:{s.knots}" for s in specs)


@dataclass(frozen=True)
class RunConfig:
    input_path: Path
    response: str
    family: Family = Family.GAUSSIAN
    variables: tuple = field(default_factory=tuple)
    selection: bool = True
    criterion: str = "bic"
    output_format: str = "table"
    output_path: Path = None
    seed: int = None

    def validate(self):
        if not self.response:
            raise ConfigError("No response column given")
        if not self.variables:
            raise ConfigError("No predictor variables given")
        names = [spec.name for spec in self.variables]
        if self.response in names:
            raise ConfigError(f"Response '{self.response}' is also listed as a predictor")
        if len(set(names)) != len(names):
            raise ConfigError("A variable is listed more than once")
        if all(spec.is_control for spec in self.variables):
            raise ConfigError("At least one variable must be fixed or free")
        if self.output_format not in FORMATS:
            raise ConfigError(f"Unknown output format '{self.output_format}'")
        if self.criterion not in CRITERIA:
            raise ConfigError(f"Unknown selection criterion '{self.criterion}'")
        return self

    @classmethod
    def from_mapping(cls, values):
        """Build a config from KEY=VALUE pairs (file contents and flag overrides)."""
        values = {k.upper(): v for k, v in values.items() if v is not None and v != ""}
        try:
            family = Family(values.get("FAMILY", Family.GAUSSIAN.value).lower())
        except ValueError:
            raise ConfigError(f"Unknown family '{values.get('FAMILY')}'")
        selection = values.get("SELECTION", "on")
        if isinstance(selection, str):
            if selection.lower() not in _SWITCH:
                raise ConfigError(f"SELECTION must be on or off, got '{selection}'")
            selection = _SWITCH[selection.lower()]
        try:
            seed = int(values["SEED"]) if "SEED" in values else None
        except ValueError:
            raise ConfigError(f"SEED must be an integer, got '{values['SEED']}'")
        if "INPUT" not in values:
            raise ConfigError("No input file given")
        return cls(
            input_path=Path(values["INPUT"]),
            response=values.get("RESPONSE", ""),
            family=family,
            variables=tuple(parse_variables(values.get("VARIABLES", ""))),
            selection=bool(selection),
            criterion=values.get("CRITERION", "bic").lower(),
            output_format=values.get("FORMAT", "table").lower(),
            output_path=Path(values["OUTPUT"]) if "OUTPUT" in values else None,
            seed=seed,
        ).validate()

    @classmethod
    def load(cls, path=None, **overrides):
        values = {}
        if path is not None:
            path = Path(path)
            if not path.is_file():
                raise ConfigError(f"Config file not found: {path}")
            values.update(dotenv_values(path))
            # relative input paths are resolved against the config file
            if values.get("INPUT") and not Path(values["INPUT"]).is_absolute():
                values["INPUT"] = str(path.parent / values["INPUT"])
        values.update({k.upper(): v for k, v in overrides.items() if v is not None})
        try:
            return cls.from_mapping(values)
        except RwaError:
            raise
        except (TypeError, ValueError) as e:
            raise ConfigError(str(e))

    def save(self, path):
        """Write the config as a dotenv file that RunConfig.load reads back."""
        path = Path(path)
        path.write_text("# Run configuration (KEY=VALUE)\n", encoding="utf-8")
        entries = {
            "INPUT": os.path.relpath(Path(self.input_path).resolve(), path.resolve().parent),
            "RESPONSE": self.response,
            "FAMILY": self.family.value,
            "VARIABLES": format_variables(self.variables),
            "SELECTION": "on" if self.selection else "off",
            "CRITERION": self.criterion,
            "FORMAT": self.output_format,
        }
        if self.output_path is not None:
            entries["OUTPUT"] = str(self.output_path)
        if self.seed is not None:
            entries["SEED"] = str(self.seed)
        for key, value in entries.items():
            set_key(str(path), key, value, quote_mode="never")
        return path
