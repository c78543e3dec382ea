# File: models/exceptions.py


class RwaError(Exception):
    """Base class for every error raised by the analysis pipeline"""
    exit_code = 1


class ConfigError(RwaError):
    exit_code = 2


class DataError(RwaError):
    exit_code = 3


class NumericalError(RwaError):
    exit_code = 4


# Configuration errors

class UnsupportedKnotCount(ConfigError):
    def __init__(self, k):
        super().__init__(f"Unsupported knot count {k}; use 1 (linear), 3, 4 or 5")
        self.k = k


class ControlInInteraction(ConfigError):
    def __init__(self, name):
        super().__init__(f"Control variable '{name}' cannot enter an interaction")
        self.name = name


# Data errors

class MissingColumn(DataError):
    def __init__(self, name):
        super().__init__(f"Column '{name}' not found in data")
        self.name = name


class DegenerateVariable(DataError):
    def __init__(self, name, detail):
        super().__init__(f"Variable '{name}' is degenerate: {detail}")
        self.name = name


class NonBinaryResponse(DataError):
    def __init__(self, row, value):
        super().__init__(f"Binary response has value {value!r} at row {row}; expected 0 or 1")
        self.row = row
        self.value = value


class ConstantResponse(DataError):
    def __init__(self, detail="response has zero variance"):
        super().__init__(detail)


class MalformedCoefficientTable(DataError):
    pass


# Numerical errors

class RankDeficient(NumericalError):
    def __init__(self, where):
        super().__init__(f"Rank-deficient columns: {where}")
        self.where = where


class ZeroVarianceColumn(NumericalError):
    def __init__(self, index, label=None):
        name = label if label is not None else f"#{index}"
        super().__init__(f"Column {name} has zero variance")
        self.index = index


class DegenerateFit(NumericalError):
    pass


class SeparationWarning(UserWarning):
    """Logistic fit did not converge, usually because of (quasi-)separation"""
