from typing import Any, Sequence


class QPNError(Exception):
    """Base class for every error raised by qpn_planner."""


class ModelSyntaxError(QPNError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class InvalidNetworkError(QPNError, ValueError):
    def __init__(self, violations: Sequence[Any]):
        self.violations = list(violations)
        details = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid network: {details}")


class ReductionError(QPNError, ValueError):
    pass


class StrategyError(QPNError, ValueError):
    pass


class OrderTooLargeError(QPNError, ValueError):
    pass


class InfeasibleModelError(QPNError, ValueError):
    def __init__(self, variable: str, influences: Sequence[str]):
        self.variable = variable
        self.influences = list(influences)
        super().__init__(
            f"no strictly consistent model for '{variable}': conflicting influences "
            + ", ".join(self.influences)
        )


class OracleCapacityError(QPNError, ValueError):
    pass


class OracleContradiction(QPNError):
    """A symbolic dominance proof was falsified by a sampled model."""

    def __init__(self, proof: Any, model_index: int, eu_dominator: float, eu_dominated: float):
        self.proof = proof
        self.model_index = model_index
        self.eu_dominator = eu_dominator
        self.eu_dominated = eu_dominated
        super().__init__(
            f"sampled model {model_index} contradicts {getattr(proof.kind, 'value', proof.kind)} proof against "
            f"{proof.dominated}: EU(dominator)={eu_dominator:.12g} < "
            f"EU(dominated)={eu_dominated:.12g}"
        )
