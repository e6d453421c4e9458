class TreefreeError(Exception):
    pass


class ParseError(TreefreeError, ValueError):
    """Malformed word text, unknown symbol or invalid presentation file."""


class BudgetExhausted(TreefreeError):
    """A bounded computation hit its work cap before finishing.

    Distinct from a negative answer: the question is left undecided.
    """

    def __init__(self, message: str, used: int, budget: int):
        super().__init__(message)
        self.used = used
        self.budget = budget
