"""Exception hierarchy shared by every icc_lens module."""

from __future__ import annotations


class IccLensError(Exception):
    """Base class. ``exit_code`` is what the CLI returns for this failure."""

    exit_code = 2


class ParseError(IccLensError):
    exit_code = 1

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class ValidationError(IccLensError):
    pass


class UnknownTag(ValidationError):
    def __init__(self, tag: str):
        self.tag = tag
        super().__init__(f"unknown tag {tag!r}")


class EmptyInput(ValidationError):
    pass


class NoDefaultEntry(ValidationError):
    pass


class AmbiguousDefaultEntry(ValidationError):
    def __init__(self, candidates: list[str]):
        self.candidates = sorted(candidates)
        super().__init__(
            "multiple launcher components: " + ", ".join(self.candidates)
            + " (pick one with an explicit entry override)"
        )


class CyclicHierarchy(ValidationError):
    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("class hierarchy cycle: " + " -> ".join(cycle))


class UnknownComponent(ValidationError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"component {name!r} is not registered in the manifest")


class InvalidScript(ValidationError):
    pass


class WrongIntentKind(ValidationError):
    pass


class EmptyGraph(ValidationError):
    pass


class EmptyOracle(ValidationError):
    pass


class NotInOracle(ValidationError):
    pass
