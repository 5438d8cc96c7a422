class FrameworkError(Exception):
    """Base of every domain error raised by qfabric."""


# Foundation

class KeyMissing(FrameworkError, KeyError):
    def __init__(self, key):
        super().__init__(f"key '{key}' not present")
        self.key = key

    def __str__(self):
        return self.args[0]


class VariantMismatch(FrameworkError, TypeError):
    def __init__(self, key, stored, requested):
        super().__init__(f"key '{key}' holds {stored}, requested {requested}")
        self.key = key
        self.stored = stored
        self.requested = requested


class DuplicateService(FrameworkError):
    def __init__(self, kind, name):
        super().__init__(f"service {kind}:{name} already registered")
        self.kind = kind
        self.name = name


class ServiceNotFound(FrameworkError, LookupError):
    def __init__(self, kind, name):
        super().__init__(f"no service registered as {kind}:{name}")
        self.kind = kind
        self.name = name


class DoubleInitialize(FrameworkError):
    def __init__(self):
        super().__init__("framework already initialized")


# IR

class UnknownInstruction(FrameworkError):
    def __init__(self, name, line=None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"unknown instruction '{name}'{where}")
        self.name = name
        self.line = line


class ArityMismatch(FrameworkError, ValueError):
    pass


class UnboundSymbol(FrameworkError):
    def __init__(self, symbol, variables=()):
        super().__init__(f"symbol '{symbol}' not among variables {list(variables)}")
        self.symbol = symbol


class UnexpandedComposite(FrameworkError):
    def __init__(self, name):
        super().__init__(f"dynamic composite '{name}' has not been expanded")
        self.name = name


class ParseError(FrameworkError, ValueError):
    def __init__(self, message, line=None, column=None):
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"{message}{where}")
        self.message = message
        self.line = line
        self.column = column


# Frontend

class SourceSyntaxError(ParseError):
    pass


class UndeclaredVariable(SourceSyntaxError):
    def __init__(self, name, line=None, column=None):
        super().__init__(f"undeclared variable '{name}'", line, column)
        self.name = name


class UntranslatableInstruction(FrameworkError):
    def __init__(self, name, dialect):
        super().__init__(f"instruction '{name}' cannot be expressed in {dialect}")
        self.name = name
        self.dialect = dialect


class MissingDirective(FrameworkError):
    def __init__(self, directive):
        super().__init__(f"missing {directive} directive")
        self.directive = directive


class NameNotCompiled(FrameworkError, LookupError):
    def __init__(self, name):
        super().__init__(f"no compiled circuit named '{name}'")
        self.name = name


# Stdlib / observable

class ComplexCoefficient(FrameworkError, ValueError):
    pass


class EmptyOperator(FrameworkError, ValueError):
    pass


class DisconnectedQubit(FrameworkError):
    pass


class AlreadyMeasured(FrameworkError):
    pass


class EmptyCounts(FrameworkError, ValueError):
    pass


# Backend

class InvalidSize(FrameworkError, ValueError):
    pass


class SymbolicProgram(FrameworkError):
    pass


class QubitOutOfRange(FrameworkError, IndexError):
    pass


class EmptyBuffer(FrameworkError):
    pass


class DegenerateChannel(FrameworkError, ValueError):
    pass


class MixedModelProgram(FrameworkError):
    pass


class HttpError(FrameworkError):
    def __init__(self, status, message=""):
        label = f"HTTP {status}" if status is not None else "connection failure"
        super().__init__(f"{label}: {message}" if message else label)
        self.status = status


class JobNotFound(FrameworkError, LookupError):
    def __init__(self, job_id):
        super().__init__(f"job '{job_id}' not found")
        self.job_id = job_id


class RemoteTimeout(FrameworkError):
    pass


# Algorithm

class BadOption(FrameworkError, ValueError):
    pass


class InitializationError(FrameworkError):
    def __init__(self, key, reason="missing required option"):
        super().__init__(f"{reason}: '{key}'")
        self.key = key


class LengthMismatch(FrameworkError, ValueError):
    pass


class DistributionLengthMismatch(LengthMismatch):
    pass
