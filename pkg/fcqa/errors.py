"""Exceptions raised by fcqa.

Every exception carries the process exit code the command line front end
reports for it.
"""

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


class FcqaError(Exception):
    exit_code = EXIT_INTERNAL


class UsageError(FcqaError, ValueError):
    exit_code = EXIT_USAGE


class ParseError(UsageError):

    def __init__(self, message, line=None, column=None, context=''):
        self.line = line
        self.column = column
        self.context = context
        where = ''
        if line is not None:
            where = 'line %d, column %d: ' % (line, column or 0)
        super(ParseError, self).__init__(where + message)


class InternalError(FcqaError):
    exit_code = EXIT_INTERNAL


class EnvelopeExhausted(InternalError):
    pass


class ResourceError(FcqaError):
    exit_code = EXIT_INTERNAL


class StabilityError(InternalError):
    pass
