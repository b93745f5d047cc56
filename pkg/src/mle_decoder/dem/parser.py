"""
Parser for the DEM text format.

Supported grammar, one instruction per line or brace-delimited, ``#`` comments
running to the end of the line::

    error(p) T1 T2 ...            targets D<k>, L<k> or the separator ^
    detector(c1, c2, ...) D<k>    coordinates optional
    logical_observable L<k>
    shift_detectors(c1, ...) <n>  coordinates optional
    repeat <n> { ... }
"""

import logging
import re
from typing import List, Tuple, Union

from pydantic import ValidationError

from mle_decoder.dem.lexer import Token, TokenType, tokenize
from mle_decoder.dem.program import DemInstruction, DemKind, DemProgram, DemTarget, TargetKind
from mle_decoder.exceptions import (
    DemSyntaxError,
    MalformedTarget,
    ProbabilityOutOfRange,
    UnsupportedInstruction,
)

logger = logging.getLogger(__name__)

MAX_NESTING = 64

_TARGET_RE = re.compile(r"^([DL])(\d+)$")
_INTEGER_RE = re.compile(r"^\+?\d+$")


class DemParser:
    """Recursive descent parser over the token stream of one DEM text."""

    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.current()
        if token.type != TokenType.EOF:
            self.pos += 1
        return token

    def expect(self, token_type: TokenType) -> Token:
        token = self.current()
        if token.type != token_type:
            raise DemSyntaxError(
                f"Expected {token_type.value!r}, got {_describe(token)}", token.line, token.column
            )
        return self.advance()

    def skip_newlines(self) -> None:
        while self.current().type == TokenType.NEWLINE:
            self.advance()

    def parse_program(self) -> DemProgram:
        return DemProgram(instructions=tuple(self.parse_block(depth=0)))

    def parse_block(self, depth: int) -> List[DemInstruction]:
        """Parse instructions until end of input (top level) or a closing brace (nested)."""
        instructions: List[DemInstruction] = []
        while True:
            self.skip_newlines()
            token = self.current()
            if token.type == TokenType.EOF:
                if depth > 0:
                    raise DemSyntaxError("Unclosed repeat block", token.line, token.column)
                return instructions
            if token.type == TokenType.RBRACE:
                if depth == 0:
                    raise DemSyntaxError("Unexpected '}'", token.line, token.column)
                self.advance()
                return instructions
            instructions.append(self.parse_instruction(depth))

    def parse_instruction(self, depth: int) -> DemInstruction:
        name_token = self.expect(TokenType.WORD)
        name = name_token.text.lower()
        try:
            kind = DemKind(name)
        except ValueError:
            raise UnsupportedInstruction(
                f"Unsupported instruction {name_token.text!r}", name_token.line, name_token.column
            ) from None

        if kind == DemKind.REPEAT:
            instruction = self.parse_repeat(name_token, depth)
        else:
            args = self.parse_arguments()
            targets = self.parse_targets()
            instruction = self.build(kind, name_token, args, targets)
        self.expect_end_of_instruction()
        return instruction

    def parse_repeat(self, name_token: Token, depth: int) -> DemInstruction:
        if depth + 1 > MAX_NESTING:
            raise DemSyntaxError(
                f"Repeat blocks nested deeper than {MAX_NESTING}",
                name_token.line,
                name_token.column,
            )
        count_token = self.expect(TokenType.NUMBER)
        count = _parse_count(count_token, "repeat count")
        self.skip_newlines()
        self.expect(TokenType.LBRACE)
        body = self.parse_block(depth + 1)
        return DemInstruction(kind=DemKind.REPEAT, repeat_count=count, body=tuple(body))

    def parse_arguments(self) -> List[Tuple[float, Token]]:
        if self.current().type != TokenType.LPAREN:
            return []
        self.advance()
        args: List[Tuple[float, Token]] = []
        if self.current().type == TokenType.RPAREN:
            self.advance()
            return args
        while True:
            token = self.expect(TokenType.NUMBER)
            args.append((float(token.text), token))
            if self.current().type == TokenType.COMMA:
                self.advance()
                continue
            self.expect(TokenType.RPAREN)
            return args

    def parse_targets(self) -> List[Token]:
        targets: List[Token] = []
        while self.current().type in (TokenType.WORD, TokenType.NUMBER, TokenType.CARET):
            targets.append(self.advance())
        return targets

    def expect_end_of_instruction(self) -> None:
        token = self.current()
        if token.type == TokenType.NEWLINE:
            self.advance()
        elif token.type not in (TokenType.EOF, TokenType.RBRACE):
            raise DemSyntaxError(
                f"Expected end of instruction, got {_describe(token)}", token.line, token.column
            )

    def build(
        self,
        kind: DemKind,
        name_token: Token,
        args: List[Tuple[float, Token]],
        targets: List[Token],
    ) -> DemInstruction:
        line, column = name_token.line, name_token.column
        values = tuple(value for value, _ in args)

        if kind == DemKind.ERROR:
            if len(args) != 1:
                raise DemSyntaxError(
                    f"error takes exactly one probability argument, got {len(args)}", line, column
                )
            p, p_token = args[0]
            if not 0.0 < p < 1.0:
                raise ProbabilityOutOfRange(
                    f"Probability {p_token.text} is not in (0, 1)", p_token.line, p_token.column
                )
            allowed = (TargetKind.DETECTOR, TargetKind.OBSERVABLE)
            parsed = [_parse_target(t, allowed, True) for t in targets]
            _check_separators(parsed, targets)
            return DemInstruction(kind=kind, probability=p, targets=tuple(parsed))

        if kind == DemKind.DETECTOR:
            parsed = [_parse_target(t, (TargetKind.DETECTOR,), False) for t in targets]
            if not parsed:
                raise DemSyntaxError("detector needs at least one D<k> target", line, column)
            return DemInstruction(kind=kind, coordinates=values, targets=tuple(parsed))

        if kind == DemKind.LOGICAL_OBSERVABLE:
            if args:
                raise DemSyntaxError("logical_observable takes no arguments", line, column)
            parsed = [_parse_target(t, (TargetKind.OBSERVABLE,), False) for t in targets]
            if not parsed:
                raise DemSyntaxError(
                    "logical_observable needs at least one L<k> target", line, column
                )
            return DemInstruction(kind=kind, targets=tuple(parsed))

        # shift_detectors
        if len(targets) != 1:
            raise DemSyntaxError(
                f"shift_detectors takes exactly one integer target, got {len(targets)}",
                line,
                column,
            )
        offset = _parse_count(targets[0], "detector shift")
        return DemInstruction(kind=kind, coordinates=values, offset=offset)


def _describe(token: Token) -> str:
    if token.type in (TokenType.NEWLINE, TokenType.EOF):
        return token.type.value
    return repr(token.text)


def _to_int(digits: str, token: Token, what: str) -> int:
    try:
        return int(digits)
    except ValueError:
        # int() refuses very long digit strings
        raise MalformedTarget(
            f"{what.capitalize()} has too many digits ({len(digits)})", token.line, token.column
        ) from None


def _parse_count(token: Token, what: str) -> int:
    if token.type != TokenType.NUMBER or not _INTEGER_RE.match(token.text):
        raise MalformedTarget(
            f"Expected a non-negative integer {what}, got {token.text!r}", token.line, token.column
        )
    return _to_int(token.text, token, what)


def _parse_target(
    token: Token, allowed: Tuple[TargetKind, ...], allow_separator: bool
) -> DemTarget:
    if token.type == TokenType.CARET:
        if not allow_separator:
            raise MalformedTarget("Separator '^' not allowed here", token.line, token.column)
        return DemTarget.separator()
    match = _TARGET_RE.match(token.text) if token.type == TokenType.WORD else None
    if match is None:
        raise MalformedTarget(f"Malformed target {token.text!r}", token.line, token.column)
    kind = TargetKind(match.group(1))
    if kind not in allowed:
        raise MalformedTarget(f"Target {token.text!r} not allowed here", token.line, token.column)
    return DemTarget(kind=kind, value=_to_int(match.group(2), token, "target index"))


def _check_separators(parsed: List[DemTarget], tokens: List[Token]) -> None:
    """Separators must split non-empty components."""
    previous_is_separator = True
    for target, token in zip(parsed, tokens):
        is_separator = target.kind == TargetKind.SEPARATOR
        if is_separator and previous_is_separator:
            raise MalformedTarget("Separator '^' must follow a target", token.line, token.column)
        previous_is_separator = is_separator
    if parsed and previous_is_separator:
        token = tokens[-1]
        raise MalformedTarget("Separator '^' must precede a target", token.line, token.column)


def parse_dem(text: Union[str, bytes]) -> DemProgram:
    """
    Parse DEM text into a program.

    Args:
        text: DEM source, as a string or UTF-8 bytes.

    Returns:
        DemProgram: The parsed instruction sequence.

    Raises:
        DemSyntaxError: On malformed text, with line and column.
        ProbabilityOutOfRange: If an error probability is outside (0, 1).
        MalformedTarget: If a target is not D<k>, L<k> or ^ where allowed.
        UnsupportedInstruction: For instructions outside the grammar.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as e:
            raise DemSyntaxError(f"Input is not valid UTF-8: {e.reason}") from None
    parser = DemParser(tokenize(text))
    try:
        program = parser.parse_program()
    except ValidationError as e:
        token = parser.current()
        raise DemSyntaxError(
            f"Invalid instruction: {e.errors()[0]['msg']}", token.line, token.column
        ) from None
    logger.debug(f"Parsed DEM with {len(program.instructions)} top-level instructions")
    return program
