"""Command-line front end.

Usage:
    python src/cli.py decide fig1.aut [--cap N] [--cert-out cert.txt] [--record]
    python src/cli.py synth fig1.aut --bound 8 [--cert cert.txt] [--out moves.txt]
    python src/cli.py simulate fig1.aut --moves moves.txt --bound 8 [--grid]
    python src/cli.py oracle fig1.aut --bound 4 [--record]
    python src/cli.py gen fig3 --n1 2 --n2 3 [--out fig3.aut]

A file argument of '-' reads standard input. Exit codes: 0 YES/WON,
1 NO/UNWINNABLE/LOSS, 2 INCONCLUSIVE, 3 usage or input errors.
"""
import argparse
import logging
import sys
from dataclasses import replace
from typing import List, Optional, Sequence, Tuple

from config import LOG_LEVEL, Caps
from decision import (
    InvalidCertificateError, VerdictKind, decide, explain, format_certificate,
    parse_certificate, verify_certificate
)
from game import (
    Label, LabelledAutomaton, PlayStatus, WinsWord, expand_runs, parse, play_sequence, serialize
)
from instances import FIGURES, gen_fig3, gen_from_dtm, gen_from_unary_nfa, parse_dtm, parse_nfa
from oracle import bounded_solve
from synthesis import format_moves, parse_moves, synthesize

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_NEGATIVE, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ========== Grid rendering ==========

def render_grid(trace: Sequence[WinsWord], grid: Sequence[Sequence[Tuple[str, Label]]]) -> str:
    """One row per move, one column per population size; each cell is the state entered and the label seen."""
    width = max((len(row) for row in grid), default=len(trace[0].bits) if trace else 0)
    cells = [[f"{state}{label.mark}" for state, label in row] for row in grid]
    cell_w = max([len(c) for row in cells for c in row] + [len(str(width))])

    lines = ['move ' + ' '.join(str(j).rjust(cell_w) for j in range(1, width + 1))]
    for i, row in enumerate(cells):
        line = f"{i + 1:>4} " + ' '.join(c.rjust(cell_w) for c in row)
        if i + 1 < len(trace):
            line += f"   {trace[i + 1]}"
        lines.append(line)
    return '\n'.join(lines)


# ========== Input ==========

def _read(path: str) -> str:
    if path == '-':
        return sys.stdin.read()
    try:
        with open(path, encoding='utf-8') as f:
            return f.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e}")


def _write(path: Optional[str], text: str):
    if path is None or path == '-':
        sys.stdout.write(text)
    else:
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text)
        logger.info(f"Wrote {path}")


def _load(path: str) -> LabelledAutomaton:
    return parse(_read(path))


def _caps(args) -> Caps:
    caps = Caps.from_env()
    if getattr(args, 'cap', None) is not None:
        caps = replace(caps, max_frontiers=args.cap)
    if getattr(args, 'time_limit', None) is not None:
        caps = replace(caps, time_limit=args.time_limit)
    return caps


def _record(fn, *args, **kwargs):
    from db import engine, get_db, init_db

    init_db(engine)
    sessions = get_db()
    session = next(sessions)
    try:
        run = fn(session, *args, **kwargs)
        print(f"📦 Archived run {run.run_id}", file=sys.stderr)
    finally:
        sessions.close()


# ========== Commands ==========

def cmd_decide(args) -> int:
    aut = _load(args.file)
    verdict = decide(aut, _caps(args))
    print(explain(verdict, aut))
    cert_text = None
    if verdict.certificate is not None:
        cert_text = format_certificate(aut, verdict.certificate)
        if args.cert_out:
            _write(args.cert_out, cert_text)
        else:
            print()
            print(cert_text, end='')
    if args.record:
        from db import archive_verdict
        verified = verdict.certificate is not None and verify_certificate(aut, verdict.certificate).ok
        _record(archive_verdict, aut, verdict, cert_text, verified)
    return verdict.exit_code


def cmd_synth(args) -> int:
    aut = _load(args.file)
    if args.cert:
        cert = parse_certificate(aut, _read(args.cert))
        check = verify_certificate(aut, cert)
        if not check:
            raise InvalidCertificateError(check.failures)
    else:
        verdict = decide(aut, _caps(args))
        if verdict.kind is not VerdictKind.YES:
            print(explain(verdict, aut), file=sys.stderr)
            return verdict.exit_code
        cert = verdict.certificate
    moves = synthesize(aut, cert, args.bound)
    _write(args.out, format_moves(moves))
    return EXIT_OK


def cmd_simulate(args) -> int:
    aut = _load(args.file)
    moves = parse_moves(_read(args.moves))
    result = play_sequence(aut, moves, args.bound)
    if args.grid:
        played = len(result.trace) - 1 + (result.loss is not None)
        print(render_grid(result.trace, expand_runs(aut, moves[:played], args.bound)))
    print(result)
    return EXIT_OK if result.status is PlayStatus.WON else EXIT_NEGATIVE


def cmd_oracle(args) -> int:
    aut = _load(args.file)
    result = bounded_solve(aut, args.bound, _caps(args))
    print(f"B={args.bound}: {result.outcome.value} ({result.words_explored} wins words)")
    for move in result.moves:
        print(f"  {' '.join(move)}")
    if args.record:
        from db import archive_oracle
        _record(archive_oracle, aut, result)
    return result.exit_code


def cmd_gen(args) -> int:
    if args.kind in FIGURES:
        aut = FIGURES[args.kind]()
    elif args.kind == 'fig3':
        aut = gen_fig3(args.n1, args.n2)
    elif args.kind == 'nfa':
        if not args.input:
            raise UsageError("gen nfa needs an .nfa input file")
        aut = gen_from_unary_nfa(parse_nfa(_read(args.input)))
    else:
        if not args.input:
            raise UsageError("gen dtm needs a .dtm input file")
        aut = gen_from_dtm(parse_dtm(_read(args.input)), args.n, all_windows=args.all_windows)
    _write(args.out, serialize(aut))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='reachtogether', description="Exact solver for population games with reachability objectives")
    parser.add_argument('-v', '--verbose', action='store_true', help="debug logging")
    sub = parser.add_subparsers(dest='command', required=True, parser_class=_Parser)

    p = sub.add_parser('decide', help="decide the game and print a certificate")
    p.add_argument('file')
    p.add_argument('--cap', type=int, help="maximum closure entries")
    p.add_argument('--time-limit', type=float, help="seconds")
    p.add_argument('--cert-out', help="write the certificate here instead of stdout")
    p.add_argument('--record', action='store_true', help="archive the run in the database")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser('synth', help="synthesize lasso moves winning up to a bound")
    p.add_argument('file')
    p.add_argument('--bound', type=int, required=True)
    p.add_argument('--cert', help="use this certificate instead of deciding")
    p.add_argument('--cap', type=int)
    p.add_argument('--time-limit', type=float)
    p.add_argument('--out')
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser('simulate', help="play a moves file")
    p.add_argument('file')
    p.add_argument('--moves', required=True)
    p.add_argument('--bound', type=int, required=True)
    p.add_argument('--grid', action='store_true')
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser('oracle', help="solve the game for one bound by exhaustive search")
    p.add_argument('file')
    p.add_argument('--bound', type=int, required=True)
    p.add_argument('--record', action='store_true')
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser('gen', help="write a fixture or reduction automaton")
    p.add_argument('kind', choices=['fig1', 'fig3', 'fig5', 'fig7', 'nfa', 'dtm'])
    p.add_argument('input', nargs='?', help=".nfa or .dtm file")
    p.add_argument('--n1', type=int, default=2)
    p.add_argument('--n2', type=int, default=3)
    p.add_argument('--n', type=int, default=1, help="space bound of the DTM")
    p.add_argument('--all-windows', action='store_true', help="DTM: read branches for every window, not only well-formed ones")
    p.add_argument('--out')
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else LOG_LEVEL,
        format='%(asctime)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (UsageError, ValueError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
