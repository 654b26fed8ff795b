import sys
from typing import List, Optional

try:  # newer typer vendors its own click; its exceptions are distinct classes
    from typer import _click as click
except ImportError:
    import click
import typer

from daugavet.commands.cantor_commands import cantor_app as cantor_commands
from daugavet.commands.index_commands import index_app as index_commands
from daugavet.commands.lie_commands import lie_app as lie_commands
from daugavet.commands.nr_commands import nr_app as nr_commands
from daugavet.commands.space_commands import space_app as space_commands
from daugavet.commands.sum_commands import sum_app as sum_commands
from daugavet.utils.console import report_error

app = typer.Typer(rich_help_panel="Daugavet CLI", pretty_exceptions_enable=False)

app.add_typer(space_commands, name="space", help="Normed spaces, duals and duality pairs")
app.add_typer(nr_commands, name="nr", help="Numerical range, exponential formula and Daugavet checks")
app.add_typer(lie_commands, name="lie", help="Isometry groups and their generators")
app.add_typer(index_commands, name="index", help="Numerical index estimates")
app.add_typer(sum_commands, name="sum", help="l1 / linf sums and extensions")
app.add_typer(cantor_commands, name="cantor", help="Discrete Cantor construction and dual models")


def run(argv: Optional[List[str]] = None) -> int:
    """Run the CLI on ``argv`` and return the exit code instead of exiting."""
    try:
        result = app(args=argv, prog_name="daugavet", standalone_mode=False)
    except click.exceptions.UsageError as exc:
        report_error(2, "usage", exc.format_message())
        return 2
    except click.exceptions.Abort:
        return 1
    except click.exceptions.Exit as exc:
        return exc.exit_code
    return result if isinstance(result, int) else 0


if __name__ == "__main__":
    sys.exit(run())
