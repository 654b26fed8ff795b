from rich.console import Console
from rich.theme import Theme

custom_theme = Theme({"info": "cyan", "warning": "bold magenta", "error": "bold red", "good": "bold green"})

# stdout carries report payloads only, so both consoles write to stderr
console = Console(color_system="truecolor", log_path=False, record=True, theme=custom_theme, stderr=True)
err_console = Console(theme=custom_theme, stderr=True, highlight=False, soft_wrap=True)


def diagnostic(code: int, kind: str, message: str) -> str:
    """Format a single-line, machine-parsable error diagnostic."""
    text = " ".join(str(message).split()).replace('"', "'")
    return f'error code={code} kind={kind} message="{text}"'


def report_error(code: int, kind: str, message: str) -> None:
    err_console.print(diagnostic(code, kind, message), style="error", markup=False)


def log_task(message: str, verbose: bool, style: str = "info") -> None:
    if verbose:
        console.log(message, style=style)


def end_task(task_name: str, verbose: bool) -> None:
    if verbose:
        console.rule(f"End of task: [b i]{task_name}", style="info")
