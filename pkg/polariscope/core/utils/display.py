"""
Display utilities for rich terminal output
"""

from datetime import datetime
from typing import Dict, Iterable, List, Optional

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from ..persistence.models import RunRecordModel


class DisplayManager:
    """Manages rich terminal display components"""

    def __init__(self, quiet: bool = False):
        self.console = Console(quiet=quiet)
        self.error_console = Console(stderr=True)

    def show_welcome(self, version: str):
        """Display the banner"""
        welcome_text = f"""
[bold blue]polariscope {version}[/bold blue]
[dim]Dye-microcavity polariton spectra: simulate, synthesize, fit[/dim]
        """
        self.console.print(Panel(welcome_text, expand=False))

    def show_error(self, message: str, exit_code: int):
        """Error panel on stderr; shown even when quiet"""
        self.error_console.print(
            Panel(
                f"[red]{message}[/red]\n[dim]exit code {exit_code}[/dim]",
                title="[bold red]Error[/bold red]",
                expand=False,
            )
        )

    def show_summary(self, title: str, rows: Dict[str, str]):
        """Two-column key/value table"""
        table = Table(title=title, show_header=False, box=None)
        table.add_column("Field", style="bold cyan")
        table.add_column("Value", style="white")
        for key, value in rows.items():
            table.add_row(key, value)
        self.console.print(table)

    def show_table(self, title: str, columns: List[str], rows: Iterable[List[str]]):
        table = Table(title=title, show_header=True, header_style="bold magenta")
        for column in columns:
            table.add_column(column, justify="right")
        for row in rows:
            table.add_row(*row)
        self.console.print(table)

    def show_outputs(self, out_dir: str, names: List[str]):
        self.console.print(
            Panel(
                "\n".join(f"[cyan]{name}[/cyan]" for name in names),
                title=f"[bold green]Wrote {len(names)} files to {out_dir}[/bold green]",
                expand=False,
            )
        )

    def show_history(self, runs: List[RunRecordModel], total: Optional[int] = None):
        """Run registry, most recent first"""
        if not runs:
            self.console.print("[yellow]No runs recorded in this directory.[/yellow]")
            return

        status_map = {
            "completed": "✅ Done",
            "pending": "⏳ Pending",
            "failed": "❌ Failed",
        }
        table = Table(
            title=f"Run history ({total if total is not None else len(runs)} runs)",
            show_header=True,
            header_style="bold magenta",
        )
        table.add_column("Run", style="dim", width=16)
        table.add_column("Subcommand", style="cyan")
        table.add_column("Seed", justify="right")
        table.add_column("Status", justify="center")
        table.add_column("Exit", justify="right")
        table.add_column("Outputs", justify="right")
        table.add_column("Created", width=16)

        for run in runs:
            try:
                created = datetime.fromisoformat(run.created_at).strftime("%Y-%m-%d %H:%M")
            except (TypeError, ValueError):
                created = run.created_at[:16] if run.created_at else "N/A"
            table.add_row(
                run.run_id,
                run.subcommand,
                "-" if run.seed is None else str(run.seed),
                status_map.get(run.status, run.status),
                "-" if run.exit_code is None else str(run.exit_code),
                str(len(run.output_files)),
                created,
            )
        self.console.print(table)

    def print_json(self, text: str):
        self.console.print_json(text)

    def print(self, *args, **kwargs):
        """Wrapper for console.print"""
        self.console.print(*args, **kwargs)
