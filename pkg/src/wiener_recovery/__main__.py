import typer
from wiener_recovery.cli import app as experiments_app

app = typer.Typer(help="Wiener-algebra Sampling Recovery Tools")
app.add_typer(
    experiments_app,
    help="Run recovery, phase-transition and lower-bound experiments",
)

if __name__ == "__main__":
    app()
