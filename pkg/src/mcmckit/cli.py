"""Command-line interface: chain analysis, mixing, MH runs, fits, counting.

Every subcommand writes a deterministic CSV report to --out (default:
stdout) and, with --plot FILE, renders a matplotlib figure next to it.
All randomness flows from --seed; omitting the flag selects the fixed
default seed 0, never entropy. Exit codes: 0 success, 1 usage error,
2 domain precondition failure, 3 numeric failure.
"""

from __future__ import annotations

import io
import math
import sys

import click
import numpy as np

from . import bayes as bayes_mod
from . import chain as chain_mod
from . import counting as counting_mod
from . import metropolis as mh_mod
from . import mixing as mixing_mod
from .errors import (
    ComputationError,
    NodeCapExceededError,
    NoReturnPathError,
    PreconditionError,
)

DEFAULT_SEED = 0
_NORMAL_SIGMA = 1.0  # known observation sigma for the `normal` model

_out_option = click.option(
    "--out", "out_path", type=click.Path(dir_okay=False), default=None,
    help="Write the CSV report here instead of stdout.")
_plot_option = click.option(
    "--plot", "plot_path", type=click.Path(dir_okay=False), default=None,
    help="Also render a PNG figure of the report to this file.")
_seed_option = click.option(
    "--seed", type=int, default=DEFAULT_SEED, show_default=True,
    help="Seed for all randomness in this command.")


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        click.echo(text, nl=False)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _fmt(value: float) -> str:
    return f"{value:.12g}"


@click.group()
def cli() -> None:
    """Markov chain diagnostics, MH sampling, Bayesian fits, counting."""


# -- chain ---------------------------------------------------------------------

@cli.group("chain")
def chain_group() -> None:
    """Finite-chain structure and convergence reports."""


@chain_group.command("analyze")
@click.option("--matrix", "matrix_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Chain spec JSON: {\"states\": [...], \"matrix\": [[...]]}.")
@_out_option
@_plot_option
def chain_analyze(matrix_path: str, out_path: str | None,
                  plot_path: str | None) -> None:
    """Irreducibility, periods, stationary distribution, detailed balance."""
    chain = chain_mod.load_chain(matrix_path)

    lines = ["quantity,value"]
    irreducible = chain_mod.is_irreducible(chain)
    lines.append(f"irreducible,{str(irreducible).lower()}")

    periods: dict[str, int | None] = {}
    for state in chain.states:
        try:
            periods[state] = chain_mod.period(chain, state)
        except NoReturnPathError:
            periods[state] = None
    for state, value in periods.items():
        lines.append(f"period_{state},{value if value is not None else 'undefined'}")
    if any(value is None for value in periods.values()):
        lines.append("aperiodic,undefined")
    else:
        aperiodic = all(value == 1 for value in periods.values())
        lines.append(f"aperiodic,{str(aperiodic).lower()}")

    stationary = None
    if irreducible:
        stationary = chain_mod.stationary_distribution(chain)
        for state, mass in zip(stationary.states, stationary.probs):
            lines.append(f"stationary_{state},{_fmt(mass)}")
        residual = chain_mod.detailed_balance_residual(chain, stationary)
        lines.append(f"detailed_balance_residual,{_fmt(residual)}")
        reversible = chain_mod.is_reversible(chain, stationary)
        lines.append(f"reversible,{str(reversible).lower()}")

    _emit("\n".join(lines) + "\n", out_path)
    if plot_path is not None:
        from . import plots
        plots.save_chain_figure(chain, stationary, plot_path)


@chain_group.command("mix")
@click.option("--matrix", "matrix_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--eps", type=float, required=True,
              help="Mixing threshold in (0, 1).")
@click.option("--tmax", type=int, default=None,
              help="Horizon for the d(t) curve; default: stop at t_mix.")
@_out_option
@_plot_option
def chain_mix(matrix_path: str, eps: float, tmax: int | None,
              out_path: str | None, plot_path: str | None) -> None:
    """The d(t) curve, mixing time, and fitted geometric envelope."""
    if not 0.0 < eps < 1.0:
        raise click.BadParameter("--eps must lie in (0, 1)")
    if tmax is not None and tmax < 2:
        raise click.BadParameter("--tmax must be at least 2")

    chain = chain_mod.load_chain(matrix_path)
    report = mixing_mod.mixing_report(chain, eps, tmax)

    lines = ["t,d_t"]
    lines.extend(f"{t},{_fmt(d)}" for t, d in report.d_curve)
    lines.append(f"t_mix,{report.t_mix}")
    lines.append(f"C,{_fmt(report.envelope.C)}")
    lines.append(f"alpha,{_fmt(report.envelope.alpha)}")
    _emit("\n".join(lines) + "\n", out_path)

    if plot_path is not None:
        from . import plots
        plots.save_mixing_figure(report, plot_path)


# -- mh ------------------------------------------------------------------------

@cli.group("mh")
def mh_group() -> None:
    """Metropolis-Hastings sampling."""


def _build_model(name: str, data_path: str):
    """Returns (model, data, init, default_grid_center) for a model name."""
    if name == "beta-binomial":
        data = bayes_mod.load_binomial(data_path)
        model = bayes_mod.beta_binomial_model()
        init = lambda rng: rng.uniform(size=1)  # noqa: E731 - prior draw
        return model, data, init
    if name == "normal":
        data = bayes_mod.load_observations(data_path)
        model = bayes_mod.normal_model(sigma=_NORMAL_SIGMA)
        init = np.array([float(np.mean(data))])
        return model, data, init
    raise click.BadParameter(f"unknown model {name!r}")


@mh_group.command("run")
@click.option("--model", "model_name", required=True,
              type=click.Choice(["beta-binomial", "normal"]))
@click.option("--data", "data_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--m", "m", type=int, required=True,
              help="Total iterations, burn-in included.")
@click.option("--burn-in", "burn_in", type=int, default=None,
              help="Discarded prefix length; default m // 10.")
@click.option("--thin", type=int, default=1, show_default=True)
@click.option("--scale", type=float, default=0.25, show_default=True,
              help="Random-walk proposal standard deviation.")
@_seed_option
@_out_option
@_plot_option
def mh_run(model_name: str, data_path: str, m: int, burn_in: int | None,
           thin: int, scale: float, seed: int, out_path: str | None,
           plot_path: str | None) -> None:
    """Random-walk MH on the posterior of a named model; trace CSV out."""
    if m < 1:
        raise click.BadParameter("--m must be positive")
    effective_burn_in = m // 10 if burn_in is None else burn_in
    if effective_burn_in < 0 or effective_burn_in >= m:
        raise click.BadParameter("--burn-in must satisfy 0 <= burn-in < m")
    if thin < 1:
        raise click.BadParameter("--thin must be at least 1")
    if scale <= 0.0:
        raise click.BadParameter("--scale must be positive")

    model, data, init = _build_model(model_name, data_path)
    target = bayes_mod.target_from_model(model, data)
    jump = mh_mod.random_walk_kernel(scale, dimension=1)
    trace = mh_mod.run_chain(target, jump, init, m=m,
                             burn_in=effective_burn_in, thin=thin, seed=seed)

    buffer = io.StringIO()
    mh_mod.trace_to_csv(trace, buffer)
    _emit(buffer.getvalue(), out_path)

    if plot_path is not None:
        from . import plots
        plots.save_trace_figure(trace, plot_path)


# -- bayes ---------------------------------------------------------------------

@cli.group("bayes")
def bayes_group() -> None:
    """Grid-based point estimation."""


@bayes_group.command("fit")
@click.option("--model", "model_name", required=True,
              type=click.Choice(["beta-binomial", "normal"]))
@click.option("--data", "data_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--grid-step", type=float, default=0.001, show_default=True)
@_seed_option
@_out_option
@_plot_option
def bayes_fit(model_name: str, data_path: str, grid_step: float, seed: int,
              out_path: str | None, plot_path: str | None) -> None:
    """MLE, MAP, posterior mean and sd on a declared grid.

    The grid fit is fully deterministic; --seed is accepted for interface
    uniformity with the sampling commands and is unused here.
    """
    if not 0.0 < grid_step < 1.0:
        raise click.BadParameter("--grid-step must lie in (0, 1)")

    model, data, _ = _build_model(model_name, data_path)
    if model_name == "beta-binomial":
        grid = bayes_mod.unit_interval_grid(grid_step)
    else:
        center = float(np.mean(data))
        half = max(5.0 * _NORMAL_SIGMA / math.sqrt(len(data)), 5.0 * grid_step)
        grid = bayes_mod.centered_grid(center, half, grid_step)

    mle = bayes_mod.mle_estimate(model, data, grid)
    map_ = bayes_mod.map_estimate(model, data, grid)
    grid_posterior = bayes_mod.posterior_grid(model, data, grid)

    estimates = {
        "mle": float(mle),
        "map": float(map_),
        "posterior_mean": grid_posterior.mean(),
        "posterior_sd": grid_posterior.sd(),
    }
    lines = ["estimator,value"]
    lines.extend(f"{name},{_fmt(value)}" for name, value in estimates.items())
    _emit("\n".join(lines) + "\n", out_path)

    if plot_path is not None:
        from . import plots
        plots.save_posterior_figure(grid_posterior.points, grid_posterior.weights,
                                    estimates, plot_path)


# -- count ---------------------------------------------------------------------

@cli.group("count")
def count_group() -> None:
    """Approximate counting of independent sets."""


@count_group.command("estimate")
@click.option("--graph", "graph_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Edge list, one `u v` pair per line.")
@click.option("--eps", type=float, required=True,
              help="Ratio slack in (0, 1).")
@click.option("--delta", type=float, required=True,
              help="Failure probability in (0, 1).")
@_seed_option
@_out_option
@_plot_option
def count_estimate(graph_path: str, eps: float, delta: float, seed: int,
                   out_path: str | None, plot_path: str | None) -> None:
    """Approximate the number of independent sets of a graph."""
    if not 0.0 < eps < 1.0:
        raise click.BadParameter("--eps must lie in (0, 1)")
    if not 0.0 < delta < 1.0:
        raise click.BadParameter("--delta must lie in (0, 1)")

    graph = counting_mod.read_edge_list(graph_path)
    problem = counting_mod.IndependentSetInstance.from_graph(graph)
    estimate = counting_mod.approximate_count(problem, eps, delta, seed)

    try:
        exact: int | None = counting_mod.brute_force_count(problem)
    except NodeCapExceededError:
        exact = None

    lines = [
        "estimate,epsilon,delta,seed,exact_if_available",
        f"{_fmt(estimate.estimate)},{_fmt(eps)},{_fmt(delta)},{seed},"
        f"{exact if exact is not None else ''}",
    ]
    _emit("\n".join(lines) + "\n", out_path)

    if plot_path is not None:
        from . import plots
        plots.save_count_figure(estimate, exact, plot_path)


def main(argv=None) -> int:
    """Entry point mapping error classes to stable exit codes."""
    try:
        cli.main(args=argv, prog_name="mcmckit", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except PreconditionError as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        return 2
    except ComputationError as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
