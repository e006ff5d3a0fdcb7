"""The spec2d command line, driven from Python through cli.main."""

# %% Point levels as CSV
from spec2d import cli

cli.main(["point-levels", "--kappa-min", "-2", "--kappa-max", "2", "--steps", "3", "--j-max", "2"])

# %% Discrete spectrum with a point interaction, as JSON
cli.main(["spectrum", "--kappa", "0.5", "--m-max", "1", "--n-max", "1", "--format", "json"])

# %% Explicit constants, each with a second evaluation route
cli.main(["constants"])

# %% Invariant suite report
cli.main(["verify", "--suite", "specfun"])
