"""Batch command-line front end.

Subcommands ``simulate``, ``fit``, ``pca`` and ``link`` each consume a JSON
config (plus a few flag overrides), write CSV tables and a JSON report, and
pair every run with a manifest recording the seed, input hashes and config
hash. Reruns with the same config are byte-identical.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, io
from .constructions import (
    SamplerHandle,
    derive_seed,
    sample_T_from_U,
    sample_X_from_U,
    sample_Z,
    sample_Zstar_from_U,
)
from .errors import (
    ConfigError,
    DegenerateMarginError,
    InvalidInputError,
    NumericError,
    ParameterError,
    SampleSizeError,
    TailProfilesError,
)
from .husler_reiss import GaussianProfileLaw
from .inference import extract_exceedances, fit_hr, standardize_margins, threshold_stability
from .max_link import T_TO_U, U_TO_T, check_moment_identity, maxT_cdf_from_maxU, maxU_cdf_from_maxT
from .pca import profile_pca, reconstruction_error, truncate_to_rank

SIMULATE_KINDS = ("X", "Z", "Zstar", "U", "T", "S")


def _exit_code(err: Exception) -> int:
    if isinstance(err, ConfigError):
        return 2
    if isinstance(err, NumericError):
        return 4
    if isinstance(err, (SampleSizeError, DegenerateMarginError, InvalidInputError, ParameterError)):
        return 3
    return 1


def _sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


class _Run:
    """Tracks output files so a failed run leaves no partial artifacts."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.written: list[Path] = []
        out_dir.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        p = self.out_dir / name
        self.written.append(p)
        return p

    def cleanup(self) -> None:
        for p in self.written:
            p.unlink(missing_ok=True)

    def manifest(self, command: str, config: dict, inputs: dict[str, str], extra: dict | None = None) -> None:
        manifest = {
            "command": command,
            "version": __version__,
            "config": config,
            "config_sha256": hashlib.sha256(_canonical(config).encode()).hexdigest(),
            "inputs": inputs,
            "outputs": sorted(p.name for p in self.written),
        }
        if "seed" in config:
            manifest["seed"] = config["seed"]
        if extra:
            manifest.update(extra)
        io.dump_json(manifest, self.out_dir / "manifest.json")


def _require(config: dict, key: str, kind=None):
    if key not in config:
        raise ConfigError(f"config is missing required key {key!r}")
    value = config[key]
    if kind is not None:
        try:
            value = kind(value)
        except (TypeError, ValueError) as err:
            raise ConfigError(f"config key {key!r}: {err}") from err
    return value


def _check_input_file(path_str: str) -> Path:
    path = Path(path_str)
    if not path.exists():
        raise ConfigError(f"referenced file does not exist: {path}")
    return path


def _matrix_from_config(config: dict, inline_key: str, csv_key: str, inputs: dict) -> np.ndarray | None:
    if inline_key in config:
        return np.asarray(config[inline_key], dtype=float)
    if csv_key in config:
        path = _check_input_file(config[csv_key])
        inputs[str(path)] = _sha256_file(path)
        return io.read_matrix_csv(path)
    return None


def _build_law(config: dict, inputs: dict) -> tuple[SamplerHandle, dict]:
    """Construct the profile-law sampler named by config['law']."""
    spec = _require(config, "law")
    if not isinstance(spec, dict):
        raise ConfigError("config key 'law' must be an object")
    try:
        gamma = _matrix_from_config(spec, "gamma", "gamma_csv", inputs)
        if gamma is not None:
            law = GaussianProfileLaw.from_variogram(gamma)
            return SamplerHandle.gaussian_profile(law), {
                "law": "gaussian_profile",
                "gamma": gamma.tolist(),
            }
        sigma = _matrix_from_config(spec, "sigma", "sigma_csv", inputs)
        if sigma is not None:
            extended = bool(spec.get("extended", False))
            if "mu" in spec:
                mu = np.asarray(spec["mu"], dtype=float)
            else:
                from .husler_reiss import mu_from_sigma

                mu = mu_from_sigma(sigma)
            law = GaussianProfileLaw(mu=mu, sigma=sigma, extended=extended)
            return SamplerHandle.gaussian_profile(law), {
                "law": "gaussian_profile",
                "extended": extended,
            }
        if "law_json" in spec:
            path = _check_input_file(spec["law_json"])
            inputs[str(path)] = _sha256_file(path)
            law = io.read_law_json(path)
            return SamplerHandle.gaussian_profile(law), {"law": "gaussian_profile"}
        if "empirical_csv" in spec:
            path = _check_input_file(spec["empirical_csv"])
            inputs[str(path)] = _sha256_file(path)
            rows, _ = io.read_samples_csv(path)
            return SamplerHandle.empirical(rows), {"law": "empirical", "rows": rows.shape[0]}
        if "degenerate" in spec:
            values = np.asarray(spec["degenerate"], dtype=float)
            return SamplerHandle.degenerate(values), {"law": "degenerate"}
    except TailProfilesError as err:
        raise ConfigError(f"invalid law spec: {err}") from err
    raise ConfigError(
        "law spec needs one of: gamma/gamma_csv, sigma/sigma_csv, law_json, "
        "empirical_csv, degenerate"
    )


def run_simulate(config: dict, out_dir: Path) -> None:
    run = _Run(out_dir)
    inputs: dict[str, str] = {}
    try:
        kind = _require(config, "kind", str)
        if kind not in SIMULATE_KINDS:
            raise ConfigError(f"kind must be one of {SIMULATE_KINDS}, got {kind!r}")
        n = _require(config, "n", int)
        if n < 1:
            raise ConfigError(f"n must be positive, got {n}")
        seed = _require(config, "seed", int)
        oversample = int(config.get("oversample", 8))
        handle, law_summary = _build_law(config, inputs)
        extra: dict = {"law": law_summary, "kind": kind}
        if kind == "U":
            draws = handle.sample(n, seed)
        elif kind == "X":
            draws = sample_X_from_U(handle, n, seed)
        elif kind == "Zstar":
            draws = sample_Zstar_from_U(handle, n, seed)
        elif kind == "T":
            proposals = handle.sample(oversample * n, seed)
            result = sample_T_from_U(proposals, n, derive_seed(seed, 1))
            draws = result.samples
            extra["tilting"] = {
                "proposals": oversample * n,
                "ess": result.ess,
                "mean_weight": result.mean_weight,
                "max_weight_share": result.max_weight_share,
            }
        else:  # S or Z via the tilted spectral chain
            s_handle = SamplerHandle.tilted_spectral_from_profile(handle, oversample)
            draws = s_handle.sample(n, seed) if kind == "S" else sample_Z(s_handle, n, seed)
        io.write_samples_csv(
            run.path("samples.csv"),
            draws,
            kind=kind if config.get("kind_column") else None,
        )
        run.manifest("simulate", config, inputs, extra)
    except Exception:
        run.cleanup()
        raise


def run_fit(config: dict, out_dir: Path) -> None:
    run = _Run(out_dir)
    inputs: dict[str, str] = {}
    try:
        path = _check_input_file(_require(config, "input_csv", str))
        inputs[str(path)] = _sha256_file(path)
        standardize = bool(config.get("standardize", True))
        extended = bool(config.get("extended", False))
        data, _names = io.read_samples_csv(path)
        data_exp = standardize_margins(data) if standardize else data
        if "quantiles" in config:
            q_list = [float(q) for q in config["quantiles"]]
            rows = threshold_stability(data_exp, q_list, extended=extended)
            _write_stability(run, rows, data.shape[1])
            report = {
                "quantiles": q_list,
                "standardize": standardize,
                "rows": [
                    {
                        "q": row["q"],
                        "r": row["r"],
                        "k": row["k"],
                        "gamma_hat": None if row["gamma_hat"] is None else row["gamma_hat"].tolist(),
                        "error": row["error"],
                    }
                    for row in rows
                ],
            }
            io.dump_json(report, run.path("report.json"))
        else:
            q = float(config.get("quantile", 0.95))
            exc = extract_exceedances(data_exp, q)
            fit = fit_hr(exc, extended=extended)
            io.write_samples_csv(run.path("exceedances.csv"), exc.exceedances)
            io.write_samples_csv(run.path("profiles.csv"), exc.profiles)
            io.write_matrix_csv(run.path("gamma_hat.csv"), fit.gamma_hat)
            report = {
                "r": exc.threshold,
                "k": exc.k,
                "quantile": q,
                "standardize": standardize,
                "gamma_hat": fit.gamma_hat.tolist(),
                "sigma_hat": fit.sigma_hat.tolist(),
                "mu_hat": fit.mu_hat.tolist(),
                "eq8_discrepancy": fit.diagnostics.get("eq8_discrepancy"),
                "warnings": fit.diagnostics["warnings"],
            }
            io.dump_json(report, run.path("report.json"))
        run.manifest("fit", config, inputs)
    except Exception:
        run.cleanup()
        raise


def _write_stability(run: _Run, rows: list[dict], d: int) -> None:
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    header = ["q", "r", "k"] + [f"gamma_{i + 1}_{j + 1}" for i, j in pairs] + ["error"]
    lines = [",".join(header)]
    for row in rows:
        cells = [io.FLOAT_FMT % row["q"]]
        if row["error"] is None:
            cells.append(io.FLOAT_FMT % row["r"])
            cells.append(str(row["k"]))
            cells.extend(io.FLOAT_FMT % row["gamma_hat"][i, j] for i, j in pairs)
            cells.append("")
        else:
            cells.extend([""] * (2 + len(pairs)))
            cells.append(row["error"].replace(",", ";"))
        lines.append(",".join(cells))
    run.path("stability.csv").write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def run_pca(config: dict, out_dir: Path) -> None:
    run = _Run(out_dir)
    inputs: dict[str, str] = {}
    try:
        sigma = _matrix_from_config(config, "sigma", "sigma_csv", inputs)
        if sigma is not None:
            eig = profile_pca(sigma, source="model")
        elif "input_csv" in config:
            path = _check_input_file(config["input_csv"])
            inputs[str(path)] = _sha256_file(path)
            samples, _ = io.read_samples_csv(path)
            eig = profile_pca(samples, source="sample")
        else:
            raise ConfigError("pca config needs 'sigma', 'sigma_csv' or 'input_csv'")
        io.dump_json(eig.to_dict(), run.path("eigensystem.json"))
        report: dict = {
            "eigenvalues": eig.eigenvalues.tolist(),
            "trace": float(eig.eigenvalues.sum()),
            "source": eig.source,
        }
        if "rank" in config:
            p = int(config["rank"])
            trunc = truncate_to_rank(eig, p)
            io.write_matrix_csv(run.path("truncated_sigma.csv"), trunc.sigma)
            if trunc.projected_samples is not None:
                io.write_samples_csv(run.path("projected.csv"), trunc.projected_samples)
            report.update(
                rank=p,
                reconstruction_error=reconstruction_error(eig, p),
                mu_projected=None if trunc.mu_projected is None else trunc.mu_projected.tolist(),
                mu_recomputed=trunc.mu_recomputed.tolist(),
                discarded_mean_norm=trunc.discarded_mean_norm,
            )
        io.dump_json(report, run.path("report.json"))
        run.manifest("pca", config, inputs)
    except Exception:
        run.cleanup()
        raise


def run_link(config: dict, out_dir: Path) -> None:
    run = _Run(out_dir)
    inputs: dict[str, str] = {}
    try:
        direction = _require(config, "direction", str)
        if direction not in (T_TO_U, U_TO_T):
            raise ConfigError(f"direction must be {T_TO_U!r} or {U_TO_T!r}, got {direction!r}")
        path = _check_input_file(_require(config, "cdf_csv", str))
        inputs[str(path)] = _sha256_file(path)
        cdf_in = io.read_tabulated_cdf(path)
        out = maxU_cdf_from_maxT(cdf_in) if direction == T_TO_U else maxT_cdf_from_maxU(cdf_in)
        io.write_tabulated_cdf(run.path("cdf_out.csv"), out)
        run.written.append(out_dir / "cdf_out.csv.meta.json")
        report = {"direction": direction, **out.meta}
        if direction == T_TO_U:
            identity = check_moment_identity(cdf_in, out)
        else:
            identity = check_moment_identity(out, cdf_in)
        report["moment_identity"] = identity.to_dict()
        io.dump_json(report, run.path("report.json"))
        run.manifest("link", config, inputs)
    except Exception:
        run.cleanup()
        raise


COMMANDS = {
    "simulate": run_simulate,
    "fit": run_fit,
    "pca": run_pca,
    "link": run_link,
}


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tailprofiles",
        description="Simulate, fit, transform and compress multivariate extremal dependence.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name, help=f"run the {name} pipeline from a JSON config")
        cmd.add_argument("--config", required=True, help="path to the JSON run config")
        cmd.add_argument("--out-dir", default=None, help="output directory (overrides config)")
        cmd.add_argument("--seed", type=int, default=None, help="override the config seed")
        cmd.add_argument("--quantile", type=float, default=None, help="override the fit quantile")
        cmd.add_argument("--rank", type=int, default=None, help="override the pca rank")
        cmd.add_argument("--grid-step", type=float, default=None, help="override the link grid step")
    return parser


def _load_config(args) -> tuple[dict, Path]:
    path = Path(args.config)
    if not path.exists():
        raise ConfigError(f"config file does not exist: {path}")
    try:
        config = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise ConfigError(f"config is not valid JSON: {err}") from err
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    for key, value in (
        ("seed", args.seed),
        ("quantile", args.quantile),
        ("rank", args.rank),
        ("grid_step", args.grid_step),
    ):
        if value is not None:
            config[key] = value
    out_dir = Path(args.out_dir or config.get("out_dir", "."))
    return config, out_dir


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        config, out_dir = _load_config(args)
        COMMANDS[args.command](config, out_dir)
    except TailProfilesError as err:
        print(f"error: {err}", file=sys.stderr)
        return _exit_code(err)
    return 0


if __name__ == "__main__":
    sys.exit(main())
