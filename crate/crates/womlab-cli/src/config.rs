//! Market-parameter resolution: defaults, figure presets, an optional
//! key=value config file, and explicit flags, in increasing precedence.

use std::path::PathBuf;

use clap::Args;

use crate::CliError;

/// Shared market flags. Anything left unset falls back to the config file,
/// then the preset, then the defaults.
#[derive(Args, Clone)]
pub struct MarketOpts {
    /// Value of the good to every consumer.
    #[arg(long)]
    pub v: Option<f64>,
    /// First-period search cost.
    #[arg(long)]
    pub s: Option<f64>,
    /// Diffusion speed (discount on second-period payoffs).
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Degree-distribution exponent: t(k) proportional to k^gamma.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Largest degree in the network.
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Named parameter set (fig1..fig8).
    #[arg(long)]
    pub preset: Option<String>,
    /// Key=value file mirroring the flags; explicit flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Fully resolved market parameters.
#[derive(Debug, Clone, Copy)]
pub struct Market {
    pub v: f64,
    pub s: f64,
    pub delta: f64,
    pub gamma: f64,
    pub kmax: usize,
}

const DEFAULT: Market = Market {
    v: 1.0,
    s: 0.05,
    delta: 0.9,
    gamma: -1.0,
    kmax: 100,
};

/// Fixed parameters behind each figure preset. Sweep presets (fig2..fig7)
/// leave the swept variable at its default here; the sweep grid overrides it
/// point by point.
pub fn preset_market(name: &str) -> Option<Market> {
    let m = match name {
        "fig1" => Market { ..DEFAULT },
        "fig2" | "fig3" => Market { ..DEFAULT },
        "fig4" | "fig5" | "fig6" => Market {
            gamma: 0.0,
            ..DEFAULT
        },
        "fig7" => Market {
            delta: 0.5,
            gamma: 0.0,
            ..DEFAULT
        },
        "fig8" => Market {
            s: 0.025,
            delta: 0.92,
            gamma: -2.5,
            kmax: 5,
            ..DEFAULT
        },
        _ => return None,
    };
    Some(m)
}

#[derive(Default)]
struct FileConfig {
    v: Option<f64>,
    s: Option<f64>,
    delta: Option<f64>,
    gamma: Option<f64>,
    kmax: Option<usize>,
    seed: Option<u64>,
    samples: Option<u64>,
}

fn parse_config(path: &PathBuf) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = FileConfig::default();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("{}:{}: expected key=value", path.display(), ln + 1))
        })?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |what: &str| {
            CliError::Usage(format!(
                "{}:{}: {what} (got {value:?})",
                path.display(),
                ln + 1
            ))
        };
        match key {
            "v" => cfg.v = Some(value.parse().map_err(|_| bad("v must be a number"))?),
            "s" => cfg.s = Some(value.parse().map_err(|_| bad("s must be a number"))?),
            "delta" => cfg.delta = Some(value.parse().map_err(|_| bad("delta must be a number"))?),
            "gamma" => cfg.gamma = Some(value.parse().map_err(|_| bad("gamma must be a number"))?),
            "kmax" => cfg.kmax = Some(value.parse().map_err(|_| bad("kmax must be an integer"))?),
            "seed" => cfg.seed = Some(value.parse().map_err(|_| bad("seed must be an integer"))?),
            "samples" => {
                cfg.samples = Some(
                    value
                        .parse()
                        .map_err(|_| bad("samples must be an integer"))?,
                )
            }
            _ => {
                return Err(CliError::Usage(format!(
                    "{}:{}: unknown key {key:?}",
                    path.display(),
                    ln + 1
                )))
            }
        }
    }
    Ok(cfg)
}

/// A resolved market plus the simulation knobs a config file may carry
/// (only `verify` reads those; other subcommands ignore them).
pub struct Resolved {
    pub market: Market,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
}

/// Resolves parameters for a subcommand, restricted to the presets that make
/// sense there (e.g. sweep-only presets are rejected by `solve`).
pub fn resolve(opts: &MarketOpts, allowed_presets: &[&str]) -> Result<Resolved, CliError> {
    let mut market = DEFAULT;
    if let Some(name) = &opts.preset {
        if !allowed_presets.contains(&name.as_str()) {
            return Err(CliError::Usage(format!(
                "preset {name:?} is not usable here (expected one of {allowed_presets:?})"
            )));
        }
        market = preset_market(name).ok_or_else(|| {
            CliError::Usage(format!("unknown preset {name:?} (expected fig1..fig8)"))
        })?;
    }
    let mut seed = None;
    let mut samples = None;
    if let Some(path) = &opts.config {
        let cfg = parse_config(path)?;
        market.v = cfg.v.unwrap_or(market.v);
        market.s = cfg.s.unwrap_or(market.s);
        market.delta = cfg.delta.unwrap_or(market.delta);
        market.gamma = cfg.gamma.unwrap_or(market.gamma);
        market.kmax = cfg.kmax.unwrap_or(market.kmax);
        seed = cfg.seed;
        samples = cfg.samples;
    }
    market.v = opts.v.unwrap_or(market.v);
    market.s = opts.s.unwrap_or(market.s);
    market.delta = opts.delta.unwrap_or(market.delta);
    market.gamma = opts.gamma.unwrap_or(market.gamma);
    market.kmax = opts.kmax.unwrap_or(market.kmax);
    Ok(Resolved {
        market,
        seed,
        samples,
    })
}

/// [`resolve`] for subcommands that only need the market itself.
pub fn resolve_market(opts: &MarketOpts, allowed_presets: &[&str]) -> Result<Market, CliError> {
    resolve(opts, allowed_presets).map(|r| r.market)
}
