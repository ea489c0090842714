//! Parameter sweeps: evaluate the stable equilibrium across a grid and write
//! one CSV row per point. Grid points where only no-trade survives are kept
//! and flagged rather than dropped, so downstream plots show the gap.

use rayon::prelude::*;

use womlab::eq_baseline::stable_equilibrium;
use womlab::textio::fmt_real;
use womlab::{DegreeDistribution, Equilibrium, Error, MarketParams};

use crate::config::{self, Market};
use crate::{write_file, CliError, SweepArgs};

const SWEEP_PRESETS: [&str; 6] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7"];

#[derive(Clone, Copy, PartialEq, Eq)]
enum Variable {
    Gamma,
    Delta,
    S,
    Kmax,
}

impl Variable {
    fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "gamma" => Ok(Variable::Gamma),
            "delta" => Ok(Variable::Delta),
            "s" => Ok(Variable::S),
            "kmax" => Ok(Variable::Kmax),
            _ => Err(CliError::Usage(format!(
                "unknown sweep variable {name:?} (expected gamma, delta, s, or kmax)"
            ))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Variable::Gamma => "gamma",
            Variable::Delta => "delta",
            Variable::S => "s",
            Variable::Kmax => "kmax",
        }
    }
}

#[derive(Clone, Copy)]
enum Output {
    Q,
    EPrice,
    Profit,
    Eta,
    Dispersion,
}

impl Output {
    const ALL: [Output; 5] = [
        Output::Q,
        Output::EPrice,
        Output::Profit,
        Output::Eta,
        Output::Dispersion,
    ];

    fn name(self) -> &'static str {
        match self {
            Output::Q => "q",
            Output::EPrice => "e_price",
            Output::Profit => "profit",
            Output::Eta => "eta",
            Output::Dispersion => "dispersion",
        }
    }

    fn read(self, eq: &Equilibrium) -> f64 {
        match self {
            Output::Q => eq.q,
            Output::EPrice => eq.law.e_p(),
            Output::Profit => eq.profit,
            Output::Eta => eq.law.eta(),
            Output::Dispersion => eq.law.dispersion(),
        }
    }
}

struct SweepSpec {
    variable: Variable,
    lo: f64,
    hi: f64,
    steps: usize,
    outputs: Vec<Output>,
    base: Market,
}

/// Grid and output column behind each figure preset; the base market comes
/// from [`config::preset_market`].
fn preset_grid(name: &str) -> Option<(Variable, f64, f64, usize, Vec<Output>)> {
    let grid = match name {
        "fig2" => (Variable::Gamma, -2.0, 2.0, 41, vec![Output::Q]),
        "fig3" => (Variable::Gamma, -2.0, 2.0, 41, vec![Output::EPrice]),
        "fig4" => (Variable::Delta, 0.1, 0.94, 43, vec![Output::Q]),
        "fig5" => (Variable::Delta, 0.1, 0.94, 43, vec![Output::EPrice]),
        "fig6" => (Variable::Delta, 0.1, 0.94, 43, vec![Output::Profit]),
        "fig7" => (Variable::S, 0.005, 0.09, 18, vec![Output::EPrice]),
        _ => return None,
    };
    Some(grid)
}

fn build_spec(args: &SweepArgs) -> Result<SweepSpec, CliError> {
    let base = config::resolve_market(&args.market, &SWEEP_PRESETS)?;
    let preset = args.market.preset.as_deref().and_then(preset_grid);
    let (mut variable, mut lo, mut hi, mut steps, outputs) = match preset {
        Some((variable, lo, hi, steps, outputs)) => {
            (Some(variable), Some(lo), Some(hi), Some(steps), outputs)
        }
        None => (None, None, None, None, Output::ALL.to_vec()),
    };
    if let Some(name) = &args.variable {
        variable = Some(Variable::parse(name)?);
    }
    if args.lo.is_some() {
        lo = args.lo;
    }
    if args.hi.is_some() {
        hi = args.hi;
    }
    if args.steps.is_some() {
        steps = args.steps;
    }
    let (variable, lo, hi, steps) = match (variable, lo, hi, steps) {
        (Some(v), Some(l), Some(h), Some(n)) => (v, l, h, n),
        _ => {
            return Err(CliError::Usage(
                "sweep needs --variable, --lo, --hi, and --steps (or a figure preset)".into(),
            ))
        }
    };
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(CliError::Usage(format!(
            "sweep range must satisfy lo < hi (got lo={lo}, hi={hi})"
        )));
    }
    if steps < 2 {
        return Err(CliError::Usage(format!(
            "sweep needs at least 2 grid points (got {steps})"
        )));
    }
    if variable == Variable::Kmax && lo.round() < 1.0 {
        return Err(CliError::Usage(format!(
            "kmax grid must start at 1 or above (got lo={lo})"
        )));
    }
    Ok(SweepSpec {
        variable,
        lo,
        hi,
        steps,
        outputs,
        base,
    })
}

fn substitute(base: &Market, variable: Variable, x: f64) -> Market {
    let mut market = *base;
    match variable {
        Variable::Gamma => market.gamma = x,
        Variable::Delta => market.delta = x,
        Variable::S => market.s = x,
        Variable::Kmax => market.kmax = x.round() as usize,
    }
    market
}

fn row(spec: &SweepSpec, x: f64) -> Result<String, CliError> {
    let market = substitute(&spec.base, spec.variable, x);
    let dist = DegreeDistribution::power_law(market.gamma, market.kmax)?;
    let params = MarketParams::new(market.v, market.s, market.delta)?;
    let mut cells = vec![if spec.variable == Variable::Kmax {
        market.kmax.to_string()
    } else {
        fmt_real(x)
    }];
    let status = match stable_equilibrium(&dist, &params) {
        Ok(eq) => {
            cells.extend(spec.outputs.iter().map(|o| fmt_real(o.read(&eq))));
            "ok"
        }
        Err(Error::NoEquilibrium(_)) | Err(Error::NoComparison(_)) => {
            cells.extend(spec.outputs.iter().map(|_| "NA".to_string()));
            "no-equilibrium"
        }
        Err(e) => return Err(e.into()),
    };
    cells.push(status.to_string());
    Ok(cells.join(","))
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let spec = build_spec(args)?;
    let mut header = vec![spec.variable.name().to_string()];
    header.extend(spec.outputs.iter().map(|o| o.name().to_string()));
    header.push("status".to_string());

    let step = (spec.hi - spec.lo) / (spec.steps - 1) as f64;
    let rows: Vec<String> = (0..spec.steps)
        .into_par_iter()
        .map(|i| row(&spec, spec.lo + step * i as f64))
        .collect::<Result<_, _>>()?;

    let mut csv = header.join(",");
    csv.push('\n');
    for r in &rows {
        csv.push_str(r);
        csv.push('\n');
    }
    write_file(&args.out, &csv)
}
