//! Monte-Carlo verification: simulate the market at the solved equilibrium
//! and demand that every closed form lands within three standard errors.
//!
//! `--q-offset` shifts the search probability away from the root while the
//! price law is kept consistent with the shifted value, so exactly one check
//! (the search-indifference condition) should fail. That proves the test has
//! power rather than trivially passing.

use womlab::eq_baseline::stable_equilibrium;
use womlab::pricing::{eta_baseline, firm_profit_baseline};
use womlab::simulate::simulate_market;
use womlab::{PriceLaw, SimConfig};

use crate::{build_market, config, CliError, VerifyArgs};

const N_REPLICATIONS: usize = 20;
const PROFIT_POINTS: usize = 11;

struct Check {
    name: String,
    gap: f64,
    limit: f64,
}

impl Check {
    fn ok(&self) -> bool {
        self.gap <= self.limit
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let resolved = config::resolve(&args.market, &["fig1"])?;
    let seed = args.seed.or(resolved.seed).unwrap_or(42);
    let samples = args.samples.or(resolved.samples).unwrap_or(1_000_000);
    if samples < 2 * N_REPLICATIONS as u64 {
        return Err(CliError::Usage(format!(
            "need at least {} samples for {N_REPLICATIONS} replications (got {samples})",
            2 * N_REPLICATIONS
        )));
    }
    let (dist, params) = build_market(&resolved.market)?;

    let eq = stable_equilibrium(&dist, &params)?;
    let q = eq.q + args.q_offset;
    if !(q > 0.0 && q < 1.0) {
        return Err(CliError::Usage(format!(
            "offset search probability {q} falls outside (0, 1)"
        )));
    }
    // Rebuild the price law from the (possibly offset) search probability, so
    // the simulated market is internally consistent and only the indifference
    // condition can detect the offset.
    let eta = eta_baseline(&dist, q, params.delta())?;
    let law = PriceLaw::from_eta(eta, params.s())?;

    let span = law.p_hi() - law.p_lo();
    let profit_grid: Vec<f64> = (0..PROFIT_POINTS)
        .map(|i| law.p_lo() + span * i as f64 / (PROFIT_POINTS - 1) as f64)
        .collect();
    let config = SimConfig {
        n_consumers: (samples / N_REPLICATIONS as u64) as usize,
        n_replications: N_REPLICATIONS,
        seed,
        profit_grid,
    };
    let report = simulate_market(&dist, &params, q, &law, &config)?;
    print!("{}", report.to_csv());

    let mut checks = Vec::new();
    let a = report.payoff_active;
    let p = report.payoff_passive;
    checks.push(Check {
        name: "payoff_indifference".into(),
        gap: (a.mean - p.mean).abs(),
        limit: 3.0 * (a.stderr * a.stderr + p.stderr * p.stderr).sqrt(),
    });
    checks.push(Check {
        name: "e_price_paid".into(),
        gap: (report.e_price_paid.mean - law.e_p()).abs(),
        limit: 3.0 * report.e_price_paid.stderr,
    });
    checks.push(Check {
        name: "comparer_fraction".into(),
        gap: (report.comparer_fraction.mean - (1.0 - q) * dist.tau_tilde(q)?).abs(),
        limit: 3.0 * report.comparer_fraction.stderr,
    });
    for point in &report.profit_at {
        let analytic = firm_profit_baseline(&dist, q, params.delta(), &law, point.price)?;
        checks.push(Check {
            name: format!("profit@{:.6}", point.price),
            gap: (point.profit.mean - analytic).abs(),
            limit: 3.0 * point.profit.stderr,
        });
    }

    let mut failed = Vec::new();
    for check in &checks {
        println!(
            "check {}: {} (|gap|={:.3e}, limit={:.3e})",
            check.name,
            if check.ok() { "ok" } else { "FAIL" },
            check.gap,
            check.limit
        );
        if !check.ok() {
            failed.push(check.name.clone());
        }
    }
    if failed.is_empty() {
        println!("verify: PASS");
        Ok(())
    } else {
        let names = failed.join(", ");
        println!("verify: FAIL ({names})");
        Err(CliError::Run(format!("verification failed: {names}")))
    }
}
