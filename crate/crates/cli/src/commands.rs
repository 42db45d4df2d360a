//! The five subcommands, wired over the library.

use std::path::Path;

use freeconv::outlier::{self, SpikeSet};
use freeconv::rmt;
use freeconv::subordination;
use freeconv::{C64, Error, Result, SpectralMeasure};

use crate::config::RunConfig;
use crate::output;

pub struct Context {
    pub config: RunConfig,
    pub hash: String,
    pub mu: SpectralMeasure,
    pub nu: SpectralMeasure,
}

impl Context {
    pub fn new(config: RunConfig) -> Result<Context> {
        let mu = config.mu.build()?;
        let nu = config.nu.build()?;
        let hash = config.hash();
        Ok(Context { config, hash, mu, nu })
    }

    fn out_dir(&self) -> &Path {
        Path::new(&self.config.output_dir)
    }

    fn spikes(&self) -> Result<SpikeSet> {
        SpikeSet::new(self.config.spikes.clone(), &self.mu)
    }
}

/// Which transform `cmd_transform` evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Which {
    G,
    F,
    H,
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MeasurePick {
    Mu,
    Nu,
}

/// Parse `re[,im]` pairs separated by `;`.
pub fn parse_points(text: &str) -> Result<Vec<C64>> {
    let mut points = Vec::new();
    for chunk in text.split(';').filter(|c| !c.trim().is_empty()) {
        let parts: Vec<&str> = chunk.split(',').map(str::trim).collect();
        let bad = || Error::Config(format!("cannot parse point '{chunk}' (want re or re,im)"));
        match parts.as_slice() {
            [re] => points.push(C64::new(re.parse().map_err(|_| bad())?, 0.0)),
            [re, im] => points.push(C64::new(
                re.parse().map_err(|_| bad())?,
                im.parse().map_err(|_| bad())?,
            )),
            _ => return Err(bad()),
        }
    }
    if points.is_empty() {
        return Err(Error::Config("no evaluation points given".into()));
    }
    Ok(points)
}

/// `transform`: evaluate G, F, h, or R of one configured measure at the
/// given complex points and write `re_z,im_z,re_val,im_val` rows.
pub fn cmd_transform(ctx: &Context, which: Which, pick: MeasurePick, points: &[C64]) -> Result<()> {
    let measure = match pick {
        MeasurePick::Mu => &ctx.mu,
        MeasurePick::Nu => &ctx.nu,
    };
    let mut body = String::from("re_z,im_z,re_val,im_val\n");
    for &z in points {
        let value = match which {
            Which::G => measure.cauchy_transform(z),
            Which::F => measure.reciprocal_cauchy(z),
            Which::H => measure.h_transform(z),
            Which::R => measure.r_transform(z),
        }
        .map_err(|e| match e {
            Error::Domain(msg) => Error::Domain(format!("at point {z}: {msg}")),
            Error::Pole(msg) => Error::Pole(format!("at point {z}: {msg}")),
            other => other,
        })?;
        body.push_str(&format!("{},{},{},{}\n", z.re, z.im, value.re, value.im));
    }
    let path = output::write_csv(ctx.out_dir(), "transform.csv", &ctx.hash, &body)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// `convolve`: density and support of `mu ⊞ nu`, optionally with the
/// subordination trace along the grid.
pub fn cmd_convolve(ctx: &Context, trace: bool) -> Result<()> {
    let ladder = ctx.config.ladder();
    let support = subordination::convolution_support(&ctx.mu, &ctx.nu);
    let grid: Vec<f64> = match &ctx.config.grid {
        Some(g) => (0..g.points)
            .map(|j| g.lo + (g.hi - g.lo) * j as f64 / (g.points - 1) as f64)
            .collect(),
        None => {
            let (lo, hi) = support.hull();
            let pad = 0.25 * support.diameter().max(1.0);
            let points = 400;
            (0..points)
                .map(|j| lo - pad + (hi - lo + 2.0 * pad) * j as f64 / (points - 1) as f64)
                .collect()
        }
    };
    let profile = subordination::convolution_density(&ctx.mu, &ctx.nu, &grid, &ladder)?;
    for x in &profile.failed {
        log::warn!("density at {x} did not converge; point flagged");
    }
    let path = output::write_csv(ctx.out_dir(), "density.csv", &ctx.hash, &profile.to_csv())?;
    println!("wrote {}", path.display());
    let path = output::write_csv(ctx.out_dir(), "support.csv", &ctx.hash, &support.to_csv())?;
    println!("wrote {}", path.display());

    if trace {
        let eps = *ladder.last().unwrap();
        let mut body = String::from("re_z,im_z,re_w1,im_w1,re_w2,im_w2,iters,residual\n");
        for &x in &grid {
            let z = C64::new(x, eps);
            match subordination::denjoy_wolff(&ctx.mu, &ctx.nu, z) {
                Ok(sp) => body.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    z.re, z.im, sp.omega1.re, sp.omega1.im, sp.omega2.re, sp.omega2.im,
                    sp.iterations, sp.residual
                )),
                Err(e) => log::warn!("trace at {z} skipped: {e}"),
            }
        }
        let path = output::write_csv(ctx.out_dir(), "subordination_trace.csv", &ctx.hash, &body)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn predictions(ctx: &Context) -> Result<Vec<outlier::OutlierPrediction>> {
    let spikes = ctx.spikes()?;
    if spikes.is_empty() {
        return Ok(Vec::new());
    }
    let support = subordination::convolution_support(&ctx.mu, &ctx.nu);
    let (window, step) = outlier::default_window(&support);
    outlier::solve_outliers(&ctx.mu, &ctx.nu, &spikes, window, step)
}

/// `outliers`: admissible spike-equation roots as CSV.
pub fn cmd_outliers(ctx: &Context) -> Result<()> {
    let preds = predictions(ctx)?;
    let path = output::write_csv(
        ctx.out_dir(),
        "predictions.csv",
        &ctx.hash,
        &outlier::predictions_to_csv(&preds),
    )?;
    println!("wrote {} ({} predictions)", path.display(), preds.len());
    Ok(())
}

/// `simulate`: Monte Carlo verification of the predictions; returns the
/// pass fraction.
pub fn cmd_simulate(ctx: &Context) -> Result<f64> {
    let sim = ctx
        .config
        .simulation
        .as_ref()
        .ok_or_else(|| Error::Config("this command needs a 'simulation' config block".into()))?;
    let spikes = ctx.spikes()?;
    let preds = predictions(ctx)?;
    let report = rmt::run_verification(
        &ctx.mu,
        &ctx.nu,
        &spikes,
        &preds,
        sim.n,
        sim.trials,
        sim.epsilon,
        sim.eta,
        sim.seed,
    )?;
    let path = output::write_csv(ctx.out_dir(), "report.csv", &ctx.hash, &report.to_csv())?;
    println!("wrote {}", path.display());
    let mut summary = report.summary_json(ctx.config.echo_json());
    summary["config_hash"] = serde_json::Value::String(ctx.hash.clone());
    summary["generated_unix_seconds"] = serde_json::json!(
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    );
    let path = output::write_json(ctx.out_dir(), "summary.json", &summary)?;
    println!("wrote {}", path.display());
    println!(
        "pass fraction {:.3} over {} trials ({} predictions, {} strays)",
        report.pass_fraction,
        report.trials,
        report.predictions.len(),
        report.strays.len()
    );
    Ok(report.pass_fraction)
}

/// `verify`: predictions + simulation combined into a single pass/fail.
pub fn cmd_verify(ctx: &Context, threshold: f64) -> Result<bool> {
    cmd_outliers(ctx)?;
    let fraction = cmd_simulate(ctx)?;
    Ok(fraction >= threshold)
}
