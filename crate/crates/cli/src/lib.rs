//! Command-line front end for `fading-order`.
//!
//! Exit codes: 0 for a positive verdict or success, 1 for a negative
//! verdict, 2 for usage and input errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use fading_order::capacity::{strong_ic_region_with, very_strong_ic_region_with, wtc_secrecy_capacity_with};
use fading_order::classifier::{
    classify_bc, classify_ic_strong, classify_ic_very_strong, classify_wtc, ClassifyOptions,
};
use fading_order::coupling::comonotone_sample;
use fading_order::figures::{figure_csv, DEFAULT_HMAX, DEFAULT_POINTS};
use fading_order::markov::{check_markov_degraded, MarkovVerdict};
use fading_order::verify::{run_suite, suite_ok, SuiteOptions, DEFAULT_SUITE_SAMPLES};
use fading_order::{
    BcScenario, Dependence, Error, GainDistribution, IcScenario, MarkovChannelSpec, MaximalCouplingSpec, WtcScenario,
};

pub const EXIT_POSITIVE: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "fading-order", version, about = "Stochastic-order classification of fading multiuser channels")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Master seed for every Monte Carlo step.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Compute rates even when the scenario is not classified.
    #[arg(long, global = true)]
    pub force: bool,
    /// Override the CCDF comparison tolerance.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a scenario and print the report as JSON.
    Classify { scenario: PathBuf },
    /// Vertices of the capacity region of an interference scenario as CSV.
    Region { scenario: PathBuf },
    /// Ergodic secrecy capacity of a wiretap scenario.
    Secrecy { scenario: PathBuf },
    /// Draw coupled gain pairs as CSV.
    CouplingSample {
        input: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = CouplingKind::Maximal)]
        method: CouplingKind,
    },
    /// CCDF-difference curves of the very-strong interference condition.
    Figure {
        #[arg(long)]
        fig: u32,
        #[arg(long, default_value_t = DEFAULT_HMAX)]
        hmax: f64,
        #[arg(long, default_value_t = DEFAULT_POINTS)]
        points: usize,
    },
    /// Degradedness certificate for a pair of Markov fading chains.
    MarkovCheck { input: PathBuf },
    /// Run the Monte Carlo verification suite.
    Verify {
        #[arg(long, default_value_t = DEFAULT_SUITE_SAMPLES)]
        samples: usize,
        #[arg(long)]
        include_negative_controls: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CouplingKind {
    Maximal,
    Comonotone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interference {
    #[default]
    Strong,
    VeryStrong,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "topology", rename_all = "snake_case")]
pub enum Scenario {
    Bc {
        users: Vec<GainDistribution>,
        power: f64,
        #[serde(default)]
        seed: Option<u64>,
    },
    Ic {
        h11: GainDistribution,
        h12: GainDistribution,
        h21: GainDistribution,
        h22: GainDistribution,
        p1: f64,
        p2: f64,
        #[serde(default)]
        dependence: Dependence,
        #[serde(default)]
        interference: Interference,
        #[serde(default)]
        seed: Option<u64>,
    },
    Wtc {
        legit: GainDistribution,
        eaves: GainDistribution,
        power: f64,
        #[serde(default)]
        seed: Option<u64>,
    },
    MarkovBc {
        weak: MarkovChannelSpec,
        strong: MarkovChannelSpec,
    },
}

/// A failed command: exit code plus message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Unclassified(_)) { EXIT_NEGATIVE } else { EXIT_USAGE };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> std::result::Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_scenario(path: &Path) -> std::result::Result<Scenario, Failure> {
    let s: Scenario = read_json(path)?;
    let check = |d: &GainDistribution| d.clone().validated().map(|_| ());
    match &s {
        Scenario::Bc { users, .. } => users.iter().try_for_each(check)?,
        Scenario::Ic { h11, h12, h21, h22, .. } => [h11, h12, h21, h22].into_iter().try_for_each(check)?,
        Scenario::Wtc { legit, eaves, .. } => [legit, eaves].into_iter().try_for_each(check)?,
        Scenario::MarkovBc { .. } => {}
    }
    Ok(s)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

struct Ctx<'a> {
    global: &'a GlobalOpts,
    stdout: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn emit(&mut self, text: &str) -> std::result::Result<(), Failure> {
        match &self.global.out {
            Some(p) => fs::write(p, text).map_err(|e| Failure::usage(format!("{}: {e}", p.display()))),
            None => self
                .stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::usage(format!("stdout: {e}"))),
        }
    }

    fn options(&self, scenario_seed: Option<u64>) -> ClassifyOptions {
        ClassifyOptions {
            tolerance: self.global.tolerance,
            seed: self.global.seed.or(scenario_seed).unwrap_or(0),
            ..ClassifyOptions::default()
        }
    }
}

fn verdict_code(positive: bool) -> i32 {
    if positive {
        EXIT_POSITIVE
    } else {
        EXIT_NEGATIVE
    }
}

fn ic_scenario(
    [h11, h12, h21, h22]: [GainDistribution; 4],
    p1: f64,
    p2: f64,
    dependence: Dependence,
) -> std::result::Result<IcScenario, Failure> {
    Ok(IcScenario::new([h11, h12, h21, h22], p1, p2, dependence)?)
}

fn cmd_classify(ctx: &mut Ctx, path: &Path) -> CmdResult {
    match load_scenario(path)? {
        Scenario::Bc { users, power, seed } => {
            let r = classify_bc(&BcScenario::new(users, power)?, &ctx.options(seed))?;
            ctx.emit(&to_json(&r))?;
            Ok(verdict_code(r.verdict))
        }
        Scenario::Ic {
            h11,
            h12,
            h21,
            h22,
            p1,
            p2,
            dependence,
            interference,
            seed,
        } => {
            let s = ic_scenario([h11, h12, h21, h22], p1, p2, dependence)?;
            let opts = ctx.options(seed);
            let r = match interference {
                Interference::Strong => classify_ic_strong(&s, &opts)?,
                Interference::VeryStrong => classify_ic_very_strong(&s, &opts)?,
            };
            ctx.emit(&to_json(&r))?;
            Ok(verdict_code(r.verdict))
        }
        Scenario::Wtc {
            legit,
            eaves,
            power,
            seed,
        } => {
            let r = classify_wtc(&WtcScenario::new(legit, eaves, power)?, &ctx.options(seed))?;
            ctx.emit(&to_json(&r))?;
            Ok(verdict_code(r.verdict))
        }
        Scenario::MarkovBc { weak, strong } => markov_report(ctx, &weak, &strong),
    }
}

fn markov_report(ctx: &mut Ctx, weak: &MarkovChannelSpec, strong: &MarkovChannelSpec) -> CmdResult {
    let cert = check_markov_degraded(weak, strong)?;
    ctx.emit(&to_json(&cert))?;
    Ok(verdict_code(cert.verdict == MarkovVerdict::Degraded))
}

#[derive(Serialize)]
struct RegionSidecar<'a> {
    interference: &'static str,
    forced: bool,
    constraints: &'a [fading_order::capacity::RateConstraint],
}

fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("constraints.json")
}

fn cmd_region(ctx: &mut Ctx, path: &Path) -> CmdResult {
    let Scenario::Ic {
        h11,
        h12,
        h21,
        h22,
        p1,
        p2,
        dependence,
        interference,
        seed,
    } = load_scenario(path)?
    else {
        return Err(Failure::usage("region needs an interference-channel (\"ic\") scenario"));
    };
    let s = ic_scenario([h11, h12, h21, h22], p1, p2, dependence)?;
    let opts = ctx.options(seed);
    let (region, label) = match interference {
        Interference::Strong => (strong_ic_region_with(&s, &opts, ctx.global.force)?, "strong"),
        Interference::VeryStrong => (very_strong_ic_region_with(&s, &opts, ctx.global.force)?, "very_strong"),
    };
    ctx.emit(&region.vertices_csv())?;
    if let Some(out) = &ctx.global.out {
        let side = sidecar_path(out);
        let body = to_json(&RegionSidecar {
            interference: label,
            forced: region.forced,
            constraints: &region.constraints,
        });
        fs::write(&side, body).map_err(|e| Failure::usage(format!("{}: {e}", side.display())))?;
    }
    Ok(EXIT_POSITIVE)
}

#[derive(Serialize)]
struct SecrecyOutput {
    secrecy_bits: f64,
    method: fading_order::RateMethod,
    error_estimate: f64,
    forced: bool,
}

fn cmd_secrecy(ctx: &mut Ctx, path: &Path) -> CmdResult {
    let Scenario::Wtc {
        legit,
        eaves,
        power,
        seed,
    } = load_scenario(path)?
    else {
        return Err(Failure::usage("secrecy needs a wiretap (\"wtc\") scenario"));
    };
    let s = WtcScenario::new(legit, eaves, power)?;
    let opts = ctx.options(seed);
    let degraded = classify_wtc(&s, &opts)?.verdict;
    let v = wtc_secrecy_capacity_with(&s, &opts, ctx.global.force)?;
    ctx.emit(&to_json(&SecrecyOutput {
        secrecy_bits: v.bits,
        method: v.method,
        error_estimate: v.error_estimate,
        forced: !degraded,
    }))?;
    Ok(EXIT_POSITIVE)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CouplingInput {
    first: GainDistribution,
    second: GainDistribution,
}

fn cmd_coupling_sample(ctx: &mut Ctx, path: &Path, samples: usize, method: CouplingKind) -> CmdResult {
    let input: CouplingInput = read_json(path)?;
    let (d1, d2) = (input.first.validated()?, input.second.validated()?);
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.global.seed.unwrap_or(0));
    let mut out = String::from("h1,h2,equal_flag\n");
    match method {
        CouplingKind::Maximal => {
            let spec = MaximalCouplingSpec::new(d1, d2)?;
            for _ in 0..samples {
                let (a, b): (f64, f64) = (rng.gen(), rng.gen());
                let s = spec.sample(a, b);
                let flag = s.equal_flag.map(|f| if f { "1" } else { "0" }).unwrap_or("");
                out.push_str(&format!("{},{},{flag}\n", s.h1, s.h2));
            }
        }
        CouplingKind::Comonotone => {
            for _ in 0..samples {
                let s = comonotone_sample(&d1, &d2, rng.gen());
                out.push_str(&format!("{},{},\n", s.h1, s.h2));
            }
        }
    }
    ctx.emit(&out)?;
    Ok(EXIT_POSITIVE)
}

/// `{"weak": {...}, "strong": {...}}`; other keys such as `topology` are
/// ignored.
#[derive(Deserialize)]
struct MarkovInput {
    weak: MarkovChannelSpec,
    strong: MarkovChannelSpec,
}

fn cmd_verify(ctx: &mut Ctx, samples: usize, include_negative_controls: bool) -> CmdResult {
    if samples < 100 {
        return Err(Failure::usage("--samples must be at least 100"));
    }
    let reports = run_suite(&SuiteOptions {
        master_seed: ctx.global.seed.unwrap_or(0),
        samples,
        include_negative_controls,
    })?;
    ctx.emit(&to_json(&reports))?;
    Ok(verdict_code(suite_ok(&reports)))
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_POSITIVE };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut ctx = Ctx {
        global: &cli.global,
        stdout,
    };
    let result = match &cli.command {
        Command::Classify { scenario } => cmd_classify(&mut ctx, scenario),
        Command::Region { scenario } => cmd_region(&mut ctx, scenario),
        Command::Secrecy { scenario } => cmd_secrecy(&mut ctx, scenario),
        Command::CouplingSample { input, samples, method } => cmd_coupling_sample(&mut ctx, input, *samples, *method),
        Command::Figure { fig, hmax, points } => {
            figure_csv(*fig, *hmax, *points)
            .map_err(Failure::from)
            .and_then(|csv| ctx.emit(&csv).map(|_| EXIT_POSITIVE))
        }
        Command::MarkovCheck { input } => {
            read_json::<MarkovInput>(input).and_then(|m| markov_report(&mut ctx, &m.weak, &m.strong))
        }
        Command::Verify {
            samples,
            include_negative_controls,
        } => cmd_verify(&mut ctx, *samples, *include_negative_controls),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
