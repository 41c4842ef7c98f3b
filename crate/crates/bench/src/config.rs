//! Run configuration: command-line flags, flat `key = value` files, and the
//! resolved settings written into every report.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use hyperpint::blockprec::{InnerSolve, PrecBlocks, PrecConfig, PrecShape};
use hyperpint::mgrit::MgritOptions;
use hyperpint::problems::{MaterialId, NonlinearProblem, NonlinearProblemId, ACOUSTICS_CFL, DEFAULT_SEED};
use serde::Serialize;

use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Acoustics,
    Swe,
    Euler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PrecArg {
    /// Block diagonal.
    Jacobi,
    /// Block lower triangular.
    Gs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BlocksArg {
    /// Characteristic diagonal blocks.
    True,
    /// Advection approximations.
    Approx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum InnerArg {
    Exact,
    Mgrit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum LinearArg {
    /// Sequential solves of each linearized system.
    Exact,
    /// `inner-it` preconditioned iterations per linearized system.
    Prec,
}

/// A requested snapshot time; `T` stands for the final time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SnapshotTime {
    Final,
    At(f64),
}

/// Parses `t1,t2,...`, where each entry is a nonnegative number or `T`.
pub fn parse_snapshot_times(s: &str) -> Result<Vec<SnapshotTime>, BenchError> {
    s.split(',')
        .map(|tok| {
            let tok = tok.trim();
            if tok.eq_ignore_ascii_case("t") {
                return Ok(SnapshotTime::Final);
            }
            match tok.parse::<f64>() {
                Ok(t) if t.is_finite() && t >= 0.0 => Ok(SnapshotTime::At(t)),
                _ => Err(BenchError::Usage(format!("bad snapshot time {tok:?}"))),
            }
        })
        .collect()
}

/// Flags shared by every subcommand. Unset flags fall back to the config file, then to defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    #[arg(long)]
    pub nx: Option<usize>,
    /// Number of time points (default: from the CFL constant).
    #[arg(long)]
    pub nt: Option<usize>,
    #[arg(long)]
    pub cfl: Option<f64>,
    /// Coarsening factor.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_enum)]
    pub prec: Option<PrecArg>,
    #[arg(long, value_enum)]
    pub blocks: Option<BlocksArg>,
    #[arg(long, value_enum)]
    pub inner: Option<InnerArg>,
    #[arg(long)]
    pub vcycles: Option<usize>,
    #[arg(long = "inner-it")]
    pub inner_it: Option<usize>,
    #[arg(long)]
    pub maxit: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// idp, idpp, dam-break or sod.
    #[arg(long)]
    pub problem: Option<String>,
    /// Acoustic medium 1-5.
    #[arg(long)]
    pub material: Option<u32>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated times; `T` is the final time.
    #[arg(long, value_delimiter = ',', value_parser = snapshot_arg)]
    pub snapshot: Option<Vec<SnapshotTime>>,
    #[arg(long, value_enum)]
    pub linear: Option<LinearArg>,
    /// Solve on meshes 64, 128, ..., nx in turn, each started from the previous solution.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub nested: Option<bool>,
    /// Flat `key = value` file; keys are flag names without dashes prefix.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn snapshot_arg(s: &str) -> Result<SnapshotTime, String> {
    match parse_snapshot_times(s).map_err(|e| e.to_string())?.as_slice() {
        [t] => Ok(*t),
        _ => Err("expected one time".into()),
    }
}

/// Splits a flat config file into `(key, value)` pairs.
///
/// Blank lines and lines starting with `#` are skipped; keys may use `_` or `-`.
pub fn parse_flat_config(text: &str) -> Result<Vec<(String, String)>, BenchError> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |why: &str| BenchError::Config { line: k + 1, message: why.to_string() };
        let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-') {
            return Err(bad("invalid key"));
        }
        if value.is_empty() {
            return Err(bad("missing value"));
        }
        if pairs.iter().any(|(k, _)| *k == key) {
            return Err(bad("duplicate key"));
        }
        pairs.push((key, value.to_string()));
    }
    Ok(pairs)
}

fn value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, BenchError> {
    v.parse().map_err(|_| BenchError::Usage(format!("bad value {v:?} for {key}")))
}

fn choice<T: ValueEnum>(key: &str, v: &str) -> Result<T, BenchError> {
    T::from_str(v, true).map_err(|_| BenchError::Usage(format!("bad value {v:?} for {key}")))
}

impl Overrides {
    /// Settings from config-file pairs.
    pub fn from_pairs(pairs: &[(String, String)]) -> Result<Self, BenchError> {
        let mut o = Overrides::default();
        for (k, v) in pairs {
            let k = k.as_str();
            match k {
                "nx" => o.nx = Some(value(k, v)?),
                "nt" => o.nt = Some(value(k, v)?),
                "cfl" => o.cfl = Some(value(k, v)?),
                "m" => o.m = Some(value(k, v)?),
                "prec" => o.prec = Some(choice(k, v)?),
                "blocks" => o.blocks = Some(choice(k, v)?),
                "inner" => o.inner = Some(choice(k, v)?),
                "vcycles" => o.vcycles = Some(value(k, v)?),
                "inner-it" => o.inner_it = Some(value(k, v)?),
                "maxit" => o.maxit = Some(value(k, v)?),
                "tol" => o.tol = Some(value(k, v)?),
                "problem" => o.problem = Some(v.clone()),
                "material" => o.material = Some(value(k, v)?),
                "eps" => o.eps = Some(value(k, v)?),
                "seed" => o.seed = Some(value(k, v)?),
                "out" => o.out = Some(PathBuf::from(v)),
                "snapshot" => o.snapshot = Some(parse_snapshot_times(v)?),
                "linear" => o.linear = Some(choice(k, v)?),
                "nested" => o.nested = Some(value(k, v)?),
                _ => return Err(BenchError::Usage(format!("unknown config key {k:?}"))),
            }
        }
        Ok(o)
    }

    /// Fills every unset field from `other`.
    pub fn or(self, other: Overrides) -> Overrides {
        Overrides {
            nx: self.nx.or(other.nx),
            nt: self.nt.or(other.nt),
            cfl: self.cfl.or(other.cfl),
            m: self.m.or(other.m),
            prec: self.prec.or(other.prec),
            blocks: self.blocks.or(other.blocks),
            inner: self.inner.or(other.inner),
            vcycles: self.vcycles.or(other.vcycles),
            inner_it: self.inner_it.or(other.inner_it),
            maxit: self.maxit.or(other.maxit),
            tol: self.tol.or(other.tol),
            problem: self.problem.or(other.problem),
            material: self.material.or(other.material),
            eps: self.eps.or(other.eps),
            seed: self.seed.or(other.seed),
            out: self.out.or(other.out),
            snapshot: self.snapshot.or(other.snapshot),
            linear: self.linear.or(other.linear),
            nested: self.nested.or(other.nested),
            config: self.config.or(other.config),
        }
    }
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub kind: Kind,
    pub nx: usize,
    pub nt: Option<usize>,
    pub cfl: f64,
    pub m: usize,
    pub prec: PrecArg,
    pub blocks: BlocksArg,
    pub inner: InnerArg,
    pub vcycles: usize,
    pub inner_it: usize,
    pub maxit: usize,
    pub tol: f64,
    /// Nonlinear problem; `None` for acoustics.
    pub problem: Option<NonlinearProblemId>,
    pub material: Option<u32>,
    pub eps: Option<f64>,
    pub seed: u64,
    pub out: PathBuf,
    pub snapshot: Vec<SnapshotTime>,
    pub linear: LinearArg,
    pub nested: bool,
}

impl RunConfig {
    /// Applies defaults for `kind` and rejects flags that do not belong to it.
    pub fn resolve(kind: Kind, o: Overrides) -> Result<Self, BenchError> {
        let usage = |m: String| Err(BenchError::Usage(m));
        let (problem, material, eps, default_cfl, default_maxit) = match kind {
            Kind::Acoustics => {
                for (set, flag) in [
                    (o.problem.is_some(), "problem"),
                    (o.eps.is_some(), "eps"),
                    (o.linear.is_some(), "linear"),
                    (o.nested.is_some(), "nested"),
                    (o.inner_it.is_some(), "inner-it"),
                ] {
                    if set {
                        return usage(format!("--{flag} does not apply to acoustics"));
                    }
                }
                let material = o.material.unwrap_or(1);
                MaterialId::from_index(material)?;
                (None, Some(material), None, ACOUSTICS_CFL, 60)
            }
            Kind::Swe | Kind::Euler => {
                if o.material.is_some() {
                    return usage("--material only applies to acoustics".into());
                }
                let id = match &o.problem {
                    Some(p) => NonlinearProblemId::parse(p)?,
                    None if kind == Kind::Swe => NonlinearProblemId::Idp,
                    None => NonlinearProblemId::Idpp,
                };
                if id.is_euler() != (kind == Kind::Euler) {
                    return usage(format!("problem {} belongs to the other model", id.name()));
                }
                let eps = o.eps.unwrap_or(id.default_eps());
                let cfl = NonlinearProblem::new(id, eps)?.cfl;
                (Some(id), None, Some(eps), cfl, 15)
            }
        };
        let inner = o.inner.unwrap_or(InnerArg::Exact);
        let blocks = o.blocks.unwrap_or(match inner {
            InnerArg::Exact => BlocksArg::True,
            InnerArg::Mgrit => BlocksArg::Approx,
        });
        let cfg = RunConfig {
            kind,
            nx: o.nx.unwrap_or(256),
            nt: o.nt,
            cfl: o.cfl.unwrap_or(default_cfl),
            m: o.m.unwrap_or(8),
            prec: o.prec.unwrap_or(PrecArg::Jacobi),
            blocks,
            inner,
            vcycles: o.vcycles.unwrap_or(1),
            inner_it: o.inner_it.unwrap_or(1),
            maxit: o.maxit.unwrap_or(default_maxit),
            tol: o.tol.unwrap_or(1e-10),
            problem,
            material,
            eps,
            seed: o.seed.unwrap_or(DEFAULT_SEED),
            out: o.out.unwrap_or_else(|| PathBuf::from("out")),
            snapshot: o.snapshot.unwrap_or_default(),
            linear: o.linear.unwrap_or(LinearArg::Exact),
            nested: o.nested.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), BenchError> {
        let fail = |m: &str| Err(BenchError::Usage(m.to_string()));
        if self.nx < 3 {
            return fail("nx must be at least 3");
        }
        if !(self.cfl > 0.0 && self.cfl.is_finite()) {
            return fail("cfl must be positive");
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return fail("tol must be a nonnegative number");
        }
        if self.maxit == 0 {
            return fail("maxit must be positive");
        }
        if self.nested && self.nx < 64 {
            return fail("nested iteration starts at nx = 64");
        }
        self.prec_config().validate()?;
        Ok(())
    }

    pub fn prec_config(&self) -> PrecConfig {
        PrecConfig {
            shape: match self.prec {
                PrecArg::Jacobi => PrecShape::Diagonal,
                PrecArg::Gs => PrecShape::LowerTriangular,
            },
            blocks: match self.blocks {
                BlocksArg::True => PrecBlocks::Exact,
                BlocksArg::Approx => PrecBlocks::Advection,
            },
            inner: match self.inner {
                InnerArg::Exact => InnerSolve::Sequential,
                InnerArg::Mgrit => InnerSolve::Mgrit { v_cycles: self.vcycles },
            },
            m: self.m,
            mgrit: MgritOptions { m: self.m, ..MgritOptions::default() },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_config_skips_comments() {
        let p = parse_flat_config("# run\nnx = 128\n\ninner_it=2\n").unwrap();
        assert_eq!(p, vec![("nx".into(), "128".into()), ("inner-it".into(), "2".into())]);
        assert!(parse_flat_config("nx 128").is_err());
        assert!(parse_flat_config("nx = 1\nnx = 2").is_err());
        assert!(parse_flat_config("NX = 1").is_err());
        assert!(parse_flat_config("nx =").is_err());
    }

    #[test]
    fn snapshot_tokens() {
        let t = parse_snapshot_times("0.5, T,1").unwrap();
        assert_eq!(t, vec![SnapshotTime::At(0.5), SnapshotTime::Final, SnapshotTime::At(1.0)]);
        assert!(parse_snapshot_times("").is_err());
        assert!(parse_snapshot_times("-1").is_err());
        assert!(parse_snapshot_times("nan").is_err());
    }

    #[test]
    fn defaults_follow_the_kind() {
        let a = RunConfig::resolve(Kind::Acoustics, Overrides::default()).unwrap();
        assert_eq!((a.maxit, a.cfl, a.material), (60, 0.85, Some(1)));
        let e = RunConfig::resolve(Kind::Euler, Overrides::default()).unwrap();
        assert_eq!(e.problem, Some(NonlinearProblemId::Idpp));
        assert_eq!(e.maxit, 15);
        let mg = Overrides { inner: Some(InnerArg::Mgrit), ..Overrides::default() };
        assert_eq!(RunConfig::resolve(Kind::Acoustics, mg).unwrap().blocks, BlocksArg::Approx);
        let bad = Overrides { problem: Some("sod".into()), ..Overrides::default() };
        assert!(RunConfig::resolve(Kind::Swe, bad).is_err());
        let bad = Overrides { inner: Some(InnerArg::Mgrit), blocks: Some(BlocksArg::True), ..Overrides::default() };
        assert!(RunConfig::resolve(Kind::Acoustics, bad).is_err());
    }
}
