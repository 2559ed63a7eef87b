//! Pipeline run files: one `key = value` per line, `#` starts a comment.
//! Relative paths are resolved against the directory of the file.
//!
//! ```text
//! field = ../fields/k257.field
//! xmax = 100000
//! k = 3
//! cutoff = 100000
//! out = run-k257
//! ```

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

pub const DEFAULT_XMAX: usize = 10_000;
pub const DEFAULT_K: u32 = 3;
pub const DEFAULT_CUTOFF: u64 = 100_000;
pub const DEFAULT_FIT_XMIN: u64 = 100;
pub const DEFAULT_DEGREE: usize = 2;
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub field: Option<PathBuf>,
    pub xmax: usize,
    pub k: u32,
    pub cutoff: u64,
    pub out: PathBuf,
    pub counter: String,
    pub fit_xmin: u64,
    pub degree: usize,
    pub per_decade: u32,
    pub sub_leading: Option<[f64; 2]>,
    pub threads: Option<usize>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            field: None,
            xmax: DEFAULT_XMAX,
            k: DEFAULT_K,
            cutoff: DEFAULT_CUTOFF,
            out: PathBuf::from("pipeline-out"),
            counter: "sweep".into(),
            fit_xmin: DEFAULT_FIT_XMIN,
            degree: DEFAULT_DEGREE,
            per_decade: 20,
            sub_leading: None,
            threads: None,
        }
    }
}

/// `c1,c2` as two floats.
pub fn parse_pair(s: &str) -> Result<[f64; 2]> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("expected two comma-separated numbers, got {s:?}"))?;
    match v[..] {
        [a, b] => Ok([a, b]),
        _ => bail!("expected two comma-separated numbers, got {s:?}"),
    }
}

/// `log20` style grid names: `log` followed by points per decade.
pub fn parse_grid(s: &str) -> Result<u32> {
    let n = s
        .strip_prefix("log")
        .and_then(|n| n.parse::<u32>().ok())
        .filter(|n| *n > 0);
    n.with_context(|| format!("unknown grid {s:?}; expected e.g. log20"))
}

impl PipelineConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("file not found: {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("line {}: expected `key = value`", i + 1))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.contains(&key.to_string()) {
                bail!("line {}: duplicate key `{key}`", i + 1);
            }
            seen.push(key.to_string());
            let ctx = || format!("line {}: bad value for `{key}`", i + 1);
            match key {
                "field" => cfg.field = Some(base.join(value)),
                "out" => cfg.out = base.join(value),
                "xmax" => cfg.xmax = value.parse().with_context(ctx)?,
                "k" => cfg.k = value.parse().with_context(ctx)?,
                "cutoff" => cfg.cutoff = value.parse().with_context(ctx)?,
                "counter" => cfg.counter = value.to_string(),
                "fit_xmin" => cfg.fit_xmin = value.parse().with_context(ctx)?,
                "degree" => cfg.degree = value.parse().with_context(ctx)?,
                "grid" => cfg.per_decade = parse_grid(value).with_context(ctx)?,
                "sub_leading" => cfg.sub_leading = Some(parse_pair(value).with_context(ctx)?),
                "threads" => cfg.threads = Some(value.parse().with_context(ctx)?),
                other => bail!("line {}: unknown key `{other}`", i + 1),
            }
        }
        if cfg.xmax == 0 {
            bail!("xmax must be positive");
        }
        Ok(cfg)
    }
}
