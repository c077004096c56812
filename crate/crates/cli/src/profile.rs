//! The `kind(param=value,...)` grammar for initial data.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use ksblow_core::radial::{Dimension, FracOrder, RadialProfile};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    Chandrasekhar { eta: f64 },
    Shell { mass: f64, radius: f64 },
    TruncChandrasekhar { eta: f64, rin: f64, rout: f64 },
    Gauss { mass: f64, width: f64 },
    ExactDatum { blowup_time: f64, amp: f64 },
    Table { path: PathBuf },
}

const KINDS: &str = "chandrasekhar, shell, trunc_chandrasekhar, gauss, exact_datum, table";

impl ProfileSpec {
    pub fn parse(text: &str) -> CliResult<Self> {
        let bad = |msg: String| CliError::config(format!("profile '{text}': {msg}"));
        let s = text.trim();
        let open = s.find('(').ok_or_else(|| bad("expected kind(param=value,...)".into()))?;
        if !s.ends_with(')') {
            return Err(bad("missing closing ')'".into()));
        }
        let kind = s[..open].trim();
        let body = &s[open + 1..s.len() - 1];
        let mut params = BTreeMap::new();
        for item in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| bad(format!("'{item}' is not param=value")))?;
            if params.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(bad(format!("parameter '{}' given twice", k.trim())));
            }
        }
        let mut p = Params { kind, params, bad: &bad };
        let spec = match kind {
            "chandrasekhar" => ProfileSpec::Chandrasekhar { eta: p.num("eta")? },
            "shell" => ProfileSpec::Shell { mass: p.num("N")?, radius: p.num("R")? },
            "trunc_chandrasekhar" => ProfileSpec::TruncChandrasekhar {
                eta: p.num("eta")?,
                rin: p.num_or("rin", 0.0)?,
                rout: p.num_or("rout", f64::INFINITY)?,
            },
            "gauss" => ProfileSpec::Gauss { mass: p.num("mass")?, width: p.num("width")? },
            "exact_datum" => ProfileSpec::ExactDatum { blowup_time: p.num("T")?, amp: p.num_or("amp", 1.0)? },
            "table" => ProfileSpec::Table { path: PathBuf::from(p.take("path")?) },
            other => return Err(bad(format!("unknown kind '{other}' (expected one of {KINDS})"))),
        };
        p.finish()?;
        Ok(spec)
    }

    pub fn build(&self, d: Dimension, alpha: FracOrder) -> CliResult<RadialProfile> {
        Ok(match self {
            ProfileSpec::Chandrasekhar { eta } => RadialProfile::chandrasekhar(d, *eta, alpha)?,
            ProfileSpec::Shell { mass, radius } => RadialProfile::shell(d, *mass, *radius)?,
            ProfileSpec::TruncChandrasekhar { eta, rin, rout } => {
                RadialProfile::truncated_chandrasekhar(d, *eta, alpha, *rin, *rout)?
            }
            ProfileSpec::Gauss { mass, width } => RadialProfile::gaussian(d, *mass, *width)?,
            ProfileSpec::ExactDatum { blowup_time, amp } => RadialProfile::exact_datum_scaled(d, *blowup_time, *amp)?,
            ProfileSpec::Table { path } => {
                let (r, u) = read_table(path)?;
                RadialProfile::tabulated(d, r, u)?
            }
        })
    }

    /// Outer edge of a compactly supported datum.
    pub fn support(&self) -> CliResult<Option<f64>> {
        Ok(match self {
            ProfileSpec::TruncChandrasekhar { rout, .. } if rout.is_finite() => Some(*rout),
            ProfileSpec::Table { path } => read_table(path)?.0.last().copied(),
            _ => None,
        })
    }
}

impl fmt::Display for ProfileSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileSpec::Chandrasekhar { eta } => write!(f, "chandrasekhar(eta={eta:?})"),
            ProfileSpec::Shell { mass, radius } => write!(f, "shell(N={mass:?},R={radius:?})"),
            ProfileSpec::TruncChandrasekhar { eta, rin, rout } => {
                write!(f, "trunc_chandrasekhar(eta={eta:?},rin={rin:?},rout={rout:?})")
            }
            ProfileSpec::Gauss { mass, width } => write!(f, "gauss(mass={mass:?},width={width:?})"),
            ProfileSpec::ExactDatum { blowup_time, amp } if *amp == 1.0 => write!(f, "exact_datum(T={blowup_time:?})"),
            ProfileSpec::ExactDatum { blowup_time, amp } => write!(f, "exact_datum(T={blowup_time:?},amp={amp:?})"),
            ProfileSpec::Table { path } => write!(f, "table(path={})", path.display()),
        }
    }
}

struct Params<'a, F: Fn(String) -> CliError> {
    kind: &'a str,
    params: BTreeMap<String, String>,
    bad: &'a F,
}

impl<F: Fn(String) -> CliError> Params<'_, F> {
    fn take(&mut self, key: &str) -> CliResult<String> {
        self.params.remove(key).ok_or_else(|| (self.bad)(format!("{} needs parameter '{key}'", self.kind)))
    }

    fn num(&mut self, key: &str) -> CliResult<f64> {
        let v = self.take(key)?;
        self.to_num(key, &v)
    }

    fn num_or(&mut self, key: &str, default: f64) -> CliResult<f64> {
        match self.params.remove(key) {
            Some(v) => self.to_num(key, &v),
            None => Ok(default),
        }
    }

    fn to_num(&self, key: &str, v: &str) -> CliResult<f64> {
        v.parse::<f64>().map_err(|_| (self.bad)(format!("{key}={v} is not a number")))
    }

    fn finish(self) -> CliResult<()> {
        match self.params.keys().next() {
            Some(k) => Err((self.bad)(format!("{} does not take parameter '{k}'", self.kind))),
            None => Ok(()),
        }
    }
}

/// Two numeric columns (r, u); a non-numeric first row is taken as a header
/// and lines starting with '#' are skipped.
pub fn read_table(path: &Path) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| table_error(path, e))?;
    let (mut r, mut u) = (Vec::new(), Vec::new());
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| table_error(path, e))?;
        if rec.len() != 2 {
            return Err(CliError::config(format!(
                "{}: row {} has {} columns, expected 2",
                path.display(),
                i + 1,
                rec.len()
            )));
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(a), Ok(b)) => {
                r.push(a);
                u.push(b);
            }
            _ if i == 0 => continue,
            _ => return Err(CliError::config(format!("{}: row {} is not numeric", path.display(), i + 1))),
        }
    }
    Ok((r, u))
}

fn table_error(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::config(format!("{}: {other:?}", path.display())),
    }
}
