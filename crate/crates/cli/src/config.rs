use std::fs;
use std::path::{Path, PathBuf};

use nvchern::dynamics::InitPolicy;
use nvchern::models::DEFAULT_A_PAR_HZ;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {reason}")]
    Syntax { path: PathBuf, line: usize, reason: String },
    #[error("{key}: {reason}")]
    Value { key: String, reason: String },
}

/// Settings shared by every command, resolved as flags over file over defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// Hyperfine splitting as an ordinary frequency (Hz).
    pub a_par_hz: f64,
    pub alpha: f64,
    pub dt_s: f64,
    pub n_theta: usize,
    pub init: InitPolicy,
    pub jobs: Option<usize>,
    /// Directory for outputs of commands run without an explicit path.
    pub out_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            a_par_hz: DEFAULT_A_PAR_HZ,
            alpha: 2.0,
            dt_s: 1e-9,
            n_theta: 181,
            init: InitPolicy::GroundState,
            jobs: None,
            out_dir: None,
        }
    }
}

pub fn parse_init(s: &str) -> Result<InitPolicy, ConfigError> {
    match s {
        "ground" | "ground-state" => Ok(InitPolicy::GroundState),
        "electron-zero" => Ok(InitPolicy::ElectronZero),
        other => Err(ConfigError::Value {
            key: "init".into(),
            reason: format!("expected ground or electron-zero, got {other:?}"),
        }),
    }
}

fn positive_f64(key: &str, v: &str) -> Result<f64, ConfigError> {
    match v.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(ConfigError::Value {
            key: key.into(),
            reason: format!("expected a positive number, got {v:?}"),
        }),
    }
}

fn positive_usize(key: &str, v: &str) -> Result<usize, ConfigError> {
    match v.parse::<usize>() {
        Ok(x) if x > 0 => Ok(x),
        _ => Err(ConfigError::Value {
            key: key.into(),
            reason: format!("expected a positive integer, got {v:?}"),
        }),
    }
}

impl RunConfig {
    /// Applies `key = value` lines on top of `self`. `#` starts a comment.
    pub fn merge_text(mut self, text: &str, path: &Path) -> Result<Self, ConfigError> {
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |reason: String| ConfigError::Syntax {
                path: path.to_path_buf(),
                line: k + 1,
                reason,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| syntax(format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim().trim_matches('"'));
            match key {
                "a_par_hz" => self.a_par_hz = positive_f64(key, value)?,
                "alpha" => self.alpha = positive_f64(key, value)?,
                "dt_s" => self.dt_s = positive_f64(key, value)?,
                "n_theta" => self.n_theta = positive_usize(key, value)?,
                "init" => self.init = parse_init(value)?,
                "jobs" => self.jobs = Some(positive_usize(key, value)?),
                "out_dir" => self.out_dir = Some(PathBuf::from(value)),
                other => return Err(syntax(format!("unknown key {other:?}"))),
            }
        }
        Ok(self)
    }

    pub fn load(self, path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        self.merge_text(&text, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let text = "# run\nalpha = 8\ndt_s=5e-10\n n_theta = 91 \ninit = electron-zero\njobs = 3\na_par_hz = 2.1e6 # Hz\nout_dir = \"/tmp/x\"\n";
        let c = RunConfig::default().merge_text(text, Path::new("c")).unwrap();
        assert_eq!(c.alpha, 8.0);
        assert_eq!(c.dt_s, 5e-10);
        assert_eq!(c.n_theta, 91);
        assert_eq!(c.init, InitPolicy::ElectronZero);
        assert_eq!(c.jobs, Some(3));
        assert_eq!(c.a_par_hz, 2.1e6);
        assert_eq!(c.out_dir, Some(PathBuf::from("/tmp/x")));
    }

    #[test]
    fn rejects_bad_lines() {
        let p = Path::new("c");
        assert!(matches!(
            RunConfig::default().merge_text("alpha 2", p),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
        assert!(RunConfig::default().merge_text("colour = red", p).is_err());
        assert!(RunConfig::default().merge_text("alpha = -1", p).is_err());
        assert!(RunConfig::default().merge_text("init = excited", p).is_err());
        assert!(RunConfig::default().merge_text("jobs = 0", p).is_err());
    }
}
