//! Run configuration: an optional flat TOML file, overridden by flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use vacfluct::scatter::TabulatedMirror;
use vacfluct::{Hbar, MirrorModel, Temperature};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub log: bool,
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        vacfluct::spectrum::frequency_grid(self.min, self.max, self.points, self.log)
            .map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Keys accepted in a config file. Same names as the flags, `_` for `-`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub hbar: Option<f64>,
    pub mirror: Option<OneOrMany<String>>,
    pub q: Option<OneOrMany<f64>>,
    pub m0: Option<f64>,
    pub omega0: Option<f64>,
    pub grid: Option<String>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub closed_form: Option<bool>,
    pub temperature: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Values given on the command line; `None` / empty means "not given".
#[derive(Debug, Default, Clone)]
pub struct FlagValues {
    pub hbar: Option<f64>,
    pub mirror: Vec<String>,
    pub q: Vec<f64>,
    pub m0: Option<f64>,
    pub omega0: Option<f64>,
    pub grid: Option<String>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub closed_form: bool,
    pub temperature: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub hbar: Hbar,
    pub mirrors: Vec<MirrorModel>,
    pub q: Vec<f64>,
    pub m0: Option<f64>,
    pub omega0: f64,
    pub grid: Option<GridSpec>,
    /// Relative tolerance; each command has its own default.
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
    /// Whether a format was asked for explicitly.
    pub format_given: bool,
    pub closed_form: bool,
    pub temperature: Temperature,
}

impl RunConfig {
    pub fn resolve(flags: FlagValues, file: FileConfig) -> Result<Self, CliError> {
        let bad = |e: vacfluct::Error| CliError::Config(e.to_string());
        let hbar = Hbar::new(flags.hbar.or(file.hbar).unwrap_or(1.0)).map_err(bad)?;
        let mirror_specs = if flags.mirror.is_empty() {
            file.mirror.map(OneOrMany::into_vec).unwrap_or_default()
        } else {
            flags.mirror
        };
        let mirrors = mirror_specs
            .iter()
            .map(|s| parse_mirror(s))
            .collect::<Result<Vec<_>, _>>()?;
        let q = if flags.q.is_empty() {
            file.q.map(OneOrMany::into_vec).unwrap_or_default()
        } else {
            flags.q
        };
        if let Some(&bad_q) = q.iter().find(|&&x| !(x.is_finite() && x > 0.0)) {
            return Err(CliError::Config(format!("q must be positive, got {bad_q}")));
        }
        let grid = flags.grid.or(file.grid).map(|g| parse_grid(&g)).transpose()?;
        let tol = flags.tol.or(file.tol);
        if let Some(t) = tol.filter(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(CliError::Config(format!("tol must be positive, got {t}")));
        }
        let format_name = flags.format.or(file.format);
        let format_given = format_name.is_some();
        let format = match format_name.as_deref() {
            None | Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(other) => return Err(CliError::Config(format!("unknown format {other:?} (csv or json)"))),
        };
        let temperature = Temperature::new(flags.temperature.or(file.temperature).unwrap_or(0.0)).map_err(bad)?;
        let omega0 = flags.omega0.or(file.omega0).unwrap_or(0.0);
        Ok(RunConfig {
            hbar,
            mirrors,
            q,
            m0: flags.m0.or(file.m0),
            omega0,
            grid,
            tol,
            out: flags.out.or(file.out),
            format,
            format_given,
            closed_form: flags.closed_form || file.closed_form.unwrap_or(false),
            temperature,
        })
    }

    pub fn single_mirror(&self) -> Result<&MirrorModel, CliError> {
        match self.mirrors.as_slice() {
            [m] => Ok(m),
            [] => Err(CliError::Config("a --mirror is required".into())),
            _ => Err(CliError::Config("this command takes exactly one --mirror".into())),
        }
    }

    pub fn m0(&self) -> Result<f64, CliError> {
        self.m0.ok_or_else(|| CliError::Config("--m0 is required".into()))
    }

    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        self.grid
            .ok_or_else(|| CliError::Config("--grid is required".into()))?
            .values()
    }
}

/// `min,max,points,log|lin`
pub fn parse_grid(s: &str) -> Result<GridSpec, CliError> {
    let err = || CliError::Config(format!("grid must be min,max,points,log|lin; got {s:?}"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [min, max, points, spacing] = parts.as_slice() else {
        return Err(err());
    };
    let log = match *spacing {
        "log" => true,
        "lin" => false,
        _ => return Err(err()),
    };
    let spec = GridSpec {
        min: min.parse().map_err(|_| err())?,
        max: max.parse().map_err(|_| err())?,
        points: points.parse().map_err(|_| err())?,
        log,
    };
    if spec.points < 2 || spec.min.partial_cmp(&spec.max) != Some(std::cmp::Ordering::Less) {
        return Err(CliError::Config(format!("grid needs points >= 2 and min < max; got {s:?}")));
    }
    Ok(spec)
}

/// `kind=perfect`, `kind=transparent`, `kind=single-pole,omega=W` or
/// `kind=tabulated,path=FILE`.
pub fn parse_mirror(s: &str) -> Result<MirrorModel, CliError> {
    let mut kind = None;
    let mut omega = None;
    let mut path = None;
    for field in s.split(',').map(str::trim).filter(|f| !f.is_empty()) {
        let Some((key, value)) = field.split_once('=') else {
            return Err(CliError::Config(format!("mirror field {field:?} is not key=value")));
        };
        match key.trim() {
            "kind" => kind = Some(value.trim().to_string()),
            "omega" => {
                omega = Some(value.trim().parse::<f64>().map_err(|_| {
                    CliError::Config(format!("mirror omega {value:?} is not a number"))
                })?)
            }
            "path" => path = Some(PathBuf::from(value.trim())),
            other => return Err(CliError::Config(format!("unknown mirror field {other:?}"))),
        }
    }
    let bad = |e: vacfluct::Error| CliError::Config(e.to_string());
    match kind.as_deref() {
        Some("perfect") => Ok(MirrorModel::Perfect),
        Some("transparent") => Ok(MirrorModel::Transparent),
        Some("single-pole") => {
            let w = omega.ok_or_else(|| CliError::Config("single-pole mirror needs omega=".into()))?;
            MirrorModel::single_pole(w).map_err(bad)
        }
        Some("tabulated") => {
            let p = path.ok_or_else(|| CliError::Config("tabulated mirror needs path=".into()))?;
            Ok(MirrorModel::Tabulated(TabulatedMirror::from_csv_path(&p).map_err(bad)?))
        }
        Some(other) => Err(CliError::Config(format!("unknown mirror kind {other:?}"))),
        None => Err(CliError::Config(format!("mirror spec {s:?} has no kind="))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = parse_grid("0, 50, 4097, lin").unwrap();
        assert_eq!((g.min, g.max, g.points, g.log), (0.0, 50.0, 4097, false));
        assert!(parse_grid("1,0,10,lin").is_err());
        assert!(parse_grid("0,1,10").is_err());
        assert!(parse_grid("0,1,10,cubic").is_err());
    }

    #[test]
    fn mirror_parsing() {
        assert_eq!(parse_mirror("kind=perfect").unwrap(), MirrorModel::Perfect);
        assert_eq!(
            parse_mirror("kind=single-pole,omega=2.5").unwrap(),
            MirrorModel::SinglePole { omega: 2.5 }
        );
        assert!(parse_mirror("kind=single-pole").is_err());
        assert!(parse_mirror("kind=single-pole,omega=-1").is_err());
        assert!(parse_mirror("omega=1").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file: FileConfig = toml::from_str("hbar = 2.0\ntol = 1e-6\nmirror = \"kind=perfect\"\nq = [1.0, 2.0]").unwrap();
        let flags = FlagValues {
            tol: Some(1e-9),
            mirror: vec!["kind=transparent".into()],
            ..Default::default()
        };
        let c = RunConfig::resolve(flags, file).unwrap();
        assert_eq!(c.hbar.get(), 2.0);
        assert_eq!(c.tol, Some(1e-9));
        assert_eq!(c.mirrors, vec![MirrorModel::Transparent]);
        assert_eq!(c.q, vec![1.0, 2.0]);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<FileConfig>("hbar = 1\nspeed = 3").is_err());
    }
}
