//! Run configuration: an optional JSON file overlaid by command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use lame_navier::io::load_polyline;
use lame_navier::lame::LameParams;
use lame_navier::{ClosedFormField, Complex64, Curve};
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SEGMENTS: usize = 1024;
pub const DEFAULT_GRID: (usize, usize) = (21, 21);

/// Every field is optional; flags override the file field by field, and
/// tolerances key by key.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub nu: Option<f64>,
    pub d: Option<f64>,
    pub depth: Option<u32>,
    pub segments: Option<usize>,
    /// `"NxM"`.
    pub grid: Option<String>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub tol: BTreeMap<String, f64>,
    pub koch: Option<u32>,
    pub circle: Option<f64>,
    pub polyline: Option<PathBuf>,
    /// Koch snowflake triangle side.
    pub scale: Option<f64>,
    pub jet: Option<PathBuf>,
    pub field: Option<String>,
    pub density: Option<String>,
    pub method: Option<String>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    /// `self` with every field set in `flags` replaced.
    pub fn overlay(mut self, flags: RunConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $(if flags.$f.is_some() { self.$f = flags.$f; })* };
        }
        take!(
            lambda, mu, nu, d, depth, segments, grid, out, seed, koch, circle, polyline, scale, jet, field, density,
            method
        );
        self.tol.extend(flags.tol);
        self
    }

    /// Checks every physical parameter that is present. Runs before any
    /// computation.
    pub fn validate(&self) -> Result<(), CliError> {
        self.params()?;
        if let Some(nu) = self.nu {
            if !(nu > 0.0 && nu < 1.0) {
                return Err(CliError::Input(format!("nu must lie in (0, 1), got {nu}")));
            }
        }
        if let Some(d) = self.d {
            if !(d > 1.0 && d < 2.0) {
                return Err(CliError::Input(format!("d must lie in (1, 2), got {d}")));
            }
        }
        if let Some(g) = &self.grid {
            parse_grid(g).map_err(CliError::Input)?;
        }
        for (name, v) in &self.tol {
            if !(v.is_finite() && *v >= 0.0) {
                return Err(CliError::Input(format!("tolerance {name} must be a nonnegative number, got {v}")));
            }
        }
        let curves = [self.koch.is_some(), self.circle.is_some(), self.polyline.is_some()];
        if curves.iter().filter(|&&b| b).count() > 1 {
            return Err(CliError::Input("give at most one of koch, circle, polyline".into()));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<LameParams, CliError> {
        Ok(LameParams::new(self.lambda.unwrap_or(1.0), self.mu.unwrap_or(1.0))?)
    }

    pub fn nu(&self) -> f64 {
        self.nu.unwrap_or(0.9)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn grid(&self) -> (usize, usize) {
        self.grid.as_deref().and_then(|g| parse_grid(g).ok()).unwrap_or(DEFAULT_GRID)
    }

    pub fn tol(&self, name: &str, default: f64) -> f64 {
        self.tol.get(name).copied().unwrap_or(default)
    }

    /// The curve named by `koch`, `circle` or `polyline`; the unit circle by default.
    pub fn curve(&self) -> Result<Curve, CliError> {
        let segments = self.segments.unwrap_or(DEFAULT_SEGMENTS);
        let origin = Complex64::new(0.0, 0.0);
        Ok(match (self.koch, self.circle, &self.polyline) {
            (Some(g), _, _) => Curve::koch_snowflake(g, self.scale.unwrap_or(1.0))?,
            (_, Some(r), _) => Curve::circle(origin, r, segments)?,
            (_, _, Some(path)) => load_polyline(path)?,
            _ => Curve::circle(origin, 1.0, segments)?,
        })
    }

    pub fn curve_label(&self) -> String {
        match (self.koch, self.circle, &self.polyline) {
            (Some(g), _, _) => format!("koch:{g}:{}", self.scale.unwrap_or(1.0)),
            (_, Some(r), _) => format!("circle:{r}:{}", self.segments.unwrap_or(DEFAULT_SEGMENTS)),
            (_, _, Some(p)) => format!("polyline:{}", p.display()),
            _ => format!("circle:1:{}", self.segments.unwrap_or(DEFAULT_SEGMENTS)),
        }
    }
}

/// `"NxM"` with both counts positive.
pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("grid must look like NxM, got {s:?}"))?;
    let n: usize = a.trim().parse().map_err(|_| format!("bad grid count {a:?}"))?;
    let m: usize = b.trim().parse().map_err(|_| format!("bad grid count {b:?}"))?;
    if n == 0 || m == 0 {
        return Err(format!("grid counts must be positive, got {s:?}"));
    }
    Ok((n, m))
}

/// `"NAME=VALUE"`.
pub fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("tolerance must look like NAME=VALUE, got {s:?}"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("bad tolerance value {v:?}"))?;
    Ok((k.trim().to_owned(), v))
}

/// Closed-form fields by name: `const:RE[,IM]`, `monomial:P,Q` (for
/// `z^P conj(z)^Q`), `z`, `z2`, `exp`.
pub fn parse_field(s: &str) -> Result<ClosedFormField, CliError> {
    let bad = || CliError::Input(format!("unknown field {s:?}; use const:RE[,IM], monomial:P,Q, z, z2 or exp"));
    let (head, args) = s.split_once(':').unwrap_or((s, ""));
    let nums = |args: &str| -> Result<Vec<f64>, CliError> {
        args.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| bad())).collect()
    };
    Ok(match head.trim() {
        "const" => match nums(args)?.as_slice() {
            [re] => ClosedFormField::constant(Complex64::new(*re, 0.0)),
            [re, im] => ClosedFormField::constant(Complex64::new(*re, *im)),
            _ => return Err(bad()),
        },
        "monomial" => match nums(args)?.as_slice() {
            [p, q] if *p >= 0.0 && *q >= 0.0 && p.fract() == 0.0 && q.fract() == 0.0 => {
                ClosedFormField::monomial(*p as u32, *q as u32)
            }
            _ => return Err(bad()),
        },
        "z" if args.is_empty() => ClosedFormField::monomial(1, 0),
        "z2" if args.is_empty() => ClosedFormField::monomial(2, 0),
        "exp" if args.is_empty() => ClosedFormField::exp(),
        _ => return Err(bad()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_the_file() {
        let file: RunConfig =
            serde_json::from_str(r#"{"lambda": 2.0, "mu": 3.0, "tol": {"a": 1.0, "b": 2.0}}"#).unwrap();
        let flags = RunConfig { mu: Some(0.5), tol: [("b".to_owned(), 5.0)].into(), ..RunConfig::default() };
        let cfg = file.overlay(flags);
        assert_eq!((cfg.lambda, cfg.mu), (Some(2.0), Some(0.5)));
        assert_eq!((cfg.tol("a", 0.0), cfg.tol("b", 0.0), cfg.tol("c", 9.0)), (1.0, 5.0, 9.0));
    }

    #[test]
    fn unknown_keys_and_bad_values_are_refused() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"lamda": 1.0}"#).is_err());
        let cfg = RunConfig { lambda: Some(-5.0), ..RunConfig::default() };
        assert!(cfg.validate().is_err());
        let cfg = RunConfig { koch: Some(2), circle: Some(1.0), ..RunConfig::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn small_parsers() {
        assert_eq!(parse_grid("30x20"), Ok((30, 20)));
        assert!(parse_grid("0x3").is_err() && parse_grid("9").is_err());
        assert_eq!(parse_tol("jump_f0=1e-3"), Ok(("jump_f0".to_owned(), 1e-3)));
        let z = Complex64::new(0.3, -0.2);
        assert_eq!(parse_field("monomial:2,1").unwrap().eval(z), z * z * z.conj());
        assert_eq!(parse_field("const:1,2").unwrap().eval(z), Complex64::new(1.0, 2.0));
        assert!(parse_field("sin").is_err() && parse_field("monomial:1.5,0").is_err());
    }
}
