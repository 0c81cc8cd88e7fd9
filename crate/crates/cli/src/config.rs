//! Flat `key = value` configuration with `#` comments.
//!
//! ```text
//! m = 2
//! r = 0.1
//! kinetics.name = fisher-kpp
//! kinetics.params = p=1,q=1
//! snapshot_times = 0, 5, 10
//! ```
//!
//! Later assignments win; `--set key=value` overrides are applied after the file.

use std::path::Path;

use sharpfront::scheme::{InitialData, DEFAULT_CFL, DEFAULT_DX, DEFAULT_T_END, DEFAULT_X_MAX, DEFAULT_X_MIN};
use sharpfront::shooting::{DEFAULT_PHI0_REL, DEFAULT_RTOL, DEFAULT_SPEED_TOL, DEFAULT_XI_MAX};
use sharpfront::Kinetics;

use crate::error::{usage, CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Sharp,
    Classical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub m: f64,
    pub r: f64,
    pub r_list: Vec<f64>,
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub cfl: f64,
    pub dt: Option<f64>,
    pub t_end: f64,
    pub scheme: Scheme,
    /// `None` means `0, T/2, T`.
    pub snapshot_times: Option<Vec<f64>>,
    pub initial: InitialData,
    pub tol: f64,
    pub xi_max: f64,
    pub phi0: f64,
    pub rtol: f64,
    pub window_start: Option<f64>,
    pub window_end: Option<f64>,
    pub kinetics_name: String,
    pub kinetics_params: Vec<(String, f64)>,
    pub compare_t: f64,
    pub perturb_amplitude: f64,
    pub perturb_bound: f64,
    pub sweep_max_diff: f64,
    pub validate_u0: f64,
    pub validate_t: f64,
    pub validate_dt: f64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            m: 2.0,
            r: 0.0,
            r_list: vec![0.0, 0.1, 0.2, 0.3],
            x_min: DEFAULT_X_MIN,
            x_max: DEFAULT_X_MAX,
            dx: DEFAULT_DX,
            cfl: DEFAULT_CFL,
            dt: None,
            t_end: DEFAULT_T_END,
            scheme: Scheme::Sharp,
            snapshot_times: None,
            initial: InitialData::SharpWave { shift: 0.0 },
            tol: DEFAULT_SPEED_TOL,
            xi_max: DEFAULT_XI_MAX,
            phi0: DEFAULT_PHI0_REL,
            rtol: DEFAULT_RTOL,
            window_start: None,
            window_end: None,
            kinetics_name: "fisher-kpp".into(),
            kinetics_params: vec![("p".into(), 1.0), ("q".into(), 1.0)],
            compare_t: 5.0,
            perturb_amplitude: 0.2,
            perturb_bound: 1e-2,
            sweep_max_diff: 1e-2,
            validate_u0: 0.5,
            validate_t: 20.0,
            validate_dt: 1e-3,
        }
    }
}

fn float(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| usage(format!("{key}: expected a number, got {v:?}")))?;
    if !x.is_finite() {
        return Err(usage(format!("{key}: value must be finite")));
    }
    Ok(x)
}

fn list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| float(key, s))
        .collect()
}

fn pairs(key: &str, v: &str) -> Result<Vec<(String, f64)>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|kv| {
            let (k, x) = kv
                .split_once('=')
                .ok_or_else(|| usage(format!("{key}: expected name=value, got {kv:?}")))?;
            Ok((k.trim().to_string(), float(key, x.trim())?))
        })
        .collect()
}

impl Config {
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut cfg = Config::default();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.into(),
                source,
            })?;
            cfg.apply_text(&text)?;
        }
        for o in overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| usage(format!("--set expects key=value, got {o:?}")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        cfg.check()?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("line {}: expected `key = value`", n + 1)))?;
            self.set(k.trim(), v.trim())
                .map_err(|e| usage(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "m" => self.m = float(key, v)?,
            "r" => self.r = float(key, v)?,
            "r_list" => self.r_list = list(key, v)?,
            "x_min" => self.x_min = float(key, v)?,
            "x_max" => self.x_max = float(key, v)?,
            "dx" => self.dx = float(key, v)?,
            "cfl" => self.cfl = float(key, v)?,
            "dt" => self.dt = Some(float(key, v)?),
            "T" => self.t_end = float(key, v)?,
            "scheme" => {
                self.scheme = match v {
                    "sharp" => Scheme::Sharp,
                    "classical" => Scheme::Classical,
                    _ => return Err(usage(format!("scheme: expected sharp or classical, got {v:?}"))),
                }
            }
            "snapshot_times" => self.snapshot_times = Some(list(key, v)?),
            "initial" => {
                self.initial = match v {
                    "sharp-wave" => InitialData::SharpWave { shift: 0.0 },
                    "perturbed" => InitialData::Perturbed {
                        amplitude: self.perturb_amplitude,
                    },
                    _ => return Err(usage(format!("initial: expected sharp-wave or perturbed, got {v:?}"))),
                }
            }
            "initial.shift" => {
                let shift = float(key, v)?;
                self.initial = InitialData::SharpWave { shift };
            }
            "tol" => self.tol = float(key, v)?,
            "xi_max" => self.xi_max = float(key, v)?,
            "phi0" => self.phi0 = float(key, v)?,
            "rtol" => self.rtol = float(key, v)?,
            "window_start" => self.window_start = Some(float(key, v)?),
            "window_end" => self.window_end = Some(float(key, v)?),
            "kinetics.name" => self.kinetics_name = v.to_string(),
            "kinetics.params" => self.kinetics_params = pairs(key, v)?,
            "compare.T" => self.compare_t = float(key, v)?,
            "perturb.amplitude" => {
                self.perturb_amplitude = float(key, v)?;
                if let InitialData::Perturbed { amplitude } = &mut self.initial {
                    *amplitude = self.perturb_amplitude;
                }
            }
            "perturb.bound" => self.perturb_bound = float(key, v)?,
            "sweep.max_diff" => self.sweep_max_diff = float(key, v)?,
            "validate.u0" => self.validate_u0 = float(key, v)?,
            "validate.T" => self.validate_t = float(key, v)?,
            "validate.dt" => self.validate_dt = float(key, v)?,
            _ => return Err(usage(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    fn check(&self) -> Result<()> {
        let positive = [
            ("dx", self.dx),
            ("tol", self.tol),
            ("xi_max", self.xi_max),
            ("phi0", self.phi0),
            ("rtol", self.rtol),
        ];
        for (k, v) in positive {
            if v <= 0.0 {
                return Err(usage(format!("{k} must be positive")));
            }
        }
        if self.m <= 1.0 {
            return Err(usage("m must exceed 1"));
        }
        if self.r < 0.0 || self.r_list.iter().any(|&r| r < 0.0) {
            return Err(usage("delays must be non-negative"));
        }
        if self.t_end < 0.0 {
            return Err(usage("T must be non-negative"));
        }
        self.kinetics()?;
        Ok(())
    }

    pub fn kinetics(&self) -> Result<Kinetics> {
        let params: Vec<(&str, f64)> = self.kinetics_params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        Ok(Kinetics::from_params(&self.kinetics_name, &params)?)
    }

    pub fn snapshots(&self) -> Vec<f64> {
        self.snapshot_times
            .clone()
            .unwrap_or_else(|| vec![0.0, 0.5 * self.t_end, self.t_end])
    }

    /// Front-speed fit window, `[T/2, T]` unless configured.
    pub fn window(&self, t_end: f64) -> (f64, f64) {
        (
            self.window_start.unwrap_or(0.5 * t_end),
            self.window_end.unwrap_or(t_end),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_text() {
        let mut c = Config::default();
        c.apply_text("# comment\nm = 2\nr = 0.1  # trailing\n\nsnapshot_times = 0, 2.5\nkinetics.params = p=2, q=0.5\nscheme = classical\n")
            .unwrap();
        assert_eq!(c.r, 0.1);
        assert_eq!(c.snapshot_times, Some(vec![0.0, 2.5]));
        assert_eq!(c.snapshots(), vec![0.0, 2.5]);
        assert_eq!(c.kinetics_params, vec![("p".to_string(), 2.0), ("q".to_string(), 0.5)]);
        assert_eq!(c.scheme, Scheme::Classical);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        let mut c = Config::default();
        assert!(matches!(c.set("dy", "1"), Err(CliError::Usage(_))));
        assert!(c.set("dx", "abc").is_err());
        assert!(c.set("dx", "inf").is_err());
        assert!(c.apply_text("just words").is_err());
        assert!(c.set("scheme", "fancy").is_err());
    }

    #[test]
    fn overrides_apply_after_file() {
        let c = Config::load(None, &["r=0.2".into(), "T = 3".into()]).unwrap();
        assert_eq!((c.r, c.t_end), (0.2, 3.0));
        assert!(Config::load(None, &["r".into()]).is_err());
        assert!(Config::load(None, &["kinetics.name=logistic".into()]).is_err());
    }

    #[test]
    fn perturbed_amplitude_order_independent() {
        let mut a = Config::default();
        a.apply_text("initial = perturbed\nperturb.amplitude = 0.1").unwrap();
        let mut b = Config::default();
        b.apply_text("perturb.amplitude = 0.1\ninitial = perturbed").unwrap();
        assert_eq!(a.initial, b.initial);
    }

    #[test]
    fn default_window_is_second_half() {
        assert_eq!(Config::default().window(10.0), (5.0, 10.0));
    }
}
