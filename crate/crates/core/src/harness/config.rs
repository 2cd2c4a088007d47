use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Study {
    ConvergenceBetaGe1,
    ConvergenceBetaHalf,
    AcousticDecay,
    RageDecay,
}

impl Study {
    pub const ALL: [Study; 4] = [
        Study::ConvergenceBetaGe1,
        Study::ConvergenceBetaHalf,
        Study::AcousticDecay,
        Study::RageDecay,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Study::ConvergenceBetaGe1 => "convergence_beta_ge1",
            Study::ConvergenceBetaHalf => "convergence_beta_half",
            Study::AcousticDecay => "acoustic_decay",
            Study::RageDecay => "rage_decay",
        }
    }
}

impl FromStr for Study {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Study::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown study `{s}`"))
    }
}

impl fmt::Display for Study {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IcKind {
    Well,
    Ill,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DtPolicy {
    /// Use `dt` as given.
    Fixed,
    /// `min(dt, cfl * dx / max|u_0|)`.
    Cfl,
}

/// What to do when `T` exceeds the acoustic recurrence time of a row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecurrencePolicy {
    /// Keep the row and report the violation in its `recurrent` column.
    Flag,
    /// Drop violating rows from the sweep (reported in the notes).
    Trim,
    /// Mark violating rows invalid.
    Reject,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiKind {
    One,
    Bump,
}

/// Flat study configuration. Config-file keys are the field names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub study: Study,
    pub l_h: f64,
    pub n_h: usize,
    pub n_v: usize,
    pub dealias: f64,
    pub eps_list: Vec<f64>,
    pub beta: f64,
    pub mu: f64,
    /// Viscosity of the limit solvers.
    pub nu: f64,
    pub t_final: f64,
    pub dt: f64,
    pub dt_policy: DtPolicy,
    pub cfl: f64,
    /// Minimum number of time samples for space-time norms.
    pub n_samples: usize,
    pub nonlinear: bool,
    pub ic_kind: IcKind,
    pub ic_seed: u64,
    pub ic_spectral_slope: f64,
    /// Largest horizontal mode index `|n1|, |n2|` of the initial data.
    pub ic_band: usize,
    /// Largest vertical mode index of the initial data.
    pub ic_band_v: usize,
    /// Smallest vertical mode index of the initial data.
    pub ic_k_min: usize,
    /// L2 norm of each part of the initial data.
    pub ic_amplitude: f64,
    /// Gaussian envelope width as a fraction of `L_h`; 0 disables it.
    pub ic_envelope: f64,
    /// Side of the observation box `K` as a fraction of `L_h`.
    pub k_fraction: f64,
    /// Cutoff `M` of the truncation `H_M`.
    pub rage_m: f64,
    pub chi: ChiKind,
    /// Bump radius as a fraction of `L_h`.
    pub chi_radius: f64,
    pub qg_jacobian_sign: f64,
    pub recurrence: RecurrencePolicy,
    pub energy_tol: f64,
    pub output_dir: PathBuf,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            study: Study::AcousticDecay,
            l_h: 8.0 * std::f64::consts::PI,
            n_h: 64,
            n_v: 16,
            dealias: 2.0 / 3.0,
            eps_list: vec![0.2, 0.1, 0.05, 0.025],
            beta: 1.0,
            mu: 1.0,
            nu: 1.0,
            t_final: 0.5,
            dt: 1e-3,
            dt_policy: DtPolicy::Fixed,
            cfl: 0.5,
            n_samples: 50,
            nonlinear: true,
            ic_kind: IcKind::Well,
            ic_seed: 1,
            ic_spectral_slope: 2.0,
            ic_band: 8,
            ic_band_v: 2,
            ic_k_min: 0,
            ic_amplitude: 1.0,
            ic_envelope: 0.0,
            k_fraction: 0.25,
            rage_m: 8.0,
            chi: ChiKind::Bump,
            chi_radius: 0.25,
            qg_jacobian_sign: -1.0,
            recurrence: RecurrencePolicy::Flag,
            energy_tol: 1e-8,
            output_dir: PathBuf::from("out"),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| Error::config(key, format!("cannot parse `{value}`: {e}")))
}

fn parse_enum<T: for<'de> Deserialize<'de>>(key: &str, value: &str) -> Result<T> {
    serde_json::from_value(serde_json::Value::String(value.to_string()))
        .map_err(|_| Error::config(key, format!("unknown value `{value}`")))
}

fn enum_name<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        _ => String::new(),
    }
}

impl StudyConfig {
    pub const KEYS: [&'static str; 32] = [
        "study",
        "l_h",
        "n_h",
        "n_v",
        "dealias",
        "eps_list",
        "beta",
        "mu",
        "nu",
        "t_final",
        "dt",
        "dt_policy",
        "cfl",
        "n_samples",
        "nonlinear",
        "ic_kind",
        "ic_seed",
        "ic_spectral_slope",
        "ic_band",
        "ic_band_v",
        "ic_k_min",
        "ic_amplitude",
        "ic_envelope",
        "k_fraction",
        "rage_m",
        "chi",
        "chi_radius",
        "qg_jacobian_sign",
        "recurrence",
        "energy_tol",
        "output_dir",
        "eps",
    ];

    /// Sets one key. `eps` is accepted as a short form of `eps_list`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "study" => self.study = v.parse().map_err(|e: String| Error::config(key, e))?,
            "l_h" => self.l_h = parse(key, v)?,
            "n_h" => self.n_h = parse(key, v)?,
            "n_v" => self.n_v = parse(key, v)?,
            "dealias" => self.dealias = parse(key, v)?,
            "eps_list" | "eps" => {
                self.eps_list = v
                    .split(',')
                    .map(|x| parse::<f64>("eps_list", x.trim()))
                    .collect::<Result<_>>()?
            }
            "beta" => self.beta = parse(key, v)?,
            "mu" => self.mu = parse(key, v)?,
            "nu" => self.nu = parse(key, v)?,
            "t_final" => self.t_final = parse(key, v)?,
            "dt" => self.dt = parse(key, v)?,
            "dt_policy" => self.dt_policy = parse_enum(key, v)?,
            "cfl" => self.cfl = parse(key, v)?,
            "n_samples" => self.n_samples = parse(key, v)?,
            "nonlinear" => self.nonlinear = parse(key, v)?,
            "ic_kind" => self.ic_kind = parse_enum(key, v)?,
            "ic_seed" => self.ic_seed = parse(key, v)?,
            "ic_spectral_slope" => self.ic_spectral_slope = parse(key, v)?,
            "ic_band" => self.ic_band = parse(key, v)?,
            "ic_band_v" => self.ic_band_v = parse(key, v)?,
            "ic_k_min" => self.ic_k_min = parse(key, v)?,
            "ic_amplitude" => self.ic_amplitude = parse(key, v)?,
            "ic_envelope" => self.ic_envelope = parse(key, v)?,
            "k_fraction" => self.k_fraction = parse(key, v)?,
            "rage_m" => self.rage_m = parse(key, v)?,
            "chi" => self.chi = parse_enum(key, v)?,
            "chi_radius" => self.chi_radius = parse(key, v)?,
            "qg_jacobian_sign" => self.qg_jacobian_sign = parse(key, v)?,
            "recurrence" => self.recurrence = parse_enum(key, v)?,
            "energy_tol" => self.energy_tol = parse(key, v)?,
            "output_dir" => self.output_dir = PathBuf::from(v),
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`. `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}", n + 1), "expected `key = value`"))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = Self::default();
        c.apply_text(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |k: &str, m: String| Err(Error::config(k, m));
        if self.eps_list.is_empty() {
            return bad("eps_list", "empty list".into());
        }
        if let Some(e) = self.eps_list.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return bad("eps_list", format!("{e} is not a positive number"));
        }
        if self.eps_list.windows(2).any(|w| w[1] >= w[0]) {
            return bad("eps_list", "values must be strictly decreasing".into());
        }
        if !(self.k_fraction > 0.0 && self.k_fraction <= 0.5) {
            return bad("k_fraction", format!("{} outside (0, 1/2]", self.k_fraction));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return bad("beta", format!("{} must be positive", self.beta));
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return bad("mu", format!("{} must be non-negative", self.mu));
        }
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return bad("nu", format!("{} must be non-negative", self.nu));
        }
        if !(self.l_h.is_finite() && self.l_h > 0.0) {
            return bad("l_h", format!("{} must be positive", self.l_h));
        }
        if self.n_h < 8 || !self.n_h.is_multiple_of(2) {
            return bad("n_h", format!("{} must be even and >= 8", self.n_h));
        }
        if self.n_v < 4 {
            return bad("n_v", format!("{} must be >= 4", self.n_v));
        }
        if !(self.dealias > 0.0 && self.dealias <= 1.0) {
            return bad("dealias", format!("{} outside (0, 1]", self.dealias));
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return bad("t_final", format!("{} must be positive", self.t_final));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad("dt", format!("{} must be positive", self.dt));
        }
        if !(self.cfl > 0.0) {
            return bad("cfl", format!("{} must be positive", self.cfl));
        }
        if self.n_samples < 2 {
            return bad("n_samples", "need at least 2 samples".into());
        }
        if !(self.ic_amplitude.is_finite() && self.ic_amplitude > 0.0) {
            return bad("ic_amplitude", format!("{} must be positive", self.ic_amplitude));
        }
        if !(self.ic_envelope >= 0.0) {
            return bad("ic_envelope", format!("{} must be non-negative", self.ic_envelope));
        }
        if self.ic_k_min > self.ic_band_v {
            return bad("ic_k_min", format!("{} exceeds ic_band_v", self.ic_k_min));
        }
        if !(self.chi_radius > 0.0 && self.chi_radius <= 0.5) {
            return bad("chi_radius", format!("{} outside (0, 1/2]", self.chi_radius));
        }
        if self.qg_jacobian_sign != 1.0 && self.qg_jacobian_sign != -1.0 {
            return bad(
                "qg_jacobian_sign",
                format!("{} must be +1 or -1", self.qg_jacobian_sign),
            );
        }
        if !(self.rage_m > 0.0) {
            return bad("rage_m", format!("{} must be positive", self.rage_m));
        }
        Ok(())
    }

    /// Every key with its current value, one `key = value` per line, in a
    /// form accepted by [`StudyConfig::from_text`].
    pub fn to_text(&self) -> String {
        let eps: Vec<String> = self.eps_list.iter().map(|e| format!("{e}")).collect();
        let rows: Vec<(&str, String)> = vec![
            ("study", self.study.to_string()),
            ("l_h", format!("{}", self.l_h)),
            ("n_h", self.n_h.to_string()),
            ("n_v", self.n_v.to_string()),
            ("dealias", format!("{}", self.dealias)),
            ("eps_list", eps.join(",")),
            ("beta", format!("{}", self.beta)),
            ("mu", format!("{}", self.mu)),
            ("nu", format!("{}", self.nu)),
            ("t_final", format!("{}", self.t_final)),
            ("dt", format!("{}", self.dt)),
            ("dt_policy", enum_name(&self.dt_policy)),
            ("cfl", format!("{}", self.cfl)),
            ("n_samples", self.n_samples.to_string()),
            ("nonlinear", self.nonlinear.to_string()),
            ("ic_kind", enum_name(&self.ic_kind)),
            ("ic_seed", self.ic_seed.to_string()),
            ("ic_spectral_slope", format!("{}", self.ic_spectral_slope)),
            ("ic_band", self.ic_band.to_string()),
            ("ic_band_v", self.ic_band_v.to_string()),
            ("ic_k_min", self.ic_k_min.to_string()),
            ("ic_amplitude", format!("{}", self.ic_amplitude)),
            ("ic_envelope", format!("{}", self.ic_envelope)),
            ("k_fraction", format!("{}", self.k_fraction)),
            ("rage_m", format!("{}", self.rage_m)),
            ("chi", enum_name(&self.chi)),
            ("chi_radius", format!("{}", self.chi_radius)),
            ("qg_jacobian_sign", format!("{}", self.qg_jacobian_sign)),
            ("recurrence", enum_name(&self.recurrence)),
            ("energy_tol", format!("{}", self.energy_tol)),
            ("output_dir", self.output_dir.display().to_string()),
        ];
        rows.into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let c = StudyConfig {
            study: Study::RageDecay,
            eps_list: vec![0.3, 0.15],
            ic_kind: IcKind::Ill,
            chi: ChiKind::One,
            ..StudyConfig::default()
        };
        let back = StudyConfig::from_text(&c.to_text()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn comments_and_alias() {
        let c = StudyConfig::from_text("# sweep\nstudy = rage_decay\neps = 0.4, 0.2 # two\n\nbeta=0.5\n").unwrap();
        assert_eq!(c.study, Study::RageDecay);
        assert_eq!(c.eps_list, vec![0.4, 0.2]);
        assert_eq!(c.beta, 0.5);
    }

    fn key_of(e: Error) -> String {
        match e {
            Error::Config { key, .. } => key,
            other => panic!("{other}"),
        }
    }

    #[test]
    fn errors_name_the_key() {
        assert_eq!(
            key_of(StudyConfig::from_text("eps_list = 0.1,abc").unwrap_err()),
            "eps_list"
        );
        assert_eq!(
            key_of(StudyConfig::from_text("eps_list = 0.1,0.2").unwrap_err()),
            "eps_list"
        );
        assert_eq!(
            key_of(StudyConfig::from_text("eps_list = 0.1,0.1").unwrap_err()),
            "eps_list"
        );
        assert_eq!(
            key_of(StudyConfig::from_text("k_fraction = 0.6").unwrap_err()),
            "k_fraction"
        );
        assert_eq!(
            key_of(StudyConfig::from_text("k_fraction = 0").unwrap_err()),
            "k_fraction"
        );
        assert_eq!(key_of(StudyConfig::from_text("study = nope").unwrap_err()), "study");
        assert_eq!(
            key_of(StudyConfig::from_text("ic_kind = medium").unwrap_err()),
            "ic_kind"
        );
        assert_eq!(key_of(StudyConfig::from_text("bogus = 1").unwrap_err()), "bogus");
        assert!(StudyConfig::from_text("k_fraction = 0.5").is_ok());
    }

    #[test]
    fn every_key_is_settable() {
        let c = StudyConfig::default();
        let text = c.to_text();
        let keys: Vec<&str> = text.lines().map(|l| l.split(" = ").next().unwrap()).collect();
        assert_eq!(keys.len(), StudyConfig::KEYS.len() - 1);
        assert!(keys.iter().all(|k| StudyConfig::KEYS.contains(k)));
    }
}
