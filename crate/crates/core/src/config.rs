//! Run configuration: an INI document with `[molecule]`, `[photons]`,
//! `[scan]` and `[numerics]` sections.
//!
//! ```ini
//! [molecule]
//! site_energies = 2.25, 2.10, 2.10
//! hopping = 0.03
//! rate_2_1 = 0.005
//!
//! [photons]
//! kind = entangled
//! ```
//!
//! Only `site_energies` and `hopping` are required. Relaxation rates are
//! written `rate_<from>_<to>` with eigenstates counted from 0 in ascending
//! energy; when no rate key is given the reference rates are used.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use ini::{Ini, ParseOption};

use crate::exciton::ExcitonModel;
use crate::signal::{EnginePath, ExchangeVariant, PolarizabilityMatrix};
use crate::source::{PhotonSourceSpec, SourceKind};
use crate::{CMatrix, Error, Result, C64};

/// What the scan produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Spectrum,
    Homscan,
    Dynamics,
    Compare,
    Validate,
}

impl Mode {
    pub const ALL: [Mode; 5] = [
        Mode::Spectrum,
        Mode::Homscan,
        Mode::Dynamics,
        Mode::Compare,
        Mode::Validate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Spectrum => "spectrum",
            Mode::Homscan => "homscan",
            Mode::Dynamics => "dynamics",
            Mode::Compare => "compare",
            Mode::Validate => "validate",
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown mode '{s}'"))
    }
}

/// Initial excited-state preparation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    /// Pure state localized on one site.
    Site(usize),
    /// Population in one eigenstate.
    Exciton(usize),
}

impl std::fmt::Display for InitialState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InitialState::Site(k) => write!(f, "site:{k}"),
            InitialState::Exciton(k) => write!(f, "exciton:{k}"),
        }
    }
}

impl FromStr for InitialState {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (kind, index) = s
            .split_once(':')
            .ok_or_else(|| format!("expected site:<n> or exciton:<n>, got '{s}'"))?;
        let index: usize = index
            .trim()
            .parse()
            .map_err(|_| format!("bad index in '{s}'"))?;
        match kind.trim() {
            "site" => Ok(InitialState::Site(index)),
            "exciton" => Ok(InitialState::Exciton(index)),
            other => Err(format!("unknown initial state kind '{other}'")),
        }
    }
}

/// Uniform axis `min..=max` with `count` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count).map(|k| self.min + step * k as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoleculeConfig {
    pub site_energies: Vec<f64>,
    pub hopping: f64,
    pub rates: BTreeMap<(usize, usize), f64>,
    pub pure_dephasing: f64,
    pub initial_state: InitialState,
    /// Real symmetric Raman polarizability; `None` means every element is 1.
    pub polarizability: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhotonsConfig {
    pub kind: SourceKind,
    pub omega_plus: f64,
    pub sigma0: f64,
    pub tau0: f64,
    /// `None` derives the arm bandwidth from `tau0`.
    pub sigma_tilde0: Option<f64>,
    pub phase_matching_phase: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub mode: Mode,
    pub omega: Axis,
    pub time: Axis,
    /// Fixed optical delay of spectrum and compare scans.
    pub delta_t: f64,
    /// Raman shift of the delay scan.
    pub omega_minus: f64,
    /// Signal-arm arrival time of the delay scan.
    pub hom_time: f64,
    pub delay: Axis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericsConfig {
    pub dt: f64,
    /// `None` sizes the timeline from the scan.
    pub horizon: Option<f64>,
    pub step_divisor: f64,
    pub tail: f64,
    pub tolerance: f64,
    pub engine: EnginePath,
    /// 0 uses every available core.
    pub threads: usize,
    pub causal: bool,
    pub exchange: ExchangeVariant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub molecule: MoleculeConfig,
    pub photons: PhotonsConfig,
    pub scan: ScanConfig,
    pub numerics: NumericsConfig,
}

fn rate_key(key: &str) -> Option<(usize, usize)> {
    let rest = key.strip_prefix("rate_")?;
    let (a, b) = rest.split_once('_')?;
    Some((a.parse().ok()?, b.parse().ok()?))
}

/// Key/value pairs of one section, consumed as they are read so that
/// leftovers can be reported.
struct Section {
    name: &'static str,
    values: BTreeMap<String, String>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<String> {
        self.values.remove(key)
    }

    fn parsed<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.take(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| Error::config(self.name, key, format!("cannot parse '{raw}': {e}"))),
        }
    }

    fn number(&mut self, key: &str, default: f64) -> Result<f64> {
        let v = self.parsed::<f64>(key)?.unwrap_or(default);
        if !v.is_finite() {
            return Err(Error::config(self.name, key, "must be finite"));
        }
        Ok(v)
    }

    fn positive(&mut self, key: &str, default: f64) -> Result<f64> {
        let v = self.number(key, default)?;
        if v <= 0.0 {
            return Err(Error::config(self.name, key, format!("{v} is out of range (must be > 0)")));
        }
        Ok(v)
    }

    fn non_negative(&mut self, key: &str, default: f64) -> Result<f64> {
        let v = self.number(key, default)?;
        if v < 0.0 {
            return Err(Error::config(self.name, key, format!("{v} is out of range (must be >= 0)")));
        }
        Ok(v)
    }

    fn optional_positive(&mut self, key: &str) -> Result<Option<f64>> {
        match self.values.get(key).map(String::as_str) {
            None | Some("auto") => {
                self.take(key);
                Ok(None)
            }
            Some(_) => self.positive(key, f64::NAN).map(Some),
        }
    }

    fn boolean(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.take(key).as_deref() {
            None => Ok(default),
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            Some(other) => Err(Error::config(
                self.name,
                key,
                format!("expected true or false, got '{other}'"),
            )),
        }
    }

    fn axis(&mut self, prefix: &str, default: Axis) -> Result<Axis> {
        let min = self.number(&format!("{prefix}_min"), default.min)?;
        let max = self.number(&format!("{prefix}_max"), default.max)?;
        let count_key = format!("{prefix}_count");
        let count = self.parsed::<usize>(&count_key)?.unwrap_or(default.count);
        if count < 1 {
            return Err(Error::config(self.name, &count_key, "must be at least 1"));
        }
        if min > max {
            return Err(Error::config(
                self.name,
                &format!("{prefix}_min"),
                format!("{min} exceeds {prefix}_max = {max}"),
            ));
        }
        if count > 1 && min == max {
            return Err(Error::config(
                self.name,
                &count_key,
                "several points need min < max",
            ));
        }
        Ok(Axis::new(min, max, count))
    }

    fn finish(self) -> Result<()> {
        match self.values.into_keys().next() {
            Some(key) => Err(Error::config(self.name, &key, "unknown key")),
            None => Ok(()),
        }
    }
}

fn number_list(section: &str, key: &str, raw: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::config(section, key, format!("bad number '{}'", s.trim())))
        })
        .collect()
}

impl RunConfig {
    /// Reference trimer, entangled source and default scan axes.
    pub fn reference() -> Self {
        let model = ExcitonModel::reference_trimer();
        Self {
            molecule: MoleculeConfig {
                site_energies: model.site_energies().to_vec(),
                hopping: model.hopping(),
                rates: model.downhill_rates().clone(),
                pure_dephasing: model.pure_dephasing(),
                initial_state: InitialState::Site(0),
                polarizability: None,
            },
            photons: PhotonsConfig {
                kind: SourceKind::Entangled,
                omega_plus: 0.3,
                sigma0: 0.001,
                tau0: 25.0,
                sigma_tilde0: None,
                phase_matching_phase: true,
            },
            scan: ScanConfig {
                mode: Mode::Spectrum,
                omega: Axis::new(-0.25, 0.25, 241),
                time: Axis::new(0.0, 800.0, 81),
                delta_t: 0.0,
                omega_minus: 0.13,
                hom_time: 0.0,
                delay: Axis::new(-100.0, 100.0, 401),
            },
            numerics: NumericsConfig {
                dt: 1.0,
                horizon: None,
                step_divisor: 40.0,
                tail: 20.0,
                tolerance: 0.01,
                engine: EnginePath::Impulsive,
                threads: 0,
                causal: true,
                exchange: ExchangeVariant::DelaySwap,
            },
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let opt = ParseOption {
            enabled_quote: false,
            enabled_escape: false,
            ..ParseOption::default()
        };
        let doc = Ini::load_from_str_opt(text, opt)
            .map_err(|e| Error::config("", "", format!("syntax error: {e}")))?;

        let mut sections: BTreeMap<&'static str, Section> = ["molecule", "photons", "scan", "numerics"]
            .into_iter()
            .map(|name| (name, Section { name, values: BTreeMap::new() }))
            .collect();
        for (name, props) in doc.iter() {
            if name.is_none() && props.is_empty() {
                continue;
            }
            let name = name.unwrap_or("");
            let section = match sections.values_mut().find(|s| s.name == name) {
                Some(s) => s,
                None => {
                    let key = props.iter().next().map(|(k, _)| k).unwrap_or("");
                    return Err(Error::config(name, key, "unknown section"));
                }
            };
            for (key, value) in props.iter() {
                if section.values.insert(key.to_string(), value.trim().to_string()).is_some() {
                    return Err(Error::config(name, key, "duplicate key"));
                }
            }
        }
        let defaults = Self::reference();
        let mut take = |name: &str| sections.remove(name).expect("fixed section list");

        let mut sec = take("molecule");
        let site_energies = match sec.take("site_energies") {
            Some(raw) => number_list("molecule", "site_energies", &raw)?,
            None => return Err(Error::config("molecule", "site_energies", "missing required key")),
        };
        if sec.values.get("hopping").is_none() {
            return Err(Error::config("molecule", "hopping", "missing required key"));
        }
        let hopping = sec.non_negative("hopping", f64::NAN)?;
        let n = site_energies.len();
        let rate_keys: Vec<String> = sec.values.keys().filter(|k| rate_key(k).is_some()).cloned().collect();
        let mut rates = BTreeMap::new();
        for key in &rate_keys {
            let (from, to) = rate_key(key).expect("filtered");
            if from >= n || to >= n || from <= to {
                return Err(Error::config(
                    "molecule",
                    key,
                    format!("rates must point downhill between eigenstates 0..{n}"),
                ));
            }
            rates.insert((from, to), sec.non_negative(key, f64::NAN)?);
        }
        if rate_keys.is_empty() && n == defaults.molecule.site_energies.len() {
            rates = defaults.molecule.rates.clone();
        }
        let pure_dephasing = sec.non_negative("pure_dephasing", defaults.molecule.pure_dephasing)?;
        let initial_state = sec
            .parsed::<InitialState>("initial_state")?
            .unwrap_or(defaults.molecule.initial_state);
        let index = match initial_state {
            InitialState::Site(k) | InitialState::Exciton(k) => k,
        };
        if index >= n {
            return Err(Error::config("molecule", "initial_state", format!("index {index} outside 0..{n}")));
        }
        let polarizability = match sec.take("polarizability").as_deref() {
            None | Some("unit") => None,
            Some(raw) => Some(parse_matrix(raw, n)?),
        };
        sec.finish()?;

        let mut sec = take("photons");
        let kind = sec.parsed::<SourceKind>("kind")?.unwrap_or(defaults.photons.kind);
        let photons = PhotonsConfig {
            kind,
            omega_plus: sec.positive("omega_plus", defaults.photons.omega_plus)?,
            sigma0: sec.positive("sigma0", defaults.photons.sigma0)?,
            tau0: sec.positive("tau0", defaults.photons.tau0)?,
            sigma_tilde0: sec.optional_positive("sigma_tilde0")?,
            phase_matching_phase: sec.boolean("phase_matching_phase", true)?,
        };
        sec.finish()?;

        let mut sec = take("scan");
        let d = &defaults.scan;
        let scan = ScanConfig {
            mode: sec.parsed::<Mode>("mode")?.unwrap_or(d.mode),
            omega: sec.axis("omega", d.omega)?,
            time: sec.axis("time", d.time)?,
            delta_t: sec.number("delta_t", d.delta_t)?,
            omega_minus: sec.number("omega_minus", d.omega_minus)?,
            hom_time: sec.number("hom_time", d.hom_time)?,
            delay: sec.axis("delay", d.delay)?,
        };
        sec.finish()?;

        let mut sec = take("numerics");
        let d = &defaults.numerics;
        let numerics = NumericsConfig {
            dt: sec.positive("dt", d.dt)?,
            horizon: sec.optional_positive("horizon")?,
            step_divisor: sec.positive("step_divisor", d.step_divisor)?,
            tail: sec.positive("tail", d.tail)?,
            tolerance: sec.positive("tolerance", d.tolerance)?,
            engine: sec.parsed::<EnginePath>("engine")?.unwrap_or(d.engine),
            threads: sec.parsed::<usize>("threads")?.unwrap_or(d.threads),
            causal: sec.boolean("causal", d.causal)?,
            exchange: sec.parsed::<ExchangeVariant>("exchange")?.unwrap_or(d.exchange),
        };
        sec.finish()?;

        let config = Self {
            molecule: MoleculeConfig {
                site_energies,
                hopping,
                rates,
                pure_dephasing,
                initial_state,
                polarizability,
            },
            photons,
            scan,
            numerics,
        };
        config.model()?;
        config.source()?;
        Ok(config)
    }

    /// INI text that parses back to `self`.
    pub fn print(&self) -> String {
        let mut out = String::new();
        let m = &self.molecule;
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let _ = writeln!(out, "[molecule]");
        let _ = writeln!(out, "site_energies = {}", list(&m.site_energies));
        let _ = writeln!(out, "hopping = {}", m.hopping);
        for (&(from, to), rate) in &m.rates {
            let _ = writeln!(out, "rate_{from}_{to} = {rate}");
        }
        let _ = writeln!(out, "pure_dephasing = {}", m.pure_dephasing);
        let _ = writeln!(out, "initial_state = {}", m.initial_state);
        match &m.polarizability {
            None => {
                let _ = writeln!(out, "polarizability = unit");
            }
            Some(rows) => {
                let rows: Vec<String> = rows.iter().map(|r| list(r)).collect();
                let _ = writeln!(out, "polarizability = {}", rows.join("; "));
            }
        }

        let p = &self.photons;
        let _ = writeln!(out, "\n[photons]");
        let _ = writeln!(out, "kind = {}", p.kind);
        let _ = writeln!(out, "omega_plus = {}", p.omega_plus);
        let _ = writeln!(out, "sigma0 = {}", p.sigma0);
        let _ = writeln!(out, "tau0 = {}", p.tau0);
        match p.sigma_tilde0 {
            Some(v) => {
                let _ = writeln!(out, "sigma_tilde0 = {v}");
            }
            None => {
                if let Ok(spec) = self.source() {
                    let _ = writeln!(out, "# sigma_tilde0 resolves to {}", spec.sigma_tilde0);
                }
                let _ = writeln!(out, "sigma_tilde0 = auto");
            }
        }
        let _ = writeln!(out, "phase_matching_phase = {}", p.phase_matching_phase);

        let s = &self.scan;
        let _ = writeln!(out, "\n[scan]");
        let _ = writeln!(out, "mode = {}", s.mode.as_str());
        for (name, axis) in [("omega", s.omega), ("time", s.time), ("delay", s.delay)] {
            let _ = writeln!(out, "{name}_min = {}", axis.min);
            let _ = writeln!(out, "{name}_max = {}", axis.max);
            let _ = writeln!(out, "{name}_count = {}", axis.count);
        }
        let _ = writeln!(out, "delta_t = {}", s.delta_t);
        let _ = writeln!(out, "omega_minus = {}", s.omega_minus);
        let _ = writeln!(out, "hom_time = {}", s.hom_time);

        let n = &self.numerics;
        let _ = writeln!(out, "\n[numerics]");
        let _ = writeln!(out, "# propagator: repeated one-step superoperator exponential exp(L dt)");
        let _ = writeln!(out, "dt = {}", n.dt);
        match n.horizon {
            Some(h) => {
                let _ = writeln!(out, "horizon = {h}");
            }
            None => {
                let _ = writeln!(out, "horizon = auto");
            }
        }
        let _ = writeln!(out, "step_divisor = {}", n.step_divisor);
        let _ = writeln!(out, "tail = {}", n.tail);
        let _ = writeln!(out, "tolerance = {}", n.tolerance);
        let _ = writeln!(out, "engine = {}", n.engine);
        let _ = writeln!(out, "threads = {}", n.threads);
        let _ = writeln!(out, "causal = {}", n.causal);
        let _ = writeln!(out, "exchange = {}", n.exchange.as_str());
        out
    }

    pub fn model(&self) -> Result<ExcitonModel> {
        let m = &self.molecule;
        ExcitonModel::new(m.site_energies.clone(), m.hopping, m.rates.clone(), m.pure_dephasing)
            .map_err(|e| Error::config("molecule", "site_energies", e.to_string()))
    }

    pub fn polarizability(&self) -> Result<PolarizabilityMatrix> {
        let n = self.molecule.site_energies.len();
        match &self.molecule.polarizability {
            None => Ok(PolarizabilityMatrix::unit(n)),
            Some(rows) => {
                let m = CMatrix::from_fn(n, n, |a, b| C64::new(rows[a][b], 0.0));
                PolarizabilityMatrix::new(m)
                    .map_err(|e| Error::config("molecule", "polarizability", e.to_string()))
            }
        }
    }

    /// Photon source of the configured kind with `omega_minus = 0`; scans set
    /// the shift per point.
    pub fn source(&self) -> Result<PhotonSourceSpec> {
        self.source_of(self.photons.kind)
    }

    pub fn source_of(&self, kind: SourceKind) -> Result<PhotonSourceSpec> {
        let p = &self.photons;
        let mut spec = PhotonSourceSpec::reference(kind)
            .with_tau0(p.tau0)
            .with_sigma0(p.sigma0);
        spec.omega_plus = p.omega_plus;
        spec.phase_matching_phase = p.phase_matching_phase;
        if let Some(w) = p.sigma_tilde0 {
            spec = spec.with_sigma_tilde0(w);
        }
        spec.validate()
            .map_err(|e| Error::config("photons", "kind", e.to_string()))?;
        Ok(spec)
    }
}

fn parse_matrix(raw: &str, n: usize) -> Result<Vec<Vec<f64>>> {
    let rows: Vec<Vec<f64>> = raw
        .split(';')
        .map(|row| number_list("molecule", "polarizability", row))
        .collect::<Result<_>>()?;
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::config(
            "molecule",
            "polarizability",
            format!("expected {n} rows of {n} numbers separated by ';'"),
        ));
    }
    for a in 0..n {
        for b in 0..a {
            if rows[a][b] != rows[b][a] {
                return Err(Error::config("molecule", "polarizability", "must be symmetric"));
            }
        }
    }
    Ok(rows)
}
